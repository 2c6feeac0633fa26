#include "mg/lp.hpp"

#include <stdexcept>

namespace mg {

namespace {

// Column mapping of an original variable onto non-negative tableau columns:
// x = offset + sign * col  (plus  - neg_col  for free variables).
struct VarMap {
    Rational offset = 0;
    int sign = 1;
    int col = -1;
    int neg_col = -1;
};

struct Tableau {
    std::vector<Vec> rows;
    Vec rhs;
    std::vector<int> basis;
    Vec cost;  // reduced costs, minimisation
    Rational z = 0;
    std::vector<bool> allowed;
    long pivots = 0;

    void pivot(std::size_t r, std::size_t c) {
        ++pivots;
        const std::size_t n = rows[r].size();
        Rational p = rows[r][c];
        for (std::size_t j = 0; j < n; ++j)
            if (rows[r][j] != 0) rows[r][j] /= p;
        rhs[r] /= p;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            Rational f = rows[i][c];
            for (std::size_t j = 0; j < n; ++j)
                if (rows[r][j] != 0) rows[i][j] -= f * rows[r][j];
            rhs[i] -= f * rhs[r];
        }
        if (cost[c] != 0) {
            Rational f = cost[c];
            for (std::size_t j = 0; j < n; ++j)
                if (rows[r][j] != 0) cost[j] -= f * rows[r][j];
            z -= f * rhs[r];
        }
        basis[r] = static_cast<int>(c);
    }

    void set_objective(const Vec& c) {
        cost = c;
        z = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            int b = basis[i];
            if (cost[b] == 0) continue;
            Rational f = cost[b];
            for (std::size_t j = 0; j < cost.size(); ++j)
                if (rows[i][j] != 0) cost[j] -= f * rows[i][j];
            z -= f * rhs[i];
        }
    }

    // Returns false when unbounded.
    bool run() {
        for (;;) {
            int enter = -1;
            for (std::size_t j = 0; j < cost.size(); ++j)
                if (allowed[j] && cost[j] < 0) {
                    enter = static_cast<int>(j);
                    break;
                }
            if (enter < 0) return true;
            int leave = -1;
            Rational best;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i][enter] <= 0) continue;
                Rational ratio = rhs[i] / rows[i][enter];
                if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = static_cast<int>(i);
                    best = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter));
        }
    }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
    const std::size_t nv = lp.num_vars();
    for (const auto& c : lp.constraints)
        if (c.row.size() != nv) throw std::invalid_argument("constraint row length differs from variable count");

    auto lower = [&](std::size_t j) -> std::optional<Rational> {
        if (lp.lower.empty()) return Rational(0);
        return lp.lower[j];
    };
    auto upper = [&](std::size_t j) -> std::optional<Rational> {
        if (lp.upper.empty()) return std::nullopt;
        return lp.upper[j];
    };

    std::vector<VarMap> vm(nv);
    int ncols = 0;
    std::vector<LpConstraint> rows;
    for (std::size_t j = 0; j < nv; ++j) {
        auto lo = lower(j);
        auto hi = upper(j);
        if (lo) {
            vm[j] = {*lo, 1, ncols++, -1};
        } else if (hi) {
            vm[j] = {*hi, -1, ncols++, -1};
        } else {
            vm[j] = {0, 1, ncols, ncols + 1};
            ncols += 2;
        }
    }
    auto translate = [&](const Vec& row, Rational rhs, Relation rel) {
        Vec out(static_cast<std::size_t>(ncols), Rational(0));
        for (std::size_t j = 0; j < nv; ++j) {
            if (row[j] == 0) continue;
            rhs -= row[j] * vm[j].offset;
            out[vm[j].col] += row[j] * vm[j].sign;
            if (vm[j].neg_col >= 0) out[vm[j].neg_col] -= row[j];
        }
        rows.push_back({std::move(out), rel, std::move(rhs)});
    };
    for (const auto& c : lp.constraints) translate(c.row, c.rhs, c.rel);
    for (std::size_t j = 0; j < nv; ++j) {
        auto lo = lower(j);
        auto hi = upper(j);
        if (lo && hi) {
            Vec e(nv, Rational(0));
            e[j] = 1;
            translate(e, *hi, Relation::Le);
        }
    }

    // Normalise to non-negative right-hand sides.
    for (auto& r : rows) {
        if (r.rhs < 0) {
            for (auto& v : r.row) v = -v;
            r.rhs = -r.rhs;
            if (r.rel == Relation::Le)
                r.rel = Relation::Ge;
            else if (r.rel == Relation::Ge)
                r.rel = Relation::Le;
        }
    }

    const std::size_t m = rows.size();
    std::size_t nslack = 0, nart = 0;
    for (const auto& r : rows) {
        if (r.rel != Relation::Eq) ++nslack;
        if (r.rel != Relation::Le) ++nart;
    }
    const std::size_t total = static_cast<std::size_t>(ncols) + nslack + nart;
    Tableau t;
    t.rows.assign(m, Vec(total, Rational(0)));
    t.rhs.resize(m);
    t.basis.assign(m, -1);
    t.allowed.assign(total, true);
    std::size_t s = static_cast<std::size_t>(ncols), a = static_cast<std::size_t>(ncols) + nslack;
    const std::size_t first_art = a;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < static_cast<std::size_t>(ncols); ++j) t.rows[i][j] = rows[i].row[j];
        t.rhs[i] = rows[i].rhs;
        if (rows[i].rel == Relation::Le) {
            t.rows[i][s] = 1;
            t.basis[i] = static_cast<int>(s++);
        } else if (rows[i].rel == Relation::Ge) {
            t.rows[i][s++] = -1;
            t.rows[i][a] = 1;
            t.basis[i] = static_cast<int>(a++);
        } else {
            t.rows[i][a] = 1;
            t.basis[i] = static_cast<int>(a++);
        }
    }

    LpResult res;
    if (nart > 0) {
        Vec c1(total, Rational(0));
        for (std::size_t j = first_art; j < total; ++j) c1[j] = 1;
        t.set_objective(c1);
        t.run();
        if (-t.z > 0) {
            res.status = LpStatus::Infeasible;
            res.pivots = t.pivots;
            return res;
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        for (std::size_t i = 0; i < t.rows.size();) {
            if (static_cast<std::size_t>(t.basis[i]) < first_art) {
                ++i;
                continue;
            }
            int col = -1;
            for (std::size_t j = 0; j < first_art; ++j)
                if (t.rows[i][j] != 0) {
                    col = static_cast<int>(j);
                    break;
                }
            if (col >= 0) {
                t.pivot(i, static_cast<std::size_t>(col));
                ++i;
            } else {
                t.rows.erase(t.rows.begin() + static_cast<long>(i));
                t.rhs.erase(t.rhs.begin() + static_cast<long>(i));
                t.basis.erase(t.basis.begin() + static_cast<long>(i));
            }
        }
        for (std::size_t j = first_art; j < total; ++j) t.allowed[j] = false;
    }

    Vec c2(total, Rational(0));
    for (std::size_t j = 0; j < nv; ++j) {
        Rational cj = lp.maximize ? -lp.objective[j] : lp.objective[j];
        c2[vm[j].col] += cj * vm[j].sign;
        if (vm[j].neg_col >= 0) c2[vm[j].neg_col] -= cj;
    }
    t.set_objective(c2);
    bool bounded = t.run();
    res.pivots = t.pivots;
    if (!bounded) {
        res.status = LpStatus::Unbounded;
        return res;
    }
    Vec col(total, Rational(0));
    for (std::size_t i = 0; i < t.rows.size(); ++i) col[t.basis[i]] = t.rhs[i];
    res.x.assign(nv, Rational(0));
    for (std::size_t j = 0; j < nv; ++j) {
        res.x[j] = vm[j].offset + vm[j].sign * col[vm[j].col];
        if (vm[j].neg_col >= 0) res.x[j] -= col[vm[j].neg_col];
    }
    res.value = dot(lp.objective, res.x);
    res.status = LpStatus::Optimal;
    return res;
}

bool satisfies(const LinearProgram& lp, const Vec& x) {
    if (x.size() != lp.num_vars()) return false;
    for (const auto& c : lp.constraints) {
        Rational lhs = dot(c.row, x);
        if (c.rel == Relation::Le && lhs > c.rhs) return false;
        if (c.rel == Relation::Ge && lhs < c.rhs) return false;
        if (c.rel == Relation::Eq && lhs != c.rhs) return false;
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        std::optional<Rational> lo = lp.lower.empty() ? std::optional<Rational>(0) : lp.lower[j];
        std::optional<Rational> hi = lp.upper.empty() ? std::nullopt : lp.upper[j];
        if (lo && x[j] < *lo) return false;
        if (hi && x[j] > *hi) return false;
    }
    return true;
}

namespace {

// max v s.t. (x^T B)_t >= v for every column t, x in the simplex.
std::pair<Rational, Vec> maximin(const Matrix& b) {
    const std::size_t n = b.size(), k = b[0].size();
    LinearProgram lp;
    lp.objective.assign(n + 1, Rational(0));
    lp.objective[n] = 1;
    lp.lower.assign(n + 1, Rational(0));
    lp.lower[n] = std::nullopt;
    lp.upper.assign(n + 1, std::nullopt);
    for (std::size_t t = 0; t < k; ++t) {
        Vec row(n + 1);
        for (std::size_t s = 0; s < n; ++s) row[s] = b[s][t];
        row[n] = -1;
        lp.add(std::move(row), Relation::Ge, 0);
    }
    Vec sum(n + 1, Rational(1));
    sum[n] = 0;
    lp.add(std::move(sum), Relation::Eq, 1);
    LpResult r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) throw std::logic_error("maximin LP not optimal");
    Vec x(r.x.begin(), r.x.begin() + static_cast<long>(n));
    return {r.value, x};
}

}  // namespace

GameValue game_value(const Matrix& a) {
    GameValue g;
    auto [v, x] = maximin(a);
    // Column player's problem is the row problem of -A^T.
    auto [u, y] = maximin(negate(transpose(a)));
    if (v != -u) throw std::logic_error("minimax duality gap");
    g.value = v;
    g.x = std::move(x);
    g.y = std::move(y);
    return g;
}

}  // namespace mg

#include "mg/qcqp.hpp"

#include <algorithm>
#include <numeric>

#include "mg/lp.hpp"

namespace mg {

std::size_t support_size(const Vec& w) {
    return static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](const Rational& v) { return v != 0; }));
}

namespace {

// Weight l on `hi`, 1 - l on `lo`, chosen so the mixture of values va, vb hits c.
Vec two_point(std::size_t n, std::size_t lo, std::size_t hi, const Rational& va, const Rational& vb, const Rational& c) {
    Vec w(n, Rational(0));
    Rational l = (c - va) / (vb - va);
    w[lo] += 1 - l;
    w[hi] += l;
    return w;
}

}  // namespace

QcqpSolution solve_qcqp_zero_sum(const Matrix& a, const Rational& c) {
    QcqpSolution sol;
    const Rational lo = min_entry(a), hi = max_entry(a);
    if (c < lo) return sol;
    const Rational target = c < hi ? c : hi;
    const std::size_t n = a.size(), k = a[0].size();

    // Row in both S+ and S-: pure doctor strategy.
    for (std::size_t s = 0; s < n; ++s) {
        int below = -1, above = -1, exact = -1;
        for (std::size_t t = 0; t < k; ++t) {
            if (a[s][t] == target && exact < 0) exact = static_cast<int>(t);
            if (a[s][t] <= target && below < 0) below = static_cast<int>(t);
            if (a[s][t] >= target && above < 0) above = static_cast<int>(t);
        }
        if (below < 0 || above < 0) continue;
        sol.x = pure(n, s);
        if (exact >= 0)
            sol.y = pure(k, static_cast<std::size_t>(exact));
        else
            sol.y = two_point(k, static_cast<std::size_t>(below), static_cast<std::size_t>(above), a[s][below],
                              a[s][above], target);
        break;
    }
    if (sol.x.empty()) {
        // Every row lies strictly on one side of the target: pure column 0,
        // mixing one row above with one row below.
        int above = -1, below = -1;
        for (std::size_t s = 0; s < n; ++s) {
            if (a[s][0] > target && above < 0) above = static_cast<int>(s);
            if (a[s][0] < target && below < 0) below = static_cast<int>(s);
        }
        sol.y = pure(k, 0);
        sol.x = two_point(n, static_cast<std::size_t>(below), static_cast<std::size_t>(above), a[below][0], a[above][0],
                          target);
    }
    sol.feasible = true;
    sol.value = bilinear(sol.x, a, sol.y);
    sol.hospital_value = -sol.value;
    sol.support_x = support_size(sol.x);
    sol.support_y = support_size(sol.y);
    return sol;
}

namespace {

JointDistribution from_lp(const LpResult& r, const Matrix& a, const Matrix& m) {
    JointDistribution jd;
    const std::size_t n = a.size(), k = a[0].size();
    jd.feasible = true;
    jd.lambda.assign(n, Vec(k, Rational(0)));
    jd.f = 0;
    jd.g = 0;
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < k; ++t) {
            jd.lambda[s][t] = r.x[s * k + t];
            jd.f += a[s][t] * jd.lambda[s][t];
            jd.g += m[s][t] * jd.lambda[s][t];
        }
    return jd;
}

Vec flatten(const Matrix& a) {
    Vec out;
    for (const auto& row : a) out.insert(out.end(), row.begin(), row.end());
    return out;
}

}  // namespace

JointDistribution solve_qcqp_repeated(const Matrix& a, const Matrix& m, const Rational& c) {
    JointDistribution none;
    if (c > max_entry(m)) return none;
    const std::size_t nv = a.size() * a[0].size();
    LinearProgram lp;
    lp.objective = flatten(a);
    lp.add(flatten(m), Relation::Ge, c);
    lp.add(Vec(nv, Rational(1)), Relation::Eq, 1);
    LpResult r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) return none;
    // Secondary objective: the partner's value among maximisers.
    LinearProgram lp2 = lp;
    lp2.objective = flatten(m);
    lp2.add(flatten(a), Relation::Eq, r.value);
    LpResult r2 = solve_lp(lp2);
    return from_lp(r2.status == LpStatus::Optimal ? r2 : r, a, m);
}

JointDistribution realize_payoff_pair(const Matrix& a, const Matrix& m, const Rational& f, const Rational& g) {
    const std::size_t nv = a.size() * a[0].size();
    LinearProgram lp;
    lp.objective.assign(nv, Rational(0));
    lp.add(flatten(a), Relation::Eq, f);
    lp.add(flatten(m), Relation::Eq, g);
    lp.add(Vec(nv, Rational(1)), Relation::Eq, 1);
    LpResult r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) return {};
    return from_lp(r, a, m);
}

CycleStrategy distribution_to_cycle(const Matrix& lambda) {
    mpz_class n = 1;
    for (const auto& row : lambda)
        for (const auto& v : row)
            if (v != 0) n = lcm(n, mpz_class(v.get_den()));
    CycleStrategy c;
    for (std::size_t s = 0; s < lambda.size(); ++s)
        for (std::size_t t = 0; t < lambda[s].size(); ++t) {
            if (lambda[s][t] == 0) continue;
            const Rational prod = lambda[s][t] * Rational(n);
            const mpz_class reps = prod.get_num();
            if (!reps.fits_slong_p()) throw std::overflow_error("cycle length does not fit a long");
            c.cycle.emplace_back(static_cast<int>(s), static_cast<int>(t));
            c.repeats.push_back(reps.get_si());
        }
    return c;
}

Rational cycle_average(const CycleStrategy& c, const Matrix& payoff) {
    Rational sum = 0;
    for (std::size_t i = 0; i < c.cycle.size(); ++i) sum += Rational(c.repeat(i)) * payoff[c.cycle[i].first][c.cycle[i].second];
    return sum / Rational(c.length());
}

std::pair<Rational, Rational> AffineTransform::a_from_b() const {
    if (doctor_rescaled) return {ratio, shift};
    // B = r A + s  =>  A = B / r - s / r
    return {1 / ratio, -shift / ratio};
}

NotStrictlyCompetitive::NotStrictlyCompetitive(std::size_t r, std::size_t c, Rational av, Rational bv)
    : std::runtime_error("affine identity fails at entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                         "): A=" + av.get_str() + ", -M=" + bv.get_str()),
      row(r),
      col(c),
      a(std::move(av)),
      b(std::move(bv)) {}

AffineTransform affine_transform(const Matrix& a, const Matrix& m) {
    const Matrix b = negate(m);
    const Rational amin = min_entry(a), amax = max_entry(a), bmin = min_entry(b), bmax = max_entry(b);
    AffineTransform t;
    if (amin == amax || bmin == bmax) {
        if (amin != amax || bmin != bmax) {
            // Exactly one constant matrix: locate an entry off the constant.
            const Matrix& var = amin == amax ? b : a;
            const Rational v0 = var[0][0];
            for (std::size_t s = 0; s < a.size(); ++s)
                for (std::size_t c = 0; c < a[s].size(); ++c)
                    if (var[s][c] != v0) throw NotStrictlyCompetitive(s, c, a[s][c], b[s][c]);
        }
        t.constant = true;
        t.ratio = 1;
        t.shift = amin - bmin;
        t.doctor_rescaled = true;
        return t;
    }
    const Rational lambda = (amax - amin) / (bmax - bmin);
    const Rational mu = amin - lambda * bmin;
    for (std::size_t s = 0; s < a.size(); ++s)
        for (std::size_t c = 0; c < a[s].size(); ++c)
            if (a[s][c] != lambda * b[s][c] + mu) throw NotStrictlyCompetitive(s, c, a[s][c], b[s][c]);
    if (lambda <= 1) {
        t.ratio = lambda;
        t.shift = mu;
        t.doctor_rescaled = true;
    } else {
        t.ratio = 1 / lambda;
        t.shift = -mu / lambda;
        t.doctor_rescaled = false;
    }
    return t;
}

std::vector<Vec> simplex_grid(std::size_t n, int k) {
    std::vector<Vec> out;
    std::vector<int> parts(n, 0);
    // Enumerate compositions of k into n non-negative parts.
    auto rec = [&](auto&& self, std::size_t i, int left) -> void {
        if (i + 1 == n) {
            parts[i] = left;
            Vec w(n);
            for (std::size_t j = 0; j < n; ++j) w[j] = frac(parts[j], k);
            out.push_back(std::move(w));
            return;
        }
        for (int v = left; v >= 0; --v) {
            parts[i] = v;
            self(self, i + 1, left - v);
        }
    };
    rec(rec, 0, k);
    return out;
}

QcqpSolution solve_qcqp_grid_oracle(const Matrix& a, const Matrix& m, const Rational& c, int k) {
    QcqpSolution best;
    best.approximate = true;
    const auto xs = simplex_grid(a.size(), k);
    const auto ys = simplex_grid(a[0].size(), k);
    auto to_d = [](const Matrix& mat) {
        std::vector<std::vector<double>> out;
        for (const auto& row : mat) {
            out.emplace_back();
            for (const auto& v : row) out.back().push_back(v.get_d());
        }
        return out;
    };
    const auto ad = to_d(a), md = to_d(m);
    const double cd = c.get_d();
    constexpr double tol = 1e-9;
    double best_val = 0;
    for (const auto& x : xs) {
        std::vector<double> xa(a[0].size(), 0.0), xm(a[0].size(), 0.0);
        for (std::size_t s = 0; s < a.size(); ++s) {
            double w = x[s].get_d();
            if (w == 0) continue;
            for (std::size_t t = 0; t < a[0].size(); ++t) {
                xa[t] += w * ad[s][t];
                xm[t] += w * md[s][t];
            }
        }
        for (const auto& y : ys) {
            double fv = 0, gv = 0;
            for (std::size_t t = 0; t < y.size(); ++t) {
                double w = y[t].get_d();
                fv += w * xa[t];
                gv += w * xm[t];
            }
            if (gv < cd - tol) continue;
            if (best.feasible && fv <= best_val) continue;
            // Borderline candidates are settled exactly.
            Rational g = bilinear(x, m, y);
            if (g < c) continue;
            best.feasible = true;
            best_val = fv;
            best.x = x;
            best.y = y;
        }
    }
    if (best.feasible) {
        best.value = bilinear(best.x, a, best.y);
        best.hospital_value = bilinear(best.x, m, best.y);
        best.support_x = support_size(best.x);
        best.support_y = support_size(best.y);
    }
    return best;
}

}  // namespace mg

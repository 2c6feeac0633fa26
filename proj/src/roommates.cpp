#include "mg/roommates.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include "mg/lp.hpp"
#include "mg/payoffs.hpp"
#include "mg/qcqp.hpp"

namespace mg {

namespace {

const BimatrixGame& require_game(const BimatrixGame* g, const Instance& inst, int a, int b) {
    if (g->cls == GameClass::General)
        throw InputError("UnsupportedClass", "roommates pair (" + inst.doctors[a].id + "," + inst.doctors[b].id +
                                                 ") is a general game");
    return *g;
}

// Payoff line of a zero-sum or strictly competitive pair in row coordinates:
// the column player gets k p + c when the row player gets p in [lo, hi].
struct Line {
    Rational lo, hi;
    Rational k, c;
    bool constant = false;  // single attainable point (lo, c)
};

Line payoff_line(const BimatrixGame& g) {
    Line l;
    l.lo = min_entry(g.A);
    l.hi = max_entry(g.A);
    if (l.lo == l.hi) {
        l.constant = true;
        l.k = 0;
        l.c = g.M[0][0];
        return l;
    }
    for (std::size_t s = 0; s < g.rows(); ++s)
        for (std::size_t t = 0; t < g.cols(); ++t)
            if (g.A[s][t] != g.A[0][0]) {
                l.k = (g.M[s][t] - g.M[0][0]) / (g.A[s][t] - g.A[0][0]);
                l.c = g.M[0][0] - l.k * g.A[0][0];
                return l;
            }
    return l;
}

bool line_class(GameClass c) { return c == GameClass::ZeroSum || c == GameClass::StrictlyCompetitive; }

// [a, b] is the partner's range. For v < b, at(v) is the supremum of d's value
// over outcomes giving the partner strictly more than v. On [a, b] it is also
// d's value when the partner gets exactly v.
struct Map {
    Rational a, b, alpha, beta;
    Rational at(const Rational& v) const { return alpha * std::max<Rational>(v, a) + beta; }
    bool improvable(const Rational& v) const { return v < b; }
    bool exact(const Rational& v) const { return a <= v && v <= b; }
};

Map partner_map(const Line& l, bool d_is_row) {
    Map m;
    if (l.constant) {
        m.alpha = 0;
        if (d_is_row) {
            m.a = m.b = l.c;
            m.beta = l.lo;
        } else {
            m.a = m.b = l.lo;
            m.beta = l.c;
        }
        return m;
    }
    if (d_is_row) {
        // partner is the column: q in [k hi + c, k lo + c], p = (q - c) / k
        m.a = l.k * l.hi + l.c;
        m.b = l.k * l.lo + l.c;
        m.alpha = 1 / l.k;
        m.beta = -l.c / l.k;
    } else {
        m.a = l.lo;
        m.b = l.hi;
        m.alpha = l.k;
        m.beta = l.c;
    }
    return m;
}

// sup (own payoff) s.t. partner payoff > v over joint distributions, which is
// the max under >= whenever the strict set is non-empty.
std::optional<Rational> repeated_value(const Matrix& self, const Matrix& partner, const Rational& v) {
    if (max_entry(partner) <= v) return std::nullopt;
    LinearProgram lp;
    const std::size_t r = self.size(), c = self[0].size();
    Vec sum(r * c, 1), row(r * c);
    lp.objective.resize(r * c);
    for (std::size_t s = 0; s < r; ++s)
        for (std::size_t t = 0; t < c; ++t) {
            lp.objective[s * c + t] = self[s][t];
            row[s * c + t] = partner[s][t];
        }
    lp.add(sum, Relation::Eq, 1);
    lp.add(row, Relation::Ge, v);
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) return std::nullopt;
    return res.value;
}

// Row-player payoffs in the orientation of the stored key.
std::pair<Rational, Rational> oriented(int d, int key_first, const Rational& fd, const Rational& fp) {
    return d == key_first ? std::make_pair(fd, fp) : std::make_pair(fp, fd);
}

bool attainable(const Instance& inst, int d, int dp, const Rational& fd, const Rational& fp) {
    auto key = pair_key(d, dp);
    const BimatrixGame* gp = inst.game(key.first, key.second);
    if (!gp) return false;
    const BimatrixGame& g = require_game(gp, inst, key.first, key.second);
    auto [p, q] = oriented(d, key.first, fd, fp);
    if (line_class(g.cls)) {
        Line l = payoff_line(g);
        return l.lo <= p && p <= l.hi && q == l.k * p + l.c;
    }
    return realize_payoff_pair(g.A, g.M, p, q).feasible;
}

// Vertex v of the doubled graph used for covering matchings: doctors 0..n-1,
// copies n..2n-1, and an edge d -- d+n for doctors allowed to stay single.
struct Cover {
    std::vector<int> partner;  // -1 single
    int exposed = -1;
};

Cover cover_matching(const DemandGraph& dg) {
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    using Vertex = boost::graph_traits<Graph>::vertex_descriptor;
    const int n = static_cast<int>(dg.adj.size());
    Graph g(2 * n);
    for (int d = 0; d < n; ++d) {
        for (int e : dg.adj[d])
            if (d < e) {
                boost::add_edge(d, e, g);
                boost::add_edge(d + n, e + n, g);
            }
        if (dg.single_ok[d]) boost::add_edge(d, d + n, g);
    }
    std::vector<Vertex> mate(2 * n);
    boost::edmonds_maximum_cardinality_matching(g, &mate[0]);
    const Vertex none = boost::graph_traits<Graph>::null_vertex();

    Cover out;
    for (int copy = 0; copy < 2; ++copy) {
        std::vector<int> partner(n, -1);
        int exposed = -1;
        for (int d = 0; d < n; ++d) {
            Vertex m = mate[d + copy * n];
            if (m != none && static_cast<int>(m) / n == copy)
                partner[d] = static_cast<int>(m) - copy * n;
            else if (!dg.single_ok[d] && exposed < 0)
                exposed = d;
        }
        if (exposed < 0) {
            out.partner = partner;
            out.exposed = -1;
            return out;
        }
        if (out.exposed < 0) out.exposed = exposed;
    }
    return out;
}

// Mixed profile with xAy == p using at most two rows and two columns: walk
// from a minimum cell along its row to the column of a maximum cell, then down
// that column.
Profile line_profile(const Matrix& a, const Rational& p) {
    const std::size_t r = a.size(), c = a[0].size();
    std::size_t s1 = 0, t1 = 0, s2 = 0, t2 = 0;
    for (std::size_t s = 0; s < r; ++s)
        for (std::size_t t = 0; t < c; ++t) {
            if (a[s][t] < a[s1][t1]) s1 = s, t1 = t;
            if (a[s][t] > a[s2][t2]) s2 = s, t2 = t;
        }
    Profile pr;
    pr.x = pure(r, s1);
    pr.y = pure(c, t1);
    auto mix = [](Vec& w, std::size_t i, std::size_t j, const Rational& from, const Rational& to,
                  const Rational& target) {
        Rational q = (target - from) / (to - from);
        w[i] = 1 - q;
        w[j] += q;
    };
    const Rational corner = a[s1][t2];
    auto between = [](const Rational& u, const Rational& v, const Rational& x) {
        return std::min<Rational>(u, v) <= x && x <= std::max<Rational>(u, v);
    };
    if (p == a[s1][t1]) return pr;
    if (between(a[s1][t1], corner, p)) {
        pr.y = Vec(c, 0);
        pr.y[t1] = 1;
        if (t1 != t2) mix(pr.y, t1, t2, a[s1][t1], corner, p);
        return pr;
    }
    pr.y = pure(c, t2);
    pr.x = Vec(r, 0);
    pr.x[s1] = 1;
    mix(pr.x, s1, s2, corner, a[s2][t2], p);
    return pr;
}

Profile pair_profile(const BimatrixGame& g, const Rational& p, const Rational& q) {
    if (line_class(g.cls)) {
        if (min_entry(g.A) == max_entry(g.A)) return {pure(g.rows(), 0), pure(g.cols(), 0), std::nullopt};
        return line_profile(g.A, p);
    }
    JointDistribution jd = realize_payoff_pair(g.A, g.M, p, q);
    Profile pr;
    pr.cycle = distribution_to_cycle(jd.lambda);
    return pr;
}

struct Term {
    int partner;
    Map map;
};

// f_d is at least every value d could get by improving some partner, and is
// either the IRP or attained with a partner at its current value.
bool leaf_ok(const std::vector<std::vector<Term>>& terms, const PayoffProfile& irp, const PayoffProfile& f, int d) {
    bool attained = f[d] == irp[d];
    for (const Term& t : terms[d]) {
        const Rational& v = f[t.partner];
        if (t.map.improvable(v) && t.map.at(v) > f[d]) return false;
        if (t.map.exact(v) && t.map.at(v) == f[d]) attained = true;
    }
    return attained;
}

}  // namespace

std::optional<Rational> partnership_value(const Instance& inst, int d, int dp, const Rational& v) {
    auto key = pair_key(d, dp);
    const BimatrixGame* gp = inst.game(key.first, key.second);
    if (!gp) return std::nullopt;
    const BimatrixGame& g = require_game(gp, inst, key.first, key.second);
    const bool row = d == key.first;
    if (line_class(g.cls)) {
        Map m = partner_map(payoff_line(g), row);
        if (!m.improvable(v)) return std::nullopt;
        return m.at(v);
    }
    return row ? repeated_value(g.A, g.M, v) : repeated_value(transpose(g.M), transpose(g.A), v);
}

std::vector<int> demand_set(const Instance& inst, const PayoffProfile& f, int d) {
    std::vector<int> out;
    for (int dp = 0; dp < static_cast<int>(inst.doctors.size()); ++dp)
        if (dp != d && attainable(inst, d, dp, f[d], f[dp])) out.push_back(dp);
    return out;
}

DemandGraph demand_graph(const Instance& inst, const PayoffProfile& f) {
    const int n = static_cast<int>(inst.doctors.size());
    DemandGraph dg;
    dg.adj.assign(n, {});
    dg.single_ok.assign(n, false);
    for (int d = 0; d < n; ++d) {
        dg.single_ok[d] = f[d] == inst.doctors[d].irp;
        for (int e = d + 1; e < n; ++e)
            if (attainable(inst, d, e, f[d], f[e])) {
                dg.adj[d].push_back(e);
                dg.adj[e].push_back(d);
            }
    }
    for (auto& a : dg.adj) std::sort(a.begin(), a.end());
    return dg;
}

AspirationCheck is_aspiration(const Instance& inst, const PayoffProfile& f) {
    const int n = static_cast<int>(inst.doctors.size());
    if (static_cast<int>(f.size()) != n) throw InputError("DimensionMismatch", "payoff profile length differs");
    for (int d = 0; d < n; ++d) {
        Rational best = inst.doctors[d].irp;
        for (int dp = 0; dp < n; ++dp) {
            if (dp == d) continue;
            if (auto u = partnership_value(inst, d, dp, f[dp])) best = std::max<Rational>(best, *u);
        }
        if (f[d] < best) return {false, d, best};
        if (f[d] != inst.doctors[d].irp && demand_set(inst, f, d).empty()) return {false, d, best};
    }
    return {};
}

bool is_balanced(const Instance& inst, const PayoffProfile& f) {
    DemandGraph dg = demand_graph(inst, f);
    const std::size_t n = dg.adj.size();
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t d = 0; d < n; ++d) {
        if (dg.single_ok[d]) edges.push_back({d, d});
        for (int e : dg.adj[d])
            if (d < static_cast<std::size_t>(e)) edges.push_back({d, static_cast<std::size_t>(e)});
    }
    // fractional perfect matching with loops
    LinearProgram lp;
    lp.objective.assign(edges.size(), 0);
    for (std::size_t v = 0; v < n; ++v) {
        Vec row(edges.size(), 0);
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (edges[i].first == v || edges[i].second == v) row[i] = 1;
        lp.add(row, Relation::Eq, 1);
    }
    return solve_lp(lp).status != LpStatus::Infeasible;
}

AspirationSearch search_aspiration(const Instance& inst, long node_cap) {
    const int n = static_cast<int>(inst.doctors.size());
    PayoffProfile irp(n);
    for (int d = 0; d < n; ++d) irp[d] = inst.doctors[d].irp;

    std::vector<std::vector<Term>> terms(n);
    for (const auto& [key, g] : inst.games) {
        if (!line_class(g.cls))
            throw InputError("UnsupportedClass", std::string("aspiration search needs zero-sum or strictly "
                                                             "competitive pairs, got ") + to_string(g.cls));
        Line l = payoff_line(g);
        terms[key.first].push_back({key.second, partner_map(l, true)});
        terms[key.second].push_back({key.first, partner_map(l, false)});
    }

    // Candidate values: IRPs, range endpoints and cycle fixed points, closed
    // under the partner maps.
    std::vector<std::set<Rational>> cand(n);
    for (int d = 0; d < n; ++d) {
        cand[d].insert(irp[d]);
        for (const Term& t : terms[d]) {
            cand[d].insert(t.map.at(t.map.a));
            cand[d].insert(t.map.at(t.map.b));
        }
    }
    // Fixed points of simple cycles f_v0 = m(v0, v1)(f_v1), ..., f_vk = m(vk, v0)(f_v0)
    // taken on the linear pieces. Two-cycles compose to the identity.
    const int max_cycle = std::min(n, 7);
    std::vector<bool> on(n, false);
    std::function<void(int, int, int, const Rational&, const Rational&)> walk =
        [&](int root, int v, int len, const Rational& slope, const Rational& icpt) {
            for (const Term& t : terms[v]) {
                Rational s2 = slope * t.map.alpha, c2 = slope * t.map.beta + icpt;
                if (t.partner == root) {
                    if (len >= 3 && s2 != 1) cand[root].insert(c2 / (1 - s2));
                    continue;
                }
                if (on[t.partner] || t.partner < root || len == max_cycle) continue;
                on[t.partner] = true;
                walk(root, t.partner, len + 1, s2, c2);
                on[t.partner] = false;
            }
        };
    for (int d = 0; d < n; ++d) {
        on[d] = true;
        walk(d, d, 1, 1, 0);
        on[d] = false;
    }
    const std::size_t cap = 20000;
    for (int round = 0; round <= n; ++round) {
        bool grew = false;
        std::size_t total = 0;
        for (int d = 0; d < n; ++d) {
            for (const Term& t : terms[d]) {
                std::vector<Rational> add;
                for (const Rational& v : cand[t.partner])
                    if (v <= t.map.b) add.push_back(t.map.at(v));
                for (auto& v : add) grew |= cand[d].insert(v).second;
            }
            total += cand[d].size();
        }
        if (!grew || total > cap) break;
    }

    std::vector<std::vector<Rational>> vals(n);
    AspirationSearch out;
    for (int d = 0; d < n; ++d) {
        for (const Rational& v : cand[d])
            if (v >= irp[d]) vals[d].push_back(v);
        out.candidates += vals[d].size();
    }

    using Box = std::vector<std::pair<std::size_t, std::size_t>>;  // index ranges, inclusive
    std::optional<AspirationSearch> first_any, first_balanced;
    bool done = false;

    auto propagate = [&](Box& box) {
        for (bool changed = true; changed;) {
            changed = false;
            for (int d = 0; d < n; ++d) {
                Rational lo = irp[d], hi = irp[d];
                for (const Term& t : terms[d]) {
                    const Rational& L = vals[t.partner][box[t.partner].first];
                    const Rational& U = vals[t.partner][box[t.partner].second];
                    if (U < t.map.b) lo = std::max<Rational>(lo, t.map.at(U));
                    if (L <= t.map.b && U >= t.map.a) hi = std::max<Rational>(hi, t.map.at(L));
                }
                auto& [i, j] = box[d];
                std::size_t ni = i, nj = j;
                while (ni <= nj && vals[d][ni] < lo) ++ni;
                if (ni > nj) return false;
                while (nj > ni && vals[d][nj] > hi) --nj;
                if (vals[d][nj] > hi) return false;
                if (ni != i || nj != j) {
                    i = ni;
                    j = nj;
                    changed = true;
                }
            }
        }
        return true;
    };

    std::function<void(Box)> dfs = [&](Box box) {
        if (done || out.nodes >= node_cap) return;
        ++out.nodes;
        if (!propagate(box)) return;
        int pick = -1;
        std::size_t width = 0;
        for (int d = 0; d < n; ++d)
            if (box[d].second - box[d].first > width) width = box[d].second - box[d].first, pick = d;
        if (pick < 0) {
            PayoffProfile f(n);
            for (int d = 0; d < n; ++d) f[d] = vals[d][box[d].first];
            for (int d = 0; d < n; ++d)
                if (!leaf_ok(terms, irp, f, d)) return;
            AspirationSearch hit;
            hit.f = f;
            hit.balanced = is_balanced(inst, f);
            hit.realizable = hit.balanced && cover_matching(demand_graph(inst, f)).exposed < 0;
            if (!first_any) first_any = hit;
            if (hit.balanced && !first_balanced) first_balanced = hit;
            if (hit.realizable) {
                first_balanced = hit;
                done = true;
            }
            return;
        }
        for (std::size_t k = box[pick].first; k <= box[pick].second && !done; ++k) {
            Box next = box;
            next[pick] = {k, k};
            dfs(next);
        }
    };
    Box root(n);
    for (int d = 0; d < n; ++d) root[d] = {0, vals[d].size() - 1};
    dfs(root);

    const std::optional<AspirationSearch>& pick = first_balanced ? first_balanced : first_any;
    if (!pick)
        throw NoAspirationFound(out.nodes >= node_cap ? "search node cap reached"
                                                      : "no aspiration among the candidate values");
    AspirationSearch res = *pick;
    res.nodes = out.nodes;
    res.candidates = out.candidates;
    return res;
}

PayoffProfile solve_aspiration_zero_sum(const Instance& inst) {
    if (inst.kind != ModelKind::Roommates) throw InputError("UnsupportedModel", "aspirations need a roommates instance");
    return search_aspiration(inst).f;
}

Realization realize_aspiration(const Instance& inst, const PayoffProfile& f) {
    AspirationCheck chk = is_aspiration(inst, f);
    if (!chk.holds)
        throw NotAnAspiration(chk.doctor, "doctor " + inst.doctors[chk.doctor].id + " has " + to_string(f[chk.doctor]) +
                                              " but its equation gives " + to_string(chk.expected));
    DemandGraph dg = demand_graph(inst, f);
    Cover cv = cover_matching(dg);
    if (cv.exposed >= 0) {
        UnrealizableReport rep;
        rep.doctor = cv.exposed;
        std::vector<bool> seen(dg.adj.size(), false);
        std::deque<int> q{cv.exposed};
        seen[cv.exposed] = true;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            rep.component.push_back(v);
            for (int w : dg.adj[v])
                if (!seen[w]) seen[w] = true, q.push_back(w);
        }
        std::sort(rep.component.begin(), rep.component.end());
        rep.reason = rep.component.size() % 2 == 1 ? "odd component" : "unmatchable doctor";
        return rep;
    }
    // doctors left single sit at their IRP; pair up those that demand each other
    for (std::size_t d = 0; d < dg.adj.size(); ++d)
        for (int e : dg.adj[d])
            if (cv.partner[d] < 0 && cv.partner[e] < 0) {
                cv.partner[d] = e;
                cv.partner[e] = static_cast<int>(d);
            }
    Allocation alloc = empty_allocation(inst);
    alloc.match = cv.partner;
    for (int d = 0; d < static_cast<int>(f.size()); ++d) {
        int p = cv.partner[d];
        if (p <= d) continue;
        const BimatrixGame& g = *inst.game(d, p);
        alloc.profiles[{d, p}] = pair_profile(g, f[d], f[p]);
    }
    return alloc;
}

}  // namespace mg

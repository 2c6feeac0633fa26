#include "mg/renegotiation.hpp"

#include <algorithm>

#include "mg/lp.hpp"
#include "mg/pair_game.hpp"
#include "mg/payoffs.hpp"
#include "mg/qcqp.hpp"
#include "mg/stability.hpp"

namespace mg {

const char* to_string(CneCase c) {
    switch (c) {
        case CneCase::SaddleValue: return "SaddleValue";
        case CneCase::DoctorBinding: return "DoctorBinding";
        case CneCase::HospitalBinding: return "HospitalBinding";
        case CneCase::UniformEquilibrium: return "UniformEquilibrium";
        case CneCase::PunishmentSupported: return "PunishmentSupported";
    }
    return "?";
}

Rational seat_baseline(const Instance& inst, int h, const std::optional<Rational>& baseline) {
    return baseline ? *baseline : inst.hospitals[h].irp;
}

ReservationPair reservation_payoffs(const Instance& inst, const Allocation& alloc, int d, int h, const Rational& eps,
                                    const std::optional<Rational>& baseline) {
    if (alloc.match[d] != h) throw std::invalid_argument("reservation_payoffs: pair is not matched");
    const PayoffReport rep = evaluate_payoffs(inst, alloc);
    ReservationPair r{inst.doctors[d].irp, seat_baseline(inst, h, baseline)};

    for (std::size_t kk = 0; kk < inst.hospitals.size(); ++kk) {
        const int k = static_cast<int>(kk);
        if (k == h) continue;
        const BimatrixGame* g = inst.game(d, k);
        if (!g) continue;
        const auto members = alloc.members(k);
        Rational level = seat_baseline(inst, k, baseline);
        if (static_cast<int>(members.size()) >= inst.hospitals[k].quota) {
            level = rep.seat.at({members[0], k});
            for (int m : members) level = std::min<Rational>(level, rep.seat.at({m, k}));
        }
        const Rational thr = level + eps;
        if (!(max_partner(*g) > thr)) continue;
        PairOption o = best_for_doctor(*g, thr);
        if (o.feasible && o.f > r.doctor) r.doctor = o.f;
    }

    for (std::size_t kk = 0; kk < inst.doctors.size(); ++kk) {
        const int k = static_cast<int>(kk);
        if (alloc.match[k] == h) continue;
        const BimatrixGame* g = inst.game(k, h);
        if (!g) continue;
        const Rational thr = rep.doctor[k] + eps;
        if (!(max_doctor(*g) > thr)) continue;
        PairOption o = best_for_partner(*g, thr);
        if (o.feasible && o.g > r.hospital) r.hospital = o.g;
    }
    return r;
}

namespace {

// max sum_k weight_k * (obj_k . w_k) over blocks w_k in a simplex, subject to
// sum_k weight_k * (con_k . w_k) >= rhs.
Deviation block_lp(const std::vector<Vec>& obj, const std::vector<Vec>& con, const std::vector<Rational>& weight,
                   const Rational& rhs) {
    const std::size_t blocks = obj.size(), n = obj.empty() ? 0 : obj[0].size();
    LinearProgram lp;
    lp.objective.assign(blocks * n, Rational(0));
    Vec crow(blocks * n);
    for (std::size_t k = 0; k < blocks; ++k) {
        Vec sum(blocks * n, Rational(0));
        for (std::size_t s = 0; s < n; ++s) {
            lp.objective[k * n + s] = weight[k] * obj[k][s];
            crow[k * n + s] = weight[k] * con[k][s];
            sum[k * n + s] = 1;
        }
        lp.add(std::move(sum), Relation::Eq, 1);
    }
    lp.add(crow, Relation::Ge, rhs);
    LpResult r = solve_lp(lp);
    Deviation dv;
    if (r.status != LpStatus::Optimal) return dv;
    dv.exists = true;
    dv.value = r.value;
    return dv;
}

Rational max_of(const Vec& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

Deviation doctor_deviation(const BimatrixGame& g, const Profile& p, const Rational& g_res, const Rational& eps) {
    const Rational f = profile_payoffs(g, p).first;
    Deviation dv;
    if (p.cycle && p.cycle->hospital_punishes) {
        dv.exists = true;
        dv.value = max_of(times_col(g.A, p.cycle->hospital_punishment));
    } else if (p.cycle) {
        // Group the cycle's stages by the hospital's action.
        std::vector<Vec> obj, con;
        std::vector<Rational> weight;
        const CycleStrategy& c = *p.cycle;
        const Rational len = Rational(c.length());
        for (std::size_t t = 0; t < g.cols(); ++t) {
            long count = 0;
            for (std::size_t i = 0; i < c.cycle.size(); ++i) count += c.cycle[i].second == static_cast<int>(t) ? c.repeat(i) : 0;
            if (!count) continue;
            Vec a(g.rows()), m(g.rows());
            for (std::size_t s = 0; s < g.rows(); ++s) {
                a[s] = g.A[s][t];
                m[s] = g.M[s][t];
            }
            obj.push_back(a);
            con.push_back(m);
            weight.push_back(Rational(count) / len);
        }
        dv = block_lp(obj, con, weight, g_res - eps);
    } else {
        dv = block_lp({times_col(g.A, p.y)}, {times_col(g.M, p.y)}, {Rational(1)}, g_res - eps);
    }
    dv.profitable = dv.exists && dv.value > f + eps;
    return dv;
}

Deviation hospital_deviation(const BimatrixGame& g, const Profile& p, const Rational& f_res, const Rational& eps) {
    const Rational gv = profile_payoffs(g, p).second;
    Deviation dv;
    if (p.cycle && p.cycle->doctor_punishes) {
        dv.exists = true;
        dv.value = max_of(row_times(p.cycle->doctor_punishment, g.M));
    } else if (p.cycle) {
        std::vector<Vec> obj, con;
        std::vector<Rational> weight;
        const CycleStrategy& c = *p.cycle;
        const Rational len = Rational(c.length());
        for (std::size_t s = 0; s < g.rows(); ++s) {
            long count = 0;
            for (std::size_t i = 0; i < c.cycle.size(); ++i) count += c.cycle[i].first == static_cast<int>(s) ? c.repeat(i) : 0;
            if (!count) continue;
            obj.push_back(g.M[s]);
            con.push_back(g.A[s]);
            weight.push_back(Rational(count) / len);
        }
        dv = block_lp(obj, con, weight, f_res - eps);
    } else {
        dv = block_lp({row_times(p.x, g.M)}, {row_times(p.x, g.A)}, {Rational(1)}, f_res - eps);
    }
    dv.profitable = dv.exists && dv.value > gv + eps;
    return dv;
}

bool is_eps_cne(const BimatrixGame& g, const Profile& p, const Rational& f_res, const Rational& g_res,
                const Rational& eps) {
    auto [f, v] = profile_payoffs(g, p);
    if (f + eps < f_res || v + eps < g_res) return false;
    return !doctor_deviation(g, p, g_res, eps).profitable && !hospital_deviation(g, p, f_res, eps).profitable;
}

CneResult compute_cne_zero_sum(const Matrix& a, const Rational& f_res, const Rational& g_res, const Rational& eps,
                               const std::optional<Rational>& slack) {
    const Rational sl = slack ? *slack : 2 * eps;
    const Rational lo = f_res - sl;
    const Rational hi = -g_res + sl;
    if (lo > hi || hi < min_entry(a) || lo > max_entry(a)) throw InfeasibleReservations();

    const GameValue gv = game_value(a);
    const std::size_t n = a.size(), k = a[0].size();
    CneResult res;
    const Rational v = median3(lo, gv.value, hi);
    if (v == gv.value) {
        res.profile.x = gv.x;
        res.profile.y = gv.y;
        res.tag = CneCase::SaddleValue;
    } else if (gv.value < lo) {
        // Hospital mixes a pure column reaching v with its minimax strategy.
        std::size_t t0 = 0;
        while (t0 < k) {
            bool reach = false;
            for (std::size_t s = 0; s < n; ++s) reach = reach || a[s][t0] >= v;
            if (reach) break;
            ++t0;
        }
        const Vec b = times_col(a, gv.y);
        Rational t = 0;
        std::size_t arg = n;
        for (std::size_t s = 0; s < n; ++s) {
            if (a[s][t0] < v) continue;
            Rational ts = (a[s][t0] - v) / (a[s][t0] - b[s]);
            if (arg == n || ts > t) {
                t = ts;
                arg = s;
            }
        }
        res.profile.y = gv.y;
        for (auto& w : res.profile.y) w *= t;
        res.profile.y[t0] += 1 - t;
        res.profile.x = pure(n, arg);
        res.tag = CneCase::DoctorBinding;
    } else {
        std::size_t s0 = 0;
        while (s0 < n && *std::min_element(a[s0].begin(), a[s0].end()) > v) ++s0;
        const Vec d = row_times(gv.x, a);
        Rational t = 0;
        std::size_t arg = k;
        for (std::size_t c = 0; c < k; ++c) {
            if (a[s0][c] > v) continue;
            Rational tc = (v - a[s0][c]) / (d[c] - a[s0][c]);
            if (arg == k || tc > t) {
                t = tc;
                arg = c;
            }
        }
        res.profile.x = gv.x;
        for (auto& w : res.profile.x) w *= t;
        res.profile.x[s0] += 1 - t;
        res.profile.y = pure(k, arg);
        res.tag = CneCase::HospitalBinding;
    }
    res.f = bilinear(res.profile.x, a, res.profile.y);
    res.g = -res.f;
    if (res.f != v) throw std::logic_error("zero-sum CNE construction missed the median value");
    res.eps_feasible = res.f + eps >= f_res && res.g + eps >= g_res;
    return res;
}

CneResult compute_cne_strictly_competitive(const Matrix& a, const Matrix& m, const Rational& f_res,
                                           const Rational& g_res, const Rational& eps,
                                           const std::optional<Rational>& slack) {
    const AffineTransform tr = affine_transform(a, m);
    CneResult res;
    if (tr.constant) {
        res.profile.x = pure(a.size(), 0);
        res.profile.y = pure(a[0].size(), 0);
        res.f = a[0][0];
        res.g = m[0][0];
        if (res.f + eps < f_res || res.g + eps < g_res) throw InfeasibleReservations();
        return res;
    }
    const Rational r = tr.ratio;
    CneResult z;
    if (tr.doctor_rescaled) {
        // A = r B + shift with B = -M: the image game is B, the hospital side is unchanged.
        const Rational f2 = (f_res - tr.shift - eps) / r + eps;
        z = compute_cne_zero_sum(negate(m), f2, g_res, eps, slack);
    } else {
        // -M = r A + shift: the image game is A, the hospital side is rescaled.
        const Rational g2 = (g_res + tr.shift - eps) / r + eps;
        z = compute_cne_zero_sum(a, f_res, g2, eps, slack);
    }
    res.profile = z.profile;
    res.tag = z.tag;
    res.f = bilinear(res.profile.x, a, res.profile.y);
    res.g = bilinear(res.profile.x, m, res.profile.y);
    res.eps_feasible = res.f + eps >= f_res && res.g + eps >= g_res;
    return res;
}

PunishmentLevels punishment_levels(const Matrix& a, const Matrix& m) {
    PunishmentLevels p;
    GameValue ga = game_value(a);
    p.alpha = ga.value;
    p.hospital_punishment = ga.y;
    // The hospital maximises M as the row player of M^T.
    GameValue gm = game_value(transpose(m));
    p.beta = gm.value;
    p.doctor_punishment = gm.y;
    return p;
}

namespace {

Vec flat(const Matrix& a) {
    Vec v;
    for (const auto& row : a) v.insert(v.end(), row.begin(), row.end());
    return v;
}

Vec add(const Vec& a, const Vec& b) {
    Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

// max c1 . l, then max c2 . l among the maximisers; nullopt when infeasible.
std::optional<std::pair<Rational, Rational>> lexi_max(LinearProgram lp, const Vec& fa, const Vec& ga, const Vec& c1,
                                                      const Vec& c2) {
    lp.objective = c1;
    LpResult r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) return std::nullopt;
    lp.add(c1, Relation::Eq, r.value);
    lp.objective = c2;
    r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) throw std::logic_error("second-stage LP failed");
    return std::make_pair(dot(fa, r.x), dot(ga, r.x));
}

}  // namespace

CneResult compute_cne_repeated(const Matrix& a, const Matrix& m, const Rational& f_res, const Rational& g_res,
                               const Rational& eps) {
    const Vec fa = flat(a), ga = flat(m);
    const std::size_t nv = fa.size();
    LinearProgram base;
    base.objective.assign(nv, Rational(0));
    base.add(Vec(nv, Rational(1)), Relation::Eq, 1);
    base.add(fa, Relation::Ge, f_res - eps);
    base.add(ga, Relation::Ge, g_res - eps);
    if (solve_lp(base).status != LpStatus::Optimal) throw InfeasibleReservations();

    const PunishmentLevels pl = punishment_levels(a, m);
    LinearProgram uni = base;
    uni.add(fa, Relation::Ge, pl.alpha);
    uni.add(ga, Relation::Ge, pl.beta);

    std::pair<Rational, Rational> point;
    CycleStrategy cyc;
    CneResult res;
    if (auto u = lexi_max(uni, fa, ga, add(fa, ga), fa)) {
        point = *u;
        cyc.hospital_punishes = cyc.doctor_punishes = true;
        res.tag = CneCase::UniformEquilibrium;
    } else {
        // Best point for the hospital; the doctor is held down by punishment.
        auto ph = lexi_max(base, fa, ga, ga, fa);
        if (ph->first >= pl.alpha) {
            point = *ph;
            cyc.hospital_punishes = true;
        } else {
            point = *lexi_max(base, fa, ga, fa, ga);
            if (point.second < pl.beta) throw std::logic_error("no punishment-supported CNE");
            cyc.doctor_punishes = true;
        }
        res.tag = CneCase::PunishmentSupported;
    }
    JointDistribution jd = realize_payoff_pair(a, m, point.first, point.second);
    if (!jd.feasible) throw std::logic_error("CNE point outside the payoff hull");
    CycleStrategy c = distribution_to_cycle(jd.lambda);
    cyc.cycle = std::move(c.cycle);
    cyc.repeats = std::move(c.repeats);
    if (cyc.hospital_punishes) cyc.hospital_punishment = pl.hospital_punishment;
    if (cyc.doctor_punishes) cyc.doctor_punishment = pl.doctor_punishment;
    res.profile.cycle = std::move(cyc);
    res.f = point.first;
    res.g = point.second;
    return res;
}

CneResult compute_cne(const BimatrixGame& g, const Rational& f_res, const Rational& g_res, const Rational& eps) {
    switch (g.cls) {
        case GameClass::ZeroSum: return compute_cne_zero_sum(g.A, f_res, g_res, eps, eps);
        case GameClass::StrictlyCompetitive:
            return compute_cne_strictly_competitive(g.A, g.M, f_res, g_res, eps, eps);
        case GameClass::Repeated: return compute_cne_repeated(g.A, g.M, f_res, g_res, eps);
        case GameClass::General: break;
    }
    throw InputError("UnsupportedClass", "no CNE routine for general games");
}

namespace {

std::vector<std::pair<int, int>> couples(const Allocation& alloc) {
    std::vector<std::pair<int, int>> c;
    for (std::size_t d = 0; d < alloc.match.size(); ++d)
        if (alloc.match[d] >= 0) c.emplace_back(alloc.match[d], static_cast<int>(d));
    std::sort(c.begin(), c.end());
    return c;  // (h, d)
}

std::optional<Rational> input_bound(const Instance& inst, const Allocation& alloc, const RenegotiationOptions& opt) {
    std::optional<Rational> bound;
    for (auto [h, d] : couples(alloc)) {
        const BimatrixGame& g = *inst.game(d, h);
        const ReservationPair r = reservation_payoffs(inst, alloc, d, h, opt.epsilon, opt.baseline);
        Rational b;
        if (g.cls == GameClass::ZeroSum) {
            const Rational w = game_value(g.A).value;
            b = std::max<Rational>(r.doctor - w, w + r.hospital);
        } else if (g.cls == GameClass::Repeated) {
            const PunishmentLevels pl = punishment_levels(g.A, g.M);
            b = std::max<Rational>(pl.alpha - r.doctor, pl.beta - r.hospital);
        } else {
            return std::nullopt;
        }
        b /= opt.epsilon;
        if (!bound || b > *bound) bound = b;
    }
    return bound;
}

}  // namespace

RenegotiationResult run_renegotiation(const Instance& inst, const Allocation& alloc, const RenegotiationOptions& opt) {
    if (opt.epsilon <= 0) throw std::invalid_argument("EpsilonNotPositive: epsilon must be > 0");
    if (inst.kind != ModelKind::AdditiveSeparable)
        throw InputError("UnsupportedModel", "renegotiation runs on additive separable instances");
    StabilityOptions sopt;
    sopt.baseline = opt.baseline;
    if (find_ir_violation(inst, alloc, opt.epsilon, sopt))
        throw InputNotPairwiseStable("agent below its IRP");
    if (auto bp = find_blocking_pair(inst, alloc, opt.epsilon, sopt))
        throw InputNotPairwiseStable("pair (" + inst.doctors[bp->doctor].id + "," + inst.hospitals[bp->partner].id +
                                     ") blocks");

    RenegotiationResult res;
    res.allocation = alloc;
    res.bound = input_bound(inst, alloc, opt);
    const auto order = couples(alloc);
    while (res.sweeps < opt.max_sweeps) {
        ++res.sweeps;
        Allocation next = res.allocation;
        bool changed = false;
        for (auto [h, d] : order) {
            const Allocation& view = opt.mode == SweepMode::Jacobi ? res.allocation : next;
            const BimatrixGame& g = *inst.game(d, h);
            const ReservationPair r = reservation_payoffs(inst, view, d, h, opt.epsilon, opt.baseline);
            const Profile& cur = view.profiles.at({d, h});
            if (is_eps_cne(g, cur, r.doctor, r.hospital, opt.epsilon)) continue;
            CneResult c = compute_cne(g, r.doctor, r.hospital, opt.epsilon);
            if (profile_payoffs(g, cur) != std::make_pair(c.f, c.g)) changed = true;
            next.profiles[{d, h}] = c.profile;
        }
        res.allocation = std::move(next);
        if (changed) ++res.changing_sweeps;
        if (opt.check_each_sweep && (find_ir_violation(inst, res.allocation, opt.epsilon, sopt) ||
                                     find_blocking_pair(inst, res.allocation, opt.epsilon, sopt)))
            res.stable_every_sweep = false;
        if (!changed) return res;
    }
    throw std::runtime_error("renegotiation exceeded the sweep cap");
}

}  // namespace mg

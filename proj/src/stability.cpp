#include "mg/stability.hpp"

#include <algorithm>
#include <bit>

#include "mg/io.hpp"
#include "mg/pair_game.hpp"
#include "mg/payoffs.hpp"
#include "mg/renegotiation.hpp"

namespace mg {

using nlohmann::json;

const char* to_string(CheckMethod m) {
    switch (m) {
        case CheckMethod::ExactInterval: return "ExactInterval";
        case CheckMethod::ExactLP: return "ExactLP";
        case CheckMethod::GridApprox: return "GridApprox";
        case CheckMethod::TableScan: return "TableScan";
    }
    return "?";
}

const char* to_string(RenegotiationVerdict::Failure f) {
    using F = RenegotiationVerdict::Failure;
    switch (f) {
        case F::None: return "none";
        case F::DoctorInfeasible: return "doctor_infeasible";
        case F::HospitalInfeasible: return "hospital_infeasible";
        case F::DoctorDeviation: return "doctor_deviation";
        case F::HospitalDeviation: return "hospital_deviation";
    }
    return "?";
}

namespace {

CheckMethod method_for(GameClass c) {
    switch (c) {
        case GameClass::ZeroSum:
        case GameClass::StrictlyCompetitive: return CheckMethod::ExactInterval;
        case GameClass::Repeated: return CheckMethod::ExactLP;
        case GameClass::General: break;
    }
    return CheckMethod::GridApprox;
}

Rational hospital_baseline(const Instance& inst, int h, const StabilityOptions& opt) {
    return opt.baseline ? *opt.baseline : inst.hospitals[h].irp;
}

// Re-evaluate a witness profile exactly; grid candidates are only accepted
// after this replay.
bool replay_strict(const BimatrixGame& g, const Profile& p, const Rational& a, const Rational& b) {
    auto [f, v] = profile_payoffs(g, p);
    return f > a && v > b;
}

std::optional<BlockingPair> roommates_pair(const Instance& inst, const Allocation& alloc, const Rational& eps,
                                           const StabilityOptions& opt) {
    const PayoffReport rep = evaluate_payoffs(inst, alloc);
    for (const auto& [key, g] : inst.games) {
        auto [a, b] = key;
        const Rational fa = rep.doctor[a] + eps, fb = rep.doctor[b] + eps;
        PairOption o = strict_improvement(g, fa, fb, opt.grid);
        if (!o.feasible || !replay_strict(g, o.profile, fa, fb)) continue;
        BlockingPair w;
        w.doctor = a;
        w.partner = b;
        w.profile = o.profile;
        w.f = o.f;
        w.g = o.g;
        w.f_before = rep.doctor[a];
        w.g_before = rep.doctor[b];
        w.method = method_for(g.cls);
        if (w.method == CheckMethod::GridApprox) w.mesh = opt.grid;
        return w;
    }
    return std::nullopt;
}

}  // namespace

std::optional<IrViolation> find_ir_violation(const Instance& inst, const Allocation& alloc, const Rational& eps,
                                             const StabilityOptions& opt) {
    const PayoffReport rep = evaluate_payoffs(inst, alloc);
    for (std::size_t d = 0; d < inst.doctors.size(); ++d)
        if (rep.doctor[d] + eps < inst.doctors[d].irp)
            return IrViolation{true, static_cast<int>(d), rep.doctor[d], inst.doctors[d].irp, false};
    for (std::size_t h = 0; h < rep.hospital.size(); ++h) {
        const Agent& a = inst.hospitals[h];
        const int hi = static_cast<int>(h);
        if (!rep.hospital[h]) return IrViolation{false, hi, a.irp - 1, a.irp, true};
        if (a.passive) continue;
        if (inst.kind == ModelKind::AdditiveSeparable) {
            const Rational base = hospital_baseline(inst, hi, opt);
            for (int d : alloc.members(hi))
                if (rep.seat.at({d, hi}) + eps < base)
                    return IrViolation{false, hi, rep.seat.at({d, hi}), base, false, d};
        } else if (*rep.hospital[h] + eps < a.irp) {
            return IrViolation{false, hi, *rep.hospital[h], a.irp, false};
        }
    }
    return std::nullopt;
}

std::optional<BlockingPair> find_blocking_pair(const Instance& inst, const Allocation& alloc, const Rational& eps,
                                               const StabilityOptions& opt) {
    if (inst.kind == ModelKind::Roommates) return roommates_pair(inst, alloc, eps, opt);
    if (inst.kind != ModelKind::AdditiveSeparable)
        throw InputError("UnsupportedModel", "pairwise check needs an additive separable or roommates instance");
    const PayoffReport rep = evaluate_payoffs(inst, alloc);
    for (std::size_t dd = 0; dd < inst.doctors.size(); ++dd) {
        const int d = static_cast<int>(dd);
        for (std::size_t hh = 0; hh < inst.hospitals.size(); ++hh) {
            const int h = static_cast<int>(hh);
            const BimatrixGame* g = inst.game(d, h);
            if (!g) continue;
            const auto members = alloc.members(h);
            int displaced = -1;
            Rational ref;
            if (alloc.match[d] == h) {
                ref = rep.seat.at({d, h});
            } else if (static_cast<int>(members.size()) >= inst.hospitals[h].quota) {
                displaced = members[0];
                for (int m : members)
                    if (rep.seat.at({m, h}) < rep.seat.at({displaced, h})) displaced = m;
                ref = rep.seat.at({displaced, h});
            } else {
                ref = hospital_baseline(inst, h, opt);
            }
            const Rational a = rep.doctor[d] + eps, b = ref + eps;
            PairOption o = strict_improvement(*g, a, b, opt.grid);
            if (!o.feasible || !replay_strict(*g, o.profile, a, b)) continue;
            BlockingPair w;
            w.doctor = d;
            w.partner = h;
            w.displaced = displaced;
            w.profile = o.profile;
            std::tie(w.f, w.g) = profile_payoffs(*g, o.profile);
            w.f_before = rep.doctor[d];
            w.g_before = ref;
            w.method = method_for(g->cls);
            if (w.method == CheckMethod::GridApprox) w.mesh = opt.grid;
            return w;
        }
    }
    return std::nullopt;
}

namespace {

std::vector<int> bits(Coalition c) {
    std::vector<int> out;
    for (int i = 0; c; ++i, c >>= 1)
        if (c & 1) out.push_back(i);
    return out;
}

std::optional<BlockingCoalition> general_coalition(const Instance& inst, const Allocation& alloc, const Rational& eps,
                                                   int cap) {
    const PayoffReport rep = evaluate_payoffs(inst, alloc);
    for (const auto& [key, entry] : inst.coalitions) {
        auto [h, mask] = key;
        const Agent& hos = inst.hospitals[h];
        const int size = std::popcount(mask);
        if (size == 0 || size > cap || size > hos.quota) continue;
        const auto members = bits(mask);
        bool ok = true;
        for (std::size_t i = 0; i < members.size() && ok; ++i) ok = entry.doctor[i] > rep.doctor[members[i]] + eps;
        if (!ok) continue;
        if (!hos.passive && rep.hospital[h] && !(entry.hospital > *rep.hospital[h] + eps)) continue;
        BlockingCoalition w;
        w.members = mask;
        w.hospital = h;
        w.doctor = entry.doctor;
        if (!hos.passive) w.hospital_value = entry.hospital;
        w.method = CheckMethod::TableScan;
        return w;
    }
    return std::nullopt;
}

}  // namespace

std::optional<BlockingCoalition> find_blocking_coalition(const Instance& inst, const Allocation& alloc,
                                                         const Rational& eps, const CoalitionOptions& copt,
                                                         const StabilityOptions& opt) {
    const std::size_t nd = inst.doctors.size();
    if (nd > 20) throw CapExceeded("coalition scan supports at most 20 doctors");
    if (inst.kind == ModelKind::General) return general_coalition(inst, alloc, eps, copt.max_size);
    if (inst.kind != ModelKind::AdditiveSeparable)
        throw InputError("UnsupportedModel", "coalition scan needs an additive separable or general instance");

    const PayoffReport rep = evaluate_payoffs(inst, alloc);
    for (std::size_t hh = 0; hh < inst.hospitals.size(); ++hh) {
        const int h = static_cast<int>(hh);
        const int q = inst.hospitals[h].quota;
        const Rational base = hospital_baseline(inst, h, opt);
        const auto seated = alloc.members(h);
        // Current hospital value with empty seats valued at the baseline.
        Rational total = base * Rational(q - static_cast<int>(seated.size()));
        bool above_base = true;
        for (int m : seated) {
            total += rep.seat.at({m, h});
            above_base = above_base && rep.seat.at({m, h}) >= base;
        }
        // s[d] = sup{g : f > f_d + eps}; nullopt when no profile improves d.
        std::vector<std::optional<Rational>> sup(nd);
        Coalition usable = 0, blockers = 0;
        for (std::size_t dd = 0; dd < nd; ++dd) {
            const BimatrixGame* g = inst.game(static_cast<int>(dd), h);
            if (!g) continue;
            const Rational a = rep.doctor[dd] + eps;
            if (!(max_doctor(*g) > a)) continue;
            PairOption o = best_for_partner(*g, a);
            if (!o.feasible) continue;
            sup[dd] = o.g;
            usable |= Coalition(1) << dd;
        }
        if (copt.prune && above_base) {
            for (std::size_t dd = 0; dd < nd; ++dd) {
                if (!(usable >> dd & 1)) continue;
                // Pair (d, h) against the weakest seat (or a free seat).
                const BimatrixGame* g = inst.game(static_cast<int>(dd), h);
                Rational ref = base;
                if (alloc.match[dd] == h)
                    ref = rep.seat.at({static_cast<int>(dd), h});
                else if (static_cast<int>(seated.size()) >= q) {
                    ref = rep.seat.at({seated[0], h});
                    for (int m : seated) ref = std::min<Rational>(ref, rep.seat.at({m, h}));
                }
                if (strict_improvement(*g, rep.doctor[dd] + eps, ref + eps, opt.grid).feasible)
                    blockers |= Coalition(1) << dd;
            }
        }
        const int cap = std::min(copt.max_size, q);
        for (Coalition mask = 1; mask < (Coalition(1) << nd); ++mask) {
            if ((mask & usable) != mask) continue;
            const int size = std::popcount(mask);
            if (size > cap) continue;
            if (copt.prune && above_base && !(mask & blockers)) continue;
            const auto members = bits(mask);
            Rational sum = base * Rational(q - size);
            for (int d : members) sum += *sup[d];
            if (!(sum > total + eps)) continue;
            // Witness: tighten every doctor's gain to delta > 0 until the sum stays strict.
            Rational delta = -1;
            for (int d : members) {
                Rational room = (max_doctor(*inst.game(d, h)) - rep.doctor[d] - eps) / 2;
                if (delta < 0 || room < delta) delta = room;
            }
            for (int iter = 0; iter < 256; ++iter, delta /= 2) {
                BlockingCoalition w;
                w.members = mask;
                w.hospital = h;
                Rational value = base * Rational(q - size);
                bool ok = true;
                for (int d : members) {
                    const BimatrixGame& g = *inst.game(d, h);
                    PairOption o = best_for_partner(g, rep.doctor[d] + eps + delta);
                    if (!o.feasible) {
                        ok = false;
                        break;
                    }
                    auto [f, v] = profile_payoffs(g, o.profile);
                    ok = ok && f > rep.doctor[d] + eps;
                    w.profiles.push_back(o.profile);
                    w.doctor.push_back(f);
                    value += v;
                    if (g.cls == GameClass::General) w.method = CheckMethod::GridApprox;
                    else if (g.cls == GameClass::Repeated && w.method != CheckMethod::GridApprox)
                        w.method = CheckMethod::ExactLP;
                }
                if (ok && value > total + eps) {
                    w.hospital_value = value;
                    return w;
                }
            }
            // Limit is strict but no witness was replayed (grid classes): skip.
        }
    }
    return std::nullopt;
}

std::vector<Allocation> enumerate_core(const Instance& inst, const Rational& eps, std::size_t max_doctors) {
    if (inst.kind != ModelKind::General) throw InputError("UnsupportedModel", "enumerate_core needs a general instance");
    const std::size_t nd = inst.doctors.size(), nh = inst.hospitals.size();
    if (nd > max_doctors) throw CapExceeded("enumerate_core supports at most " + std::to_string(max_doctors) + " doctors");
    std::vector<Allocation> out;
    Allocation cur = empty_allocation(inst);
    CoalitionOptions copt;
    copt.max_size = static_cast<int>(nd);
    auto rec = [&](auto&& self, std::size_t d) -> void {
        if (d == nd) {
            for (std::size_t h = 0; h < nh; ++h) {
                Coalition mask = 0;
                for (std::size_t i = 0; i < nd; ++i)
                    if (cur.match[i] == static_cast<int>(h)) mask |= Coalition(1) << i;
                if (mask && !coalition_entry(inst, static_cast<int>(h), mask)) return;
            }
            if (find_ir_violation(inst, cur, eps)) return;
            if (find_blocking_coalition(inst, cur, eps, copt)) return;
            out.push_back(cur);
            return;
        }
        for (int h = -1; h < static_cast<int>(nh); ++h) {
            if (h >= 0) {
                int used = 0;
                for (std::size_t i = 0; i < d; ++i) used += cur.match[i] == h;
                if (used >= inst.hospitals[h].quota) continue;
            }
            cur.match[d] = h;
            self(self, d + 1);
        }
        cur.match[d] = -1;
    };
    rec(rec, 0);
    return out;
}

RenegotiationVerdict verify_renegotiation_proof(const Instance& inst, const Allocation& alloc, const Rational& eps,
                                                const std::optional<Rational>& baseline) {
    if (inst.kind != ModelKind::AdditiveSeparable)
        throw InputError("UnsupportedModel", "renegotiation check needs an additive separable instance");
    RenegotiationVerdict v;
    using F = RenegotiationVerdict::Failure;
    for (std::size_t dd = 0; dd < alloc.match.size(); ++dd) {
        const int d = static_cast<int>(dd), h = alloc.match[dd];
        if (h < 0) continue;
        const BimatrixGame& g = *inst.game(d, h);
        if (g.cls == GameClass::General)
            throw InputError("UnsupportedClass", "renegotiation check has no exact method for general games");
        const ReservationPair r = reservation_payoffs(inst, alloc, d, h, eps, baseline);
        const Profile& p = alloc.profiles.at({d, h});
        auto [f, gv] = profile_payoffs(g, p);
        auto fail = [&](F why, const Rational& res, const Rational& dev) {
            v.holds = false;
            v.doctor = d;
            v.hospital = h;
            v.failure = why;
            v.reservation = res;
            v.deviation_value = dev;
            return v;
        };
        if (f + eps < r.doctor) return fail(F::DoctorInfeasible, r.doctor, f);
        if (gv + eps < r.hospital) return fail(F::HospitalInfeasible, r.hospital, gv);
        Deviation dv = doctor_deviation(g, p, r.hospital, eps);
        if (dv.profitable) return fail(F::DoctorDeviation, r.hospital, dv.value);
        Deviation hv = hospital_deviation(g, p, r.doctor, eps);
        if (hv.profitable) return fail(F::HospitalDeviation, r.doctor, hv.value);
    }
    return v;
}

bool StabilityReport::passed() const {
    if (ir || pair || coalition) return false;
    return !renegotiation || renegotiation->holds;
}

StabilityReport verify_allocation(const Instance& inst, const Allocation& alloc, const Rational& eps,
                                  const VerifyOptions& vopt) {
    StabilityReport rep;
    rep.ir = find_ir_violation(inst, alloc, eps, vopt.stability);
    if (inst.kind != ModelKind::General) {
        rep.pair = find_blocking_pair(inst, alloc, eps, vopt.stability);
        for (const auto& [key, g] : inst.games) {
            CheckMethod m = method_for(g.cls);
            if (static_cast<int>(m) > static_cast<int>(rep.pair_method)) rep.pair_method = m;
        }
    } else {
        rep.pair_method = CheckMethod::TableScan;
        rep.notes.push_back("general model: stability is checked through the coalition tables");
    }
    if (vopt.coalitions > 0 && inst.kind != ModelKind::Roommates) {
        CoalitionOptions copt;
        copt.max_size = vopt.coalitions;
        rep.coalitions_checked = true;
        rep.coalition_cap = vopt.coalitions;
        rep.coalition = find_blocking_coalition(inst, alloc, eps, copt, vopt.stability);
    }
    if (vopt.renegotiation && inst.kind == ModelKind::AdditiveSeparable) {
        rep.renegotiation_checked = true;
        rep.renegotiation = verify_renegotiation_proof(inst, alloc, eps, vopt.stability.baseline);
    }
    if (rep.pair_method == CheckMethod::GridApprox)
        rep.notes.push_back("general-class pairs use a grid search with mesh 1/" + std::to_string(vopt.stability.grid) +
                            "; a clean result is not a proof");
    return rep;
}

namespace {

json profile_json(const Profile& p) {
    json j;
    if (p.cycle) {
        j["cycle"] = json::array();
        for (auto [s, t] : p.cycle->cycle) j["cycle"].push_back({s, t});
        if (!p.cycle->repeats.empty()) j["repeats"] = p.cycle->repeats;
    } else {
        j["x"] = to_json(p.x);
        j["y"] = to_json(p.y);
    }
    return j;
}

}  // namespace

json report_to_json(const Instance& inst, const StabilityReport& rep) {
    json j;
    j["passed"] = rep.passed();
    if (rep.ir) {
        const auto& v = *rep.ir;
        j["individually_rational"] = {{"holds", false},
                                      {"agent", v.is_doctor ? inst.doctors[v.agent].id : inst.hospitals[v.agent].id},
                                      {"side", v.is_doctor ? "doctor" : "hospital"},
                                      {"irp", to_json(v.irp)}};
        if (v.seat >= 0) j["individually_rational"]["seat"] = inst.doctors[v.seat].id;
        if (v.quota_exceeded)
            j["individually_rational"]["payoff"] = "-inf";
        else
            j["individually_rational"]["payoff"] = to_json(v.payoff);
    } else {
        j["individually_rational"] = {{"holds", true}};
    }
    json bp = {{"method", to_string(rep.pair_method)}};
    if (rep.pair) {
        const auto& w = *rep.pair;
        bp["holds"] = false;
        bp["doctor"] = inst.doctors[w.doctor].id;
        bp["partner"] = inst.kind == ModelKind::Roommates ? inst.doctors[w.partner].id : inst.hospitals[w.partner].id;
        if (w.displaced >= 0) bp["displaced"] = inst.doctors[w.displaced].id;
        bp["profile"] = profile_json(w.profile);
        bp["f"] = to_json(w.f);
        bp["g"] = to_json(w.g);
        bp["f_before"] = to_json(w.f_before);
        bp["g_reference"] = to_json(w.g_before);
        bp["method"] = to_string(w.method);
        if (w.mesh) bp["mesh"] = "1/" + std::to_string(w.mesh);
    } else {
        bp["holds"] = true;
    }
    j["pairwise_stable"] = bp;
    if (rep.coalitions_checked) {
        json c = {{"cap", rep.coalition_cap}};
        if (rep.coalition) {
            const auto& w = *rep.coalition;
            c["holds"] = false;
            c["hospital"] = inst.hospitals[w.hospital].id;
            c["members"] = json::array();
            for (int d : bits(w.members)) c["members"].push_back(inst.doctors[d].id);
            c["doctor_payoffs"] = to_json(w.doctor);
            if (w.hospital_value) c["hospital_value"] = to_json(*w.hospital_value);
            c["profiles"] = json::array();
            for (const auto& p : w.profiles) c["profiles"].push_back(profile_json(p));
            c["method"] = to_string(w.method);
        } else {
            c["holds"] = true;
        }
        j["core"] = c;
    }
    if (rep.renegotiation_checked) {
        const auto& v = *rep.renegotiation;
        json r = {{"holds", v.holds}};
        if (!v.holds) {
            r["doctor"] = inst.doctors[v.doctor].id;
            r["hospital"] = inst.hospitals[v.hospital].id;
            r["failure"] = to_string(v.failure);
            r["reservation"] = to_json(v.reservation);
            r["value"] = to_json(v.deviation_value);
        }
        j["renegotiation_proof"] = r;
    }
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    return j;
}

}  // namespace mg

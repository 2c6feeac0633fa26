#include "mg/dac.hpp"

#include <sstream>

#include "mg/pair_game.hpp"
#include "mg/payoffs.hpp"

namespace mg {

bool DacState::full(int h) const {
    return static_cast<int>(alloc.members(h).size()) >= inst->hospitals[h].quota;
}

int DacState::weakest(int h) const {
    int best = -1;
    for (int d : alloc.members(h))
        if (best < 0 || seat.at({d, h}) < seat.at({best, h})) best = d;
    return best;
}

Rational DacState::level(int h) const {
    if (!full(h)) return baseline[h];
    return seat.at({weakest(h), h});
}

Rational DacState::threshold(int h) const { return level(h) + epsilon; }

namespace {

void check_classes(const Instance& inst) {
    if (inst.kind != ModelKind::AdditiveSeparable)
        throw InputError("UnsupportedModel", "DAC runs on additive separable instances");
    for (const auto& [key, g] : inst.games)
        if (g.cls == GameClass::General)
            throw InputError("UnsupportedClass", "game (" + inst.doctors[key.first].id + "," +
                                                     inst.hospitals[key.second].id + ") has class general");
}

void seat_doctor(DacState& st, int d, int h, const Profile& p) {
    const BimatrixGame& g = *st.inst->game(d, h);
    auto [f, v] = profile_payoffs(g, p);
    st.alloc.match[d] = h;
    st.alloc.profiles[{d, h}] = p;
    st.seat[{d, h}] = v;
    st.payoff[{d, h}] = f;
}

void unseat_doctor(DacState& st, int d) {
    int h = st.alloc.match[d];
    st.alloc.match[d] = -1;
    st.alloc.profiles.erase({d, h});
    st.seat.erase({d, h});
    st.payoff.erase({d, h});
}

// Best option of d over hospitals other than `skip` (and the unmatched
// option); returns the doctor value.
Proposal best_option(const DacState& st, int d, int skip) {
    Proposal best;
    best.hospital = -1;
    best.doctor_value = st.inst->doctors[d].irp;
    bool have_hospital = false;
    for (std::size_t hh = 0; hh < st.inst->hospitals.size(); ++hh) {
        int h = static_cast<int>(hh);
        if (h == skip || st.alloc.match[d] == h) continue;
        const BimatrixGame* g = st.inst->game(d, h);
        if (!g) continue;
        PairOption o = best_for_doctor(*g, st.threshold(h));
        if (!o.feasible) continue;
        // Matching is preferred to the unmatched option on ties; among
        // hospitals the lowest index wins ties.
        if ((!have_hospital && o.f >= best.doctor_value) || (have_hospital && o.f > best.doctor_value)) {
            have_hospital = true;
            best.hospital = h;
            best.displaced = st.full(h) ? st.weakest(h) : -1;
            best.profile = o.profile;
            best.doctor_value = o.f;
            best.hospital_value = o.g;
        }
    }
    return best;
}

}  // namespace

Rational dac_g_max(const Instance& inst, const std::vector<Rational>& baseline) {
    bool any = false;
    Rational gmax = 0;
    for (const auto& [key, g] : inst.games) {
        Rational v = max_entry(g.M) - baseline[key.second];
        if (!any || v > gmax) gmax = v;
        any = true;
    }
    return gmax;
}

DacState initial_state(const Instance& inst, const DacOptions& opt) {
    DacState st;
    st.inst = &inst;
    st.epsilon = opt.epsilon;
    for (const auto& h : inst.hospitals) st.baseline.push_back(opt.baseline ? *opt.baseline : h.irp);
    st.alloc = empty_allocation(inst);
    for (std::size_t d = 0; d < inst.doctors.size(); ++d) st.unmatched.insert(static_cast<int>(d));
    return st;
}

Proposal optimal_proposal(const DacState& state, int d) { return best_option(state, d, -1); }

Bid competition_bid(const DacState& state, int d, int h) {
    Bid b;
    b.reservation = best_option(state, d, h).doctor_value;
    PairOption o = best_for_partner(*state.inst->game(d, h), b.reservation);
    if (o.feasible) b.bid = o.g;
    return b;
}

void settle_competition(DacState& state, int winner, const std::optional<Rational>& loser_bid, int h) {
    Rational floor = loser_bid ? *loser_bid : state.level(h);
    PairOption o = best_for_doctor(*state.inst->game(winner, h), floor);
    if (!o.feasible) throw std::logic_error("final bid infeasible");
    if (state.alloc.match[winner] == h) unseat_doctor(state, winner);
    seat_doctor(state, winner, h, o.profile);
    state.unmatched.erase(winner);
}

DacResult run_dac(const Instance& inst, const DacOptions& opt) {
    if (opt.epsilon <= 0) throw EpsilonNotPositive();
    check_classes(inst);
    DacState st = initial_state(inst, opt);
    DacResult res;
    DacTrace& tr = res.trace;
    tr.baseline = st.baseline;
    tr.g_max = dac_g_max(inst, st.baseline);
    tr.bound = tr.g_max / opt.epsilon;
    tr.levels.resize(inst.hospitals.size());
    auto record_levels = [&] {
        for (std::size_t h = 0; h < inst.hospitals.size(); ++h) {
            Rational l = st.level(static_cast<int>(h));
            if (tr.levels[h].empty() || tr.levels[h].back() != l) tr.levels[h].push_back(l);
        }
    };
    record_levels();

    while (!st.unmatched.empty()) {
        if (++tr.iterations > opt.max_iterations) throw std::runtime_error("DAC exceeded the iteration cap");
        const int d = *st.unmatched.begin();
        Proposal p = optimal_proposal(st, d);
        if (p.hospital < 0) {
            st.unmatched.erase(d);
            tr.events.push_back({DacEvent::Unmatched, d, -1, -1, -1, p.doctor_value, Rational(0)});
            continue;
        }
        const int h = p.hospital;
        if (p.displaced < 0) {
            seat_doctor(st, d, h, p.profile);
            st.unmatched.erase(d);
            tr.events.push_back({DacEvent::Accepted, d, h, -1, d, p.doctor_value, p.hospital_value});
            record_levels();
            continue;
        }
        ++tr.competitions;
        const int rival = p.displaced;
        Bid mine = competition_bid(st, d, h);
        Bid theirs = competition_bid(st, rival, h);
        // Incumbent keeps the seat on ties or when the proposer cannot bid.
        bool proposer_wins = mine.bid && (!theirs.bid || *mine.bid > *theirs.bid);
        if (proposer_wins) {
            unseat_doctor(st, rival);
            st.unmatched.insert(rival);
            settle_competition(st, d, theirs.bid, h);
        } else {
            settle_competition(st, rival, mine.bid, h);
        }
        const int w = proposer_wins ? d : rival;
        tr.events.push_back({DacEvent::Competition, d, h, rival, w, st.payoff.at({w, h}), st.seat.at({w, h})});
        record_levels();
    }
    res.allocation = st.alloc;
    return res;
}

std::string format_trace(const Instance& inst, const DacTrace& trace) {
    std::ostringstream out;
    auto did = [&](int d) { return d < 0 ? std::string("-") : inst.doctors[d].id; };
    auto hid = [&](int h) { return h < 0 ? std::string("-") : inst.hospitals[h].id; };
    for (std::size_t h = 0; h < inst.hospitals.size(); ++h)
        out << "baseline " << hid(static_cast<int>(h)) << " " << trace.baseline[h] << "\n";
    for (const auto& e : trace.events) {
        switch (e.kind) {
            case DacEvent::Unmatched:
                out << "unmatched " << did(e.doctor) << " f=" << e.doctor_value << "\n";
                break;
            case DacEvent::Accepted:
                out << "accept " << did(e.doctor) << " -> " << hid(e.hospital) << " f=" << e.doctor_value
                    << " g=" << e.hospital_value << "\n";
                break;
            case DacEvent::Competition:
                out << "competition " << did(e.doctor) << " vs " << did(e.rival) << " at " << hid(e.hospital)
                    << " winner=" << did(e.winner) << " f=" << e.doctor_value << " g=" << e.hospital_value << "\n";
                break;
        }
    }
    out << "iterations " << trace.iterations << " competitions " << trace.competitions << " bound " << trace.bound
        << "\n";
    return out.str();
}

}  // namespace mg

#include "mg/payoffs.hpp"

#include "mg/qcqp.hpp"

namespace mg {

std::pair<Rational, Rational> profile_payoffs(const BimatrixGame& g, const Profile& p) {
    if (p.cycle) return {cycle_average(*p.cycle, g.A), cycle_average(*p.cycle, g.M)};
    if (p.x.size() != g.rows() || p.y.size() != g.cols())
        throw InputError("DimensionMismatch", "strategy vector length differs from the game's strategy count");
    if (!is_distribution(p.x) || !is_distribution(p.y))
        throw InputError("NotADistribution", "strategy vector does not sum to 1 or has entries outside [0,1]");
    return {bilinear(p.x, g.A, p.y), bilinear(p.x, g.M, p.y)};
}

std::pair<int, int> pair_key(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

Rational roommate_payoff(const Instance& inst, const Allocation& alloc, int d) {
    int p = alloc.match[d];
    if (p < 0) return inst.doctors[d].irp;
    auto key = pair_key(d, p);
    const BimatrixGame* g = inst.game(key.first, key.second);
    auto it = alloc.profiles.find(key);
    if (!g || it == alloc.profiles.end())
        throw InputError("MissingProfile", "no game or profile for pair " + inst.doctors[key.first].id + "," +
                                               inst.doctors[key.second].id);
    auto [f1, f2] = profile_payoffs(*g, it->second);
    return d == key.first ? f1 : f2;
}

const CoalitionPayoff* coalition_entry(const Instance& inst, int h, Coalition members) {
    auto it = inst.coalitions.find({h, members});
    return it == inst.coalitions.end() ? nullptr : &it->second;
}

PayoffReport evaluate_payoffs(const Instance& inst, const Allocation& alloc) {
    PayoffReport rep;
    const std::size_t nd = inst.doctors.size();
    rep.doctor.resize(nd);
    if (inst.kind == ModelKind::Roommates) {
        for (std::size_t d = 0; d < nd; ++d) rep.doctor[d] = roommate_payoff(inst, alloc, static_cast<int>(d));
        return rep;
    }
    rep.hospital.resize(inst.hospitals.size());
    for (std::size_t d = 0; d < nd; ++d)
        if (alloc.match[d] < 0) rep.doctor[d] = inst.doctors[d].irp;

    for (std::size_t h = 0; h < inst.hospitals.size(); ++h) {
        const auto members = alloc.members(static_cast<int>(h));
        const Agent& hos = inst.hospitals[h];
        if (members.empty()) {
            rep.hospital[h] = hos.irp;
            continue;
        }
        if (inst.kind == ModelKind::General) {
            Coalition mask = 0;
            for (int d : members) mask |= Coalition(1) << d;
            const CoalitionPayoff* e = coalition_entry(inst, static_cast<int>(h), mask);
            if (!e) throw InputError("MissingCoalition", "no payoff table entry for the coalition at " + hos.id);
            for (std::size_t i = 0; i < members.size(); ++i) rep.doctor[members[i]] = e->doctor[i];
            if (static_cast<int>(members.size()) <= hos.quota)
                rep.hospital[h] = e->hospital;
            else
                rep.hospital[h] = std::nullopt;
            continue;
        }
        Rational total = 0;
        for (int d : members) {
            const BimatrixGame* g = inst.game(d, static_cast<int>(h));
            auto it = alloc.profiles.find({d, static_cast<int>(h)});
            if (!g || it == alloc.profiles.end())
                throw InputError("MissingProfile", "no game or profile for " + inst.doctors[d].id + "," + hos.id);
            auto [f, seat] = profile_payoffs(*g, it->second);
            rep.doctor[d] = f;
            rep.seat[{d, static_cast<int>(h)}] = seat;
            total += seat;
        }
        if (static_cast<int>(members.size()) <= hos.quota)
            rep.hospital[h] = total;
        else
            rep.hospital[h] = std::nullopt;
    }
    return rep;
}

}  // namespace mg

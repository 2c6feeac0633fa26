#include "mg/fixtures.hpp"

namespace mg {

namespace {

std::vector<std::string> names(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

Agent agent(std::string id, Rational irp, int strategies, int quota = 1) {
    Agent a;
    a.id = std::move(id);
    a.irp = std::move(irp);
    a.strategies = names(strategies);
    a.quota = quota;
    return a;
}

std::vector<int> members_of(Coalition c) {
    std::vector<int> out;
    for (int d = 0; c; ++d, c >>= 1)
        if (c & 1) out.push_back(d);
    return out;
}

}  // namespace

Instance multi_auction_instance() {
    Instance inst;
    inst.kind = ModelKind::AdditiveSeparable;
    for (const char* s : {"a", "b", "c", "d"}) inst.doctors.push_back(agent(s, 0, 1));
    inst.hospitals.push_back(agent("alpha", 0, 11, 4));
    inst.hospitals.push_back(agent("beta", 0, 11, 4));
    const long value[2][4] = {{10, 10, 2, 2}, {2, 2, 10, 10}};
    for (int d = 0; d < 4; ++d)
        for (int h = 0; h < 2; ++h) {
            BimatrixGame g;
            g.cls = GameClass::StrictlyCompetitive;
            g.A.assign(1, Vec(11));
            g.M.assign(1, Vec(11));
            for (long p = 0; p <= 10; ++p) {
                g.A[0][p] = p - 1;
                g.M[0][p] = value[h][d] - p;
            }
            inst.games[{d, h}] = std::move(g);
        }
    return inst;
}

BimatrixGame prisoners_dilemma() {
    BimatrixGame g;
    g.cls = GameClass::Repeated;
    g.A = {{2, -1}, {3, 0}};
    g.M = {{2, 3}, {-1, 0}};
    return g;
}

Instance segregation_instance(int n) {
    Instance inst;
    inst.kind = ModelKind::General;
    const int nd = 2 * n;
    for (int d = 0; d < nd; ++d) inst.doctors.push_back(agent(std::to_string(d + 1), -100, 0));
    inst.hospitals.push_back(agent("h1", 0, 0, n));
    inst.hospitals.push_back(agent("h2", 0, 0, n));
    const long prestige[2] = {2, 1};
    for (Coalition c = 1; c < (Coalition(1) << nd); ++c) {
        auto ms = members_of(c);
        if (static_cast<int>(ms.size()) > n) continue;
        long ranks = 0;
        for (int d : ms) ranks += nd - d;  // doctor 1 has the top rank
        for (int h = 0; h < 2; ++h) {
            CoalitionPayoff p;
            p.doctor.assign(ms.size(), Rational(prestige[h] + ranks));
            p.hospital = ranks;
            inst.coalitions[{h, c}] = std::move(p);
        }
    }
    return inst;
}

Instance hedonic_instance() {
    Instance inst;
    inst.kind = ModelKind::General;
    for (const char* s : {"1", "2", "3"}) inst.doctors.push_back(agent(s, -10, 0));
    for (const char* s : {"a", "b"}) {
        Agent h = agent(s, 0, 0, 3);
        h.passive = true;
        inst.hospitals.push_back(std::move(h));
    }
    // Per coalition mask: payoffs of the members in ascending order.
    const std::map<Coalition, std::vector<long>> table = {
        {0b001, {0}},     {0b010, {0}},     {0b100, {0}},         {0b011, {1, 1}},
        {0b101, {-2, 1}}, {0b110, {-2, 2}}, {0b111, {-1, -1, 3}},
    };
    for (int h = 0; h < 2; ++h)
        for (const auto& [c, vals] : table) {
            CoalitionPayoff p;
            for (long v : vals) p.doctor.emplace_back(v);
            p.hospital = 0;
            inst.coalitions[{h, c}] = std::move(p);
        }
    return inst;
}

Instance roommates_table_instance(const std::vector<std::vector<long>>& v, int hospitals) {
    Instance inst;
    inst.kind = ModelKind::General;
    const int nd = static_cast<int>(v.size());
    for (int d = 0; d < nd; ++d) inst.doctors.push_back(agent(std::to_string(d + 1), 0, 0));
    for (int h = 0; h < hospitals; ++h) {
        Agent a = agent("h" + std::to_string(h + 1), 0, 0, 3);
        a.passive = true;
        inst.hospitals.push_back(std::move(a));
    }
    long penalty = 1;
    for (const auto& row : v)
        for (long x : row) penalty += x < 0 ? -x : x;
    for (Coalition c = 1; c < (Coalition(1) << nd); ++c) {
        auto ms = members_of(c);
        if (ms.size() > 3) continue;
        CoalitionPayoff p;
        for (int d : ms) {
            if (ms.size() == 1)
                p.doctor.emplace_back(0);
            else if (ms.size() == 2)
                p.doctor.emplace_back(v[d][d == ms[0] ? ms[1] : ms[0]]);
            else
                p.doctor.emplace_back(-penalty);
        }
        p.hospital = 0;
        for (int h = 0; h < hospitals; ++h) inst.coalitions[{h, c}] = p;
    }
    return inst;
}

}  // namespace mg

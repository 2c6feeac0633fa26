// Small helpers for assembling instances in tests.
#pragma once

#include "mg/types.hpp"

namespace build {

using mg::BimatrixGame;
using mg::GameClass;
using mg::Matrix;
using mg::Rational;

inline BimatrixGame zero_sum(Matrix a) {
    BimatrixGame g;
    g.cls = GameClass::ZeroSum;
    g.M = mg::negate(a);
    g.A = std::move(a);
    return g;
}

inline BimatrixGame game(GameClass cls, Matrix a, Matrix m) {
    BimatrixGame g;
    g.cls = cls;
    g.A = std::move(a);
    g.M = std::move(m);
    return g;
}

inline mg::Agent agent(const std::string& id, Rational irp, std::size_t strategies, int quota = 1) {
    mg::Agent a;
    a.id = id;
    a.irp = std::move(irp);
    for (std::size_t i = 0; i < strategies; ++i) a.strategies.push_back(std::to_string(i));
    a.quota = quota;
    return a;
}

// Additive separable instance; strategy counts are read off the games.
struct Market {
    mg::Instance inst;

    Market() { inst.kind = mg::ModelKind::AdditiveSeparable; }
    Market& doctor(const std::string& id, Rational irp) {
        inst.doctors.push_back(agent(id, std::move(irp), 0));
        return *this;
    }
    Market& hospital(const std::string& id, Rational irp, int quota) {
        inst.hospitals.push_back(agent(id, std::move(irp), 0, quota));
        return *this;
    }
    Market& pair(int d, int h, BimatrixGame g) {
        resize(inst.doctors[d], g.rows());
        resize(inst.hospitals[h], g.cols());
        inst.games[{d, h}] = std::move(g);
        return *this;
    }

private:
    static void resize(mg::Agent& a, std::size_t n) {
        a.strategies.clear();
        for (std::size_t i = 0; i < n; ++i) a.strategies.push_back(std::to_string(i));
    }
};

}  // namespace build

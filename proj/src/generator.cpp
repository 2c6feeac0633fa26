#include "mg/generator.hpp"

namespace mg {

long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

Rational random_rational(Rng& rng, int bound, int den) {
    return frac(uniform(rng, -static_cast<long>(bound) * den, static_cast<long>(bound) * den), den);
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, int bound, int den) {
    Matrix m(rows, Vec(cols));
    for (auto& row : m)
        for (auto& v : row) v = random_rational(rng, bound, den);
    return m;
}

BimatrixGame random_game(Rng& rng, GameClass cls, std::size_t rows, std::size_t cols, int bound, int den) {
    BimatrixGame g;
    g.cls = cls;
    switch (cls) {
        case GameClass::ZeroSum:
            g.A = random_matrix(rng, rows, cols, bound, den);
            g.M = negate(g.A);
            break;
        case GameClass::StrictlyCompetitive: {
            Matrix z = random_matrix(rng, rows, cols, bound, den);
            Rational ratio = frac(uniform(rng, 1, 4), 4);
            Rational shift = random_rational(rng, bound / 2, den);
            Matrix scaled = z;
            for (auto& row : scaled)
                for (auto& v : row) v = ratio * v + shift;
            // Rescale either side so both transform directions occur.
            if (uniform(rng, 0, 1) == 0) {
                g.A = z;
                g.M = negate(scaled);
            } else {
                g.A = scaled;
                g.M = negate(z);
            }
            break;
        }
        case GameClass::Repeated:
        case GameClass::General:
            g.A = random_matrix(rng, rows, cols, bound, den);
            g.M = random_matrix(rng, rows, cols, bound, den);
            break;
    }
    return g;
}

namespace {

std::vector<std::string> strategy_names(long n) {
    std::vector<std::string> out;
    for (long i = 0; i < n; ++i) out.push_back("s" + std::to_string(i + 1));
    return out;
}

}  // namespace

Instance generate_instance(const GenConfig& cfg) {
    Rng rng(cfg.seed);
    Instance inst;
    inst.kind = cfg.kind;
    const int half = std::max(1, cfg.entry_bound / 2);
    for (int d = 0; d < cfg.doctors; ++d) {
        Agent a;
        a.id = "d" + std::to_string(d + 1);
        a.irp = frac(uniform(rng, -2L * half * cfg.denominator, 0), cfg.denominator);
        a.strategies = strategy_names(uniform(rng, 1, cfg.max_strategies));
        inst.doctors.push_back(std::move(a));
    }
    if (cfg.kind == ModelKind::Roommates) {
        for (int a = 0; a < cfg.doctors; ++a)
            for (int b = a + 1; b < cfg.doctors; ++b)
                inst.games[{a, b}] = random_game(rng, cfg.cls, inst.doctors[a].strategies.size(),
                                                 inst.doctors[b].strategies.size(), cfg.entry_bound, cfg.denominator);
        return inst;
    }
    for (int h = 0; h < cfg.hospitals; ++h) {
        Agent a;
        a.id = "h" + std::to_string(h + 1);
        a.irp = 0;
        a.quota = static_cast<int>(uniform(rng, 1, cfg.max_quota));
        a.strategies = strategy_names(uniform(rng, 1, cfg.max_strategies));
        inst.hospitals.push_back(std::move(a));
    }
    for (int d = 0; d < cfg.doctors; ++d)
        for (int h = 0; h < cfg.hospitals; ++h)
            inst.games[{d, h}] = random_game(rng, cfg.cls, inst.doctors[d].strategies.size(),
                                             inst.hospitals[h].strategies.size(), cfg.entry_bound, cfg.denominator);
    return inst;
}

}  // namespace mg

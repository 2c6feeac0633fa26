#pragma once

#include <cstdint>
#include <random>

#include "mg/types.hpp"

namespace mg {

struct GenConfig {
    GameClass cls = GameClass::ZeroSum;
    ModelKind kind = ModelKind::AdditiveSeparable;  // or Roommates
    int doctors = 4;
    int hospitals = 2;
    int max_quota = 2;
    int max_strategies = 3;  // per agent, at least 1
    int entry_bound = 10;    // entries in [-bound, bound]
    int denominator = 1;     // entries are multiples of 1/denominator
    std::uint64_t seed = 7;
};

using Rng = std::mt19937_64;

// Uniform integer in [lo, hi].
long uniform(Rng& rng, long lo, long hi);
Rational random_rational(Rng& rng, int bound, int den);
Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, int bound, int den);

// Random pair game of the requested class. Strictly competitive games are a
// zero-sum core rescaled by a ratio <= 1 plus a shift on one side.
BimatrixGame random_game(Rng& rng, GameClass cls, std::size_t rows, std::size_t cols, int bound, int den);

Instance generate_instance(const GenConfig& cfg);

}  // namespace mg

#pragma once

#include <optional>
#include <vector>

#include "mg/rational.hpp"

namespace mg {

enum class Relation { Le, Eq, Ge };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpConstraint {
    Vec row;
    Relation rel;
    Rational rhs;
};

// Bounds default to [0, +inf) when `lower`/`upper` are left empty. A nullopt
// entry means the side is unbounded.
struct LinearProgram {
    Vec objective;
    bool maximize = true;
    std::vector<LpConstraint> constraints;
    std::vector<std::optional<Rational>> lower;
    std::vector<std::optional<Rational>> upper;

    std::size_t num_vars() const { return objective.size(); }
    void add(Vec row, Relation rel, Rational rhs) { constraints.push_back({std::move(row), rel, std::move(rhs)}); }
};

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rational value;
    Vec x;
    long pivots = 0;
};

// Two-phase dense simplex over exact rationals, Bland's rule.
LpResult solve_lp(const LinearProgram& lp);

// Exact feasibility check of x against every constraint and bound of lp.
bool satisfies(const LinearProgram& lp, const Vec& x);

struct GameValue {
    Rational value;
    Vec x;  // maximin strategy of the row player
    Vec y;  // minimax strategy of the column player
};

GameValue game_value(const Matrix& a);

}  // namespace mg

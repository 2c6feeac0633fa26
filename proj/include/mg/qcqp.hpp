#pragma once

#include <string>

#include "mg/rational.hpp"
#include "mg/types.hpp"

namespace mg {

struct QcqpSolution {
    bool feasible = false;
    Vec x;
    Vec y;
    Rational value;
    Rational hospital_value;  // xMy for the repeated/grid variants, -xAy for zero-sum
    std::size_t support_x = 0;
    std::size_t support_y = 0;
    bool approximate = false;
};

std::size_t support_size(const Vec& w);

// max xAy  s.t.  xAy <= c.  Value is min(c, max A); infeasible when c < min A.
// One side is pure, the other mixes at most two pure strategies.
QcqpSolution solve_qcqp_zero_sum(const Matrix& a, const Rational& c);

struct JointDistribution {
    bool feasible = false;
    Matrix lambda;  // |S| x |T|
    Rational f;     // sum A lambda
    Rational g;     // sum M lambda
};

// max sum A(s,t) l(s,t)  s.t.  sum M(s,t) l(s,t) >= c,  l in the simplex over S x T.
// Among maximisers the one with the largest hospital value is returned.
JointDistribution solve_qcqp_repeated(const Matrix& a, const Matrix& m, const Rational& c);

// Joint distribution reaching exactly (f, g), if (f, g) lies in the hull.
JointDistribution realize_payoff_pair(const Matrix& a, const Matrix& m, const Rational& f, const Rational& g);

CycleStrategy distribution_to_cycle(const Matrix& lambda);
Rational cycle_average(const CycleStrategy& c, const Matrix& payoff);

// Relation between A and B := -M.  With doctor_rescaled, A = ratio * B + shift * U;
// otherwise B = ratio * A + shift * U.  ratio <= 1 always.
struct AffineTransform {
    Rational ratio = 1;
    Rational shift = 0;
    bool doctor_rescaled = true;
    bool constant = false;

    // Coefficients (lambda, mu) with A = lambda * B + mu * U.
    std::pair<Rational, Rational> a_from_b() const;
};

struct NotStrictlyCompetitive : std::runtime_error {
    std::size_t row, col;
    Rational a, b;
    NotStrictlyCompetitive(std::size_t r, std::size_t c, Rational av, Rational bv);
};

AffineTransform affine_transform(const Matrix& a, const Matrix& m);

// Exhaustive scan of grid-discretised simplices (resolution k per side).
// Floating point ranks candidates; the reported point is re-checked exactly.
QcqpSolution solve_qcqp_grid_oracle(const Matrix& a, const Matrix& m, const Rational& c, int k);

// All points of the simplex of dimension n with coordinates in (1/k) Z.
std::vector<Vec> simplex_grid(std::size_t n, int k);

}  // namespace mg

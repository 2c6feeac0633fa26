#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "mg/types.hpp"

namespace mg {

struct ReservationPair {
    Rational doctor;    // f_d^pi(eps)
    Rational hospital;  // g_h^pi(eps), per seat, hospital units
};

enum class CneCase { SaddleValue, DoctorBinding, HospitalBinding, UniformEquilibrium, PunishmentSupported };
const char* to_string(CneCase c);

struct CneResult {
    Profile profile;
    Rational f;
    Rational g;
    CneCase tag = CneCase::SaddleValue;
    // f + eps >= f_res and g + eps >= g_res. Fails for binding cases when the
    // slack exceeds eps.
    bool eps_feasible = true;
};

struct InfeasibleReservations : std::runtime_error {
    InfeasibleReservations() : std::runtime_error("InfeasibleReservations: no eps-feasible profile") {}
};

struct InputNotPairwiseStable : std::runtime_error {
    explicit InputNotPairwiseStable(const std::string& why)
        : std::runtime_error("InputNotPairwiseStable: " + why) {}
};

// Hospital-side value of an empty seat: `baseline` if given, else the IRP.
Rational seat_baseline(const Instance& inst, int h, const std::optional<Rational>& baseline);

ReservationPair reservation_payoffs(const Instance& inst, const Allocation& alloc, int d, int h, const Rational& eps,
                                    const std::optional<Rational>& baseline = std::nullopt);

// Best constrained unilateral deviation against `p`. For the doctor: max over
// w of f(w, y) subject to g(w, y) + eps >= g_res. Cycle profiles are handled
// through grim punishment (deviator held at its punishment level) or, without
// punishment, through periodic best responses along the cycle.
struct Deviation {
    bool exists = false;  // constraint set non-empty
    Rational value;       // best deviation payoff
    bool profitable = false;
};
Deviation doctor_deviation(const BimatrixGame& g, const Profile& p, const Rational& g_res, const Rational& eps);
Deviation hospital_deviation(const BimatrixGame& g, const Profile& p, const Rational& f_res, const Rational& eps);

// Feasible (f + eps >= f_res, g + eps >= g_res) and no profitable deviation.
bool is_eps_cne(const BimatrixGame& g, const Profile& p, const Rational& f_res, const Rational& g_res,
                const Rational& eps);

// Zero-sum CNE with value median{f_res - slack, w, -g_res + slack}; g_res is
// in hospital units and negated here. slack defaults to 2 eps.
CneResult compute_cne_zero_sum(const Matrix& a, const Rational& f_res, const Rational& g_res, const Rational& eps,
                               const std::optional<Rational>& slack = std::nullopt);

// Solved in the zero-sum image with transformed reservations.
CneResult compute_cne_strictly_competitive(const Matrix& a, const Matrix& m, const Rational& f_res,
                                           const Rational& g_res, const Rational& eps,
                                           const std::optional<Rational>& slack = std::nullopt);

struct PunishmentLevels {
    Rational alpha;  // min_y max_x xAy
    Rational beta;   // min_x max_y xMy
    Vec hospital_punishment;  // y attaining alpha
    Vec doctor_punishment;    // x attaining beta
};
PunishmentLevels punishment_levels(const Matrix& a, const Matrix& m);

CneResult compute_cne_repeated(const Matrix& a, const Matrix& m, const Rational& f_res, const Rational& g_res,
                               const Rational& eps);

// Class dispatch used by the renegotiation sweeps (slack = eps for zero-sum
// and strictly competitive pairs).
CneResult compute_cne(const BimatrixGame& g, const Rational& f_res, const Rational& g_res, const Rational& eps);

// GaussSeidel updates couples in place in (hospital, doctor) order. Jacobi
// recomputes every couple against the allocation at the start of the sweep;
// it can cycle between two allocations.
enum class SweepMode { Jacobi, GaussSeidel };

struct RenegotiationOptions {
    Rational epsilon;
    std::optional<Rational> baseline;
    SweepMode mode = SweepMode::GaussSeidel;
    int max_sweeps = 100000;
    bool check_each_sweep = true;  // pairwise stability after every sweep
};

struct RenegotiationResult {
    Allocation allocation;
    int sweeps = 0;           // including the final sweep without changes
    int changing_sweeps = 0;  // sweeps that changed at least one payoff pair
    bool stable_every_sweep = true;
    // Iteration bound computed on the input: zero-sum instances use
    // max(f^pi - w, w + g^pi) / eps, repeated ones max(alpha - f^pi, beta - g^pi) / eps.
    std::optional<Rational> bound;
};

RenegotiationResult run_renegotiation(const Instance& inst, const Allocation& alloc, const RenegotiationOptions& opt);

}  // namespace mg

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mg/types.hpp"

namespace mg {

enum class CheckMethod { ExactInterval, ExactLP, GridApprox, TableScan };
const char* to_string(CheckMethod m);

struct StabilityOptions {
    std::optional<Rational> baseline;  // empty-seat value, defaults to hospital IRP
    int grid = 8;                      // mesh 1/grid for general-class pairs
};

struct CapExceeded : std::runtime_error {
    explicit CapExceeded(const std::string& what) : std::runtime_error("CapExceeded: " + what) {}
};

struct IrViolation {
    bool is_doctor = true;
    int agent = -1;
    Rational payoff;  // nullopt hospital payoffs (quota exceeded) are reported as irp - 1
    Rational irp;
    bool quota_exceeded = false;
    int seat = -1;  // additive model: doctor whose seat is below the baseline
};

// Agents more than eps below their IRP; passive hospitals are skipped. In the
// additive model a hospital is checked seat by seat against the baseline.
std::optional<IrViolation> find_ir_violation(const Instance& inst, const Allocation& alloc, const Rational& eps,
                                             const StabilityOptions& opt = {});

struct BlockingPair {
    int doctor = -1;
    int partner = -1;    // hospital, or doctor for roommates
    int displaced = -1;  // weakest seat when the hospital is full
    Profile profile;     // in the game's own orientation
    Rational f;          // new payoff of `doctor`
    Rational g;          // new payoff of `partner` (seat value for hospitals)
    Rational f_before;
    Rational g_before;   // partner reference level (seat, min seat or baseline)
    CheckMethod method = CheckMethod::ExactInterval;
    int mesh = 0;
};

std::optional<BlockingPair> find_blocking_pair(const Instance& inst, const Allocation& alloc, const Rational& eps,
                                               const StabilityOptions& opt = {});

struct BlockingCoalition {
    Coalition members = 0;
    int hospital = -1;
    std::vector<Profile> profiles;   // additive model, ascending member order
    std::vector<Rational> doctor;    // new doctor payoffs
    std::optional<Rational> hospital_value;  // nullopt for passive hospitals
    CheckMethod method = CheckMethod::ExactInterval;
};

struct CoalitionOptions {
    int max_size = 5;
    // Additive model: skip (I, h) unless some member blocks h as a pair. Only
    // applied to hospitals whose seats all sit at or above the baseline.
    bool prune = false;
};

std::optional<BlockingCoalition> find_blocking_coalition(const Instance& inst, const Allocation& alloc,
                                                         const Rational& eps, const CoalitionOptions& copt = {},
                                                         const StabilityOptions& opt = {});

// All eps-core stable outcomes of a general-model instance (exhaustive).
std::vector<Allocation> enumerate_core(const Instance& inst, const Rational& eps = 0, std::size_t max_doctors = 10);

struct RenegotiationVerdict {
    bool holds = true;
    int doctor = -1;
    int hospital = -1;
    enum class Failure { None, DoctorInfeasible, HospitalInfeasible, DoctorDeviation, HospitalDeviation } failure =
        Failure::None;
    Rational reservation;
    Rational deviation_value;
};
const char* to_string(RenegotiationVerdict::Failure f);

RenegotiationVerdict verify_renegotiation_proof(const Instance& inst, const Allocation& alloc, const Rational& eps,
                                                const std::optional<Rational>& baseline = std::nullopt);

struct StabilityReport {
    std::optional<IrViolation> ir;
    std::optional<BlockingPair> pair;
    CheckMethod pair_method = CheckMethod::ExactInterval;
    bool coalitions_checked = false;
    int coalition_cap = 0;
    std::optional<BlockingCoalition> coalition;
    bool renegotiation_checked = false;
    std::optional<RenegotiationVerdict> renegotiation;
    std::vector<std::string> notes;

    bool passed() const;
};

struct VerifyOptions {
    StabilityOptions stability;
    int coalitions = 0;  // 0: skip the coalition scan
    bool renegotiation = false;
};

StabilityReport verify_allocation(const Instance& inst, const Allocation& alloc, const Rational& eps,
                                  const VerifyOptions& vopt);
nlohmann::json report_to_json(const Instance& inst, const StabilityReport& rep);

}  // namespace mg

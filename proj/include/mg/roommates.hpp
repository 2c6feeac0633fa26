#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mg/types.hpp"

namespace mg {

using PayoffProfile = std::vector<Rational>;

struct NotAnAspiration : std::runtime_error {
    int doctor;
    NotAnAspiration(int d, const std::string& why) : std::runtime_error("NotAnAspiration: " + why), doctor(d) {}
};

struct NoAspirationFound : std::runtime_error {
    explicit NoAspirationFound(const std::string& why) : std::runtime_error("NoAspirationFound: " + why) {}
};

// Doctors d' such that (f_d, f_d') is attainable in the pair game of d and d'.
std::vector<int> demand_set(const Instance& inst, const PayoffProfile& f, int d);

struct DemandGraph {
    std::vector<std::vector<int>> adj;  // sorted neighbour lists
    std::vector<bool> single_ok;        // f_d == irp_d
};
DemandGraph demand_graph(const Instance& inst, const PayoffProfile& f);

// Supremum of d's payoff in its pair with d' over outcomes giving d' strictly
// more than v; nullopt when d' cannot exceed v (or the pair has no game).
std::optional<Rational> partnership_value(const Instance& inst, int d, int dp, const Rational& v);

struct AspirationCheck {
    bool holds = true;
    int doctor = -1;    // first doctor whose equation fails
    Rational expected;  // right-hand side of its equation
};
// f_d >= max{irp_d, u_{d,d'}(f_d')} for all d', and f_d is the IRP or attained
// with some d' at f_d'. With strictly decreasing partnership values this is the
// max-equation; with flat or bounded ones it is what a stable allocation's
// payoffs satisfy.
AspirationCheck is_aspiration(const Instance& inst, const PayoffProfile& f);

// No set I of doctors with more doctors demanding only inside I than |I|.
// A doctor at its IRP counts itself as demanded.
bool is_balanced(const Instance& inst, const PayoffProfile& f);

struct AspirationSearch {
    PayoffProfile f;
    bool balanced = false;
    bool realizable = false;
    long nodes = 0;             // search nodes visited
    std::size_t candidates = 0; // candidate values over all doctors
};

// Aspiration for zero-sum and strictly competitive pairs, searched over the
// finite set of values generated by the IRPs and range endpoints. Returns the
// first realizable balanced aspiration in search order, else the first
// balanced one, else the first aspiration.
AspirationSearch search_aspiration(const Instance& inst, long node_cap = 50000);
PayoffProfile solve_aspiration_zero_sum(const Instance& inst);

struct UnrealizableReport {
    int doctor = -1;             // exposed doctor above its IRP
    std::vector<int> component;  // its connected component in the demand graph
    std::string reason;
};

using Realization = std::variant<Allocation, UnrealizableReport>;
Realization realize_aspiration(const Instance& inst, const PayoffProfile& f);

}  // namespace mg

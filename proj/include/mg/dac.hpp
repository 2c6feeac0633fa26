#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mg/types.hpp"

namespace mg {

struct DacOptions {
    Rational epsilon;
    // Per-seat value of an empty seat. Defaults to the hospital IRP.
    std::optional<Rational> baseline;
    long max_iterations = 1000000;
};

struct Proposal {
    int hospital = -1;   // -1: stay unmatched
    int displaced = -1;  // -1: free seat
    Profile profile;
    Rational doctor_value;
    Rational hospital_value;
};

struct Bid {
    Rational reservation;
    std::optional<Rational> bid;  // nullopt: cannot reach the reservation at h
};

struct DacEvent {
    enum Kind { Unmatched, Accepted, Competition } kind;
    int doctor;
    int hospital;
    int rival;   // displaced doctor or incumbent
    int winner;  // competitions only
    Rational doctor_value;
    Rational hospital_value;
};

struct DacState {
    const Instance* inst = nullptr;
    Rational epsilon;
    std::vector<Rational> baseline;  // per hospital
    Allocation alloc;
    std::map<std::pair<int, int>, Rational> seat;    // g_{d,h} of seated doctors
    std::map<std::pair<int, int>, Rational> payoff;  // f_{d,h} of seated doctors
    std::set<int> unmatched;                         // D'

    bool full(int h) const;
    // Threshold a new seat must reach: min contribution (+eps) when full,
    // baseline (+eps) otherwise.
    Rational threshold(int h) const;
    // Seated doctor with the smallest contribution (lowest index on ties).
    int weakest(int h) const;
    // Per-hospital level: min contribution when full, baseline otherwise.
    Rational level(int h) const;
};

struct DacTrace {
    long iterations = 0;
    long competitions = 0;
    Rational g_max;
    Rational bound;  // g_max / eps
    std::vector<DacEvent> events;
    std::vector<std::vector<Rational>> levels;  // levels[h]: history of level(h)
    std::vector<Rational> baseline;
};

struct DacResult {
    Allocation allocation;
    DacTrace trace;
};

struct EpsilonNotPositive : std::invalid_argument {
    EpsilonNotPositive() : std::invalid_argument("EpsilonNotPositive: epsilon must be > 0") {}
};

DacState initial_state(const Instance& inst, const DacOptions& opt);
Proposal optimal_proposal(const DacState& state, int d);
Bid competition_bid(const DacState& state, int d, int h);
// Winner's final bid against the loser's bid; seats the winner at h.
void settle_competition(DacState& state, int winner, const std::optional<Rational>& loser_bid, int h);

DacResult run_dac(const Instance& inst, const DacOptions& opt);

// Max over hospitals of (max hospital payoff entry - baseline).
Rational dac_g_max(const Instance& inst, const std::vector<Rational>& baseline);

std::string format_trace(const Instance& inst, const DacTrace& trace);

}  // namespace mg

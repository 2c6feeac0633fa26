#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mg/rational.hpp"

namespace mg {

enum class ModelKind { AdditiveSeparable, Roommates, General };
enum class GameClass { ZeroSum, StrictlyCompetitive, Repeated, General };

const char* to_string(ModelKind k);
const char* to_string(GameClass c);

// Errors raised while reading or validating user input. `code` is a stable
// identifier (QuotaOutOfRange, ClassTagViolation, ...) used by the CLI.
struct InputError : std::runtime_error {
    std::string code;
    InputError(std::string c, const std::string& msg) : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct BimatrixGame {
    Matrix A;  // doctor (row player) payoff
    Matrix M;  // hospital (column player) payoff, own sign convention
    GameClass cls = GameClass::General;

    std::size_t rows() const { return A.size(); }
    std::size_t cols() const { return A.empty() ? 0 : A[0].size(); }
};

struct Agent {
    std::string id;
    Rational irp;
    std::vector<std::string> strategies;
    int quota = 1;  // hospitals only
    // Hospital with a null payoff function: it accepts any coalition and never
    // takes part in blocking decisions (general model).
    bool passive = false;
};

// Explicit payoffs of a coalition I at hospital h (general model). `doctor`
// follows the ascending index order of the members of I.
struct CoalitionPayoff {
    std::vector<Rational> doctor;
    Rational hospital;
};

using Coalition = std::uint32_t;  // bitmask over doctor indices

struct Instance {
    ModelKind kind = ModelKind::AdditiveSeparable;
    std::vector<Agent> doctors;
    std::vector<Agent> hospitals;  // empty for roommates
    // (doctor, hospital) for additive separable, (d1, d2) with d1 < d2 for roommates.
    std::map<std::pair<int, int>, BimatrixGame> games;
    std::map<std::pair<int, Coalition>, CoalitionPayoff> coalitions;

    const BimatrixGame* game(int a, int b) const;
    int doctor_index(const std::string& id) const;
    int hospital_index(const std::string& id) const;
};

// Pure profiles visited in order, repeated forever. Entry i is played
// repeats[i] stages in a row (1 when `repeats` is empty). Grim punishment:
// after the first off-cycle action of the opponent the punisher plays its
// minimax strategy.
struct CycleStrategy {
    std::vector<std::pair<int, int>> cycle;
    std::vector<long> repeats;
    bool hospital_punishes = false;  // h punishes deviations of d
    bool doctor_punishes = false;    // d punishes deviations of h
    Vec hospital_punishment;         // y holding d down to alpha
    Vec doctor_punishment;           // x holding h down to beta

    long repeat(std::size_t i) const { return repeats.empty() ? 1 : repeats[i]; }
    long length() const;
    // Expanded stage sequence of one period.
    std::vector<std::pair<int, int>> stages() const;
};

struct Profile {
    Vec x;
    Vec y;
    std::optional<CycleStrategy> cycle;
};

struct Allocation {
    // doctor -> hospital index (or partner doctor for roommates), -1 if unmatched
    std::vector<int> match;
    std::map<std::pair<int, int>, Profile> profiles;

    std::vector<int> members(int h) const;
};

// nullopt encodes the -infinity sentinel (quota exceeded).
using MaybeValue = std::optional<Rational>;

struct PayoffReport {
    std::vector<Rational> doctor;
    std::vector<MaybeValue> hospital;
    // Per-seat hospital values g_{d,h}, additive separable model only.
    std::map<std::pair<int, int>, Rational> seat;
};

Allocation empty_allocation(const Instance& inst);

}  // namespace mg

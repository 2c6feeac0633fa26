#pragma once

#include "mg/types.hpp"

namespace mg {

// (doctor-side, partner-side) payoff of a profile: long-run cycle average when
// a cycle is present, xAy / xMy otherwise.
std::pair<Rational, Rational> profile_payoffs(const BimatrixGame& g, const Profile& p);

PayoffReport evaluate_payoffs(const Instance& inst, const Allocation& alloc);

// Roommates helpers: key of the unordered pair and the payoff of `d` in it.
std::pair<int, int> pair_key(int a, int b);
Rational roommate_payoff(const Instance& inst, const Allocation& alloc, int d);

// Hospital payoff table entry for coalition `members` at h (general model).
const CoalitionPayoff* coalition_entry(const Instance& inst, int h, Coalition members);

}  // namespace mg

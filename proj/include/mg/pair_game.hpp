#pragma once

#include "mg/types.hpp"

namespace mg {

// Class-dispatched single-pair optimisation used by DAC, reservations and the
// stability checks. "Doctor" is the row player, "partner" the column player.
struct PairOption {
    bool feasible = false;
    bool approximate = false;
    Profile profile;
    Rational f;  // row player's payoff
    Rational g;  // column player's payoff
};

// max f  s.t.  g >= thr
PairOption best_for_doctor(const BimatrixGame& game, const Rational& thr, int grid = 8);
// max g  s.t.  f >= thr
PairOption best_for_partner(const BimatrixGame& game, const Rational& thr, int grid = 8);

// Profile with f > a and g > b (both strict), if one exists.
PairOption strict_improvement(const BimatrixGame& game, const Rational& a, const Rational& b, int grid = 8);

Rational max_doctor(const BimatrixGame& game);
Rational max_partner(const BimatrixGame& game);

// True when the answers of this module are exact for the game's class.
bool exact_class(GameClass c);

}  // namespace mg

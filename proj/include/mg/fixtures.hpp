#pragma once

#include "mg/types.hpp"

namespace mg {

// Four sellers (one strategy each) and two buyers choosing a price in 0..10
// per seller. Seller payoff p - 1, buyer payoff u - p.
Instance multi_auction_instance();

// Prisoners' dilemma stage game, row/column 0 = cooperate, 1 = betray.
BimatrixGame prisoners_dilemma();

// 2n ranked doctors and two hospitals of prestige 2 > 1 with quota n.
// Doctors earn prestige plus the ranks of their group, hospitals the ranks.
Instance segregation_instance(int n);

// Three doctors, two passive hospitals, coalition values independent of the hospital.
Instance hedonic_instance();

// Roommates with coalition tables: couples earn v[d][d'], larger groups a big
// penalty, hospitals are passive. v must be square with positive off-diagonal.
Instance roommates_table_instance(const std::vector<std::vector<long>>& v, int hospitals);

}  // namespace mg

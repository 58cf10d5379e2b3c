#pragma once

#include "smrec/graph.hpp"
#include "smrec/relation.hpp"

namespace smrec {

/// Co-occurrence proximity between items: for items a and b,
/// p_ab = |users with both| / |users with either|.
/// Items with no users stay in the vertex set, isolated and inactive.
/// Rows are independent and computed on up to `threads` workers.
ProximityGraph item_proximity(const BinaryRelation& relation, unsigned threads = 1);

/// Same measure between users, over their item profiles.
ProximityGraph user_proximity(const BinaryRelation& relation, unsigned threads = 1);

}  // namespace smrec

#pragma once

#include "bbleed/types.hpp"

namespace bbleed {

/// Apply one evaluation outcome to the pruning window.
/// A select hit raises k_min to k; a stop crossing lowers k_max to k.
/// Neither bound is ever relaxed.
Bounds update_bounds(Bounds bounds, int k, double score, const Thresholds& thresholds);

/// Binary-search-ordered search over the k space. Evaluates the midpoint
/// of each index range (skipping candidates outside the current pruning
/// window), recurses into the upper half first, and skips any half whose
/// entire k range falls outside the window. Does not terminate on a hit:
/// a select hit prunes lower k and the search bleeds toward higher k.
///
/// k_optimal is the largest recorded k whose score passes the select
/// threshold, or absent when none does.
SearchResult binary_bleed_serial(const KSpace& space, const Evaluator& evaluator,
                                 const Thresholds& thresholds, std::uint64_t seed);

/// Exhaustive ascending scan; the baseline. Same k_optimal rule as
/// binary_bleed_serial, pruned always empty.
SearchResult linear_grid_search(const KSpace& space, const Evaluator& evaluator,
                                const Thresholds& thresholds, std::uint64_t seed);

}  // namespace bbleed

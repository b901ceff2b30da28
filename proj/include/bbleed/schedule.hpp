#pragma once

#include <string>
#include <vector>

#include "bbleed/types.hpp"

namespace bbleed {

enum class TraversalOrder { InOrder, PreOrder, PostOrder };

/// The four compositions of chunking and traversal sorting.
///   T1: sort whole space, then split into contiguous per-resource blocks
///   T2: sort whole space, then skip-mod chunk
///   T3: split into contiguous blocks, then sort each block
///   T4: skip-mod chunk, then sort each chunk
enum class ScheduleVariant { T1, T2, T3, T4 };

TraversalOrder parse_order(const std::string& name);
ScheduleVariant parse_variant(const std::string& name);
std::string to_string(TraversalOrder order);
std::string to_string(ScheduleVariant variant);

/// Per-resource work lists. Always a partition of the source space;
/// trailing chunks may be empty when resources outnumber candidates.
struct ChunkAssignment {
    std::vector<std::vector<int>> chunks;
    int num_resources = 0;
};

/// Skip-mod chunking: the element at position i of the ascending space
/// goes to chunk (i mod num_resources), preserving relative order.
ChunkAssignment chunk_ks(const KSpace& space, int num_resources);

/// Reorder an ascending candidate list by the requested traversal of the
/// balanced BST whose root index is lo + ceil((hi - lo) / 2), applied
/// recursively. InOrder returns the input unchanged.
std::vector<int> traversal_sort(const std::vector<int>& ks, TraversalOrder order);

/// Compose chunking and sorting per the variant. Chunk membership always
/// comes from position in the ascending space (T1/T3 contiguous blocks,
/// T2/T4 skip-mod); ordering within a chunk comes from the traversal.
ChunkAssignment build_schedule(const KSpace& space, int num_resources,
                               ScheduleVariant variant, TraversalOrder order);

}  // namespace bbleed

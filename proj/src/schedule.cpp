#include "bbleed/schedule.hpp"

#include <stdexcept>

namespace bbleed {

TraversalOrder parse_order(const std::string& name) {
    if (name == "in" || name == "in-order" || name == "inorder") return TraversalOrder::InOrder;
    if (name == "pre" || name == "pre-order" || name == "preorder") return TraversalOrder::PreOrder;
    if (name == "post" || name == "post-order" || name == "postorder")
        return TraversalOrder::PostOrder;
    throw std::invalid_argument("unknown traversal order: " + name);
}

ScheduleVariant parse_variant(const std::string& name) {
    if (name == "t1" || name == "T1") return ScheduleVariant::T1;
    if (name == "t2" || name == "T2") return ScheduleVariant::T2;
    if (name == "t3" || name == "T3") return ScheduleVariant::T3;
    if (name == "t4" || name == "T4") return ScheduleVariant::T4;
    throw std::invalid_argument("unknown schedule variant: " + name);
}

std::string to_string(TraversalOrder order) {
    switch (order) {
        case TraversalOrder::InOrder: return "in";
        case TraversalOrder::PreOrder: return "pre";
        case TraversalOrder::PostOrder: return "post";
    }
    return "?";
}

std::string to_string(ScheduleVariant variant) {
    switch (variant) {
        case ScheduleVariant::T1: return "t1";
        case ScheduleVariant::T2: return "t2";
        case ScheduleVariant::T3: return "t3";
        case ScheduleVariant::T4: return "t4";
    }
    return "?";
}

ChunkAssignment chunk_ks(const KSpace& space, int num_resources) {
    if (num_resources < 1) throw std::invalid_argument("chunk_ks: num_resources must be >= 1");
    ChunkAssignment out;
    out.num_resources = num_resources;
    out.chunks.resize(static_cast<std::size_t>(num_resources));
    for (std::size_t i = 0; i < space.size(); ++i)
        out.chunks[i % static_cast<std::size_t>(num_resources)].push_back(space[i]);
    return out;
}

namespace {

void emit(const std::vector<int>& ks, int lo, int hi, TraversalOrder order,
          std::vector<int>& out) {
    if (lo > hi) return;
    const int root = lo + (hi - lo + 1) / 2;  // ceiling split
    switch (order) {
        case TraversalOrder::PreOrder:
            out.push_back(ks[static_cast<std::size_t>(root)]);
            emit(ks, lo, root - 1, order, out);
            emit(ks, root + 1, hi, order, out);
            break;
        case TraversalOrder::InOrder:
            emit(ks, lo, root - 1, order, out);
            out.push_back(ks[static_cast<std::size_t>(root)]);
            emit(ks, root + 1, hi, order, out);
            break;
        case TraversalOrder::PostOrder:
            emit(ks, lo, root - 1, order, out);
            emit(ks, root + 1, hi, order, out);
            out.push_back(ks[static_cast<std::size_t>(root)]);
            break;
    }
}

/// Contiguous blocks by position; earlier blocks one element longer when
/// the length is not divisible.
std::vector<std::vector<int>> split_blocks(const std::vector<int>& seq, int num_resources) {
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(num_resources));
    const std::size_t n = seq.size();
    const std::size_t r = static_cast<std::size_t>(num_resources);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < r; ++b) {
        std::size_t len = n / r + (b < n % r ? 1 : 0);
        blocks[b].assign(seq.begin() + static_cast<std::ptrdiff_t>(pos),
                         seq.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    return blocks;
}

}  // namespace

std::vector<int> traversal_sort(const std::vector<int>& ks, TraversalOrder order) {
    std::vector<int> out;
    out.reserve(ks.size());
    emit(ks, 0, static_cast<int>(ks.size()) - 1, order, out);
    return out;
}

ChunkAssignment build_schedule(const KSpace& space, int num_resources,
                               ScheduleVariant variant, TraversalOrder order) {
    if (num_resources < 1)
        throw std::invalid_argument("build_schedule: num_resources must be >= 1");
    ChunkAssignment out;
    out.num_resources = num_resources;
    switch (variant) {
        case ScheduleVariant::T1:
            out.chunks = split_blocks(traversal_sort(space.values(), order), num_resources);
            break;
        case ScheduleVariant::T2: {
            // Membership by position in the ascending space, order from the
            // whole-space traversal.
            out.chunks.resize(static_cast<std::size_t>(num_resources));
            for (int k : traversal_sort(space.values(), order)) {
                const std::size_t rank =
                    static_cast<std::size_t>(space.index_of(k)) %
                    static_cast<std::size_t>(num_resources);
                out.chunks[rank].push_back(k);
            }
            break;
        }
        case ScheduleVariant::T3: {
            out.chunks = split_blocks(space.values(), num_resources);
            for (auto& chunk : out.chunks) chunk = traversal_sort(chunk, order);
            break;
        }
        case ScheduleVariant::T4: {
            out = chunk_ks(space, num_resources);
            for (auto& chunk : out.chunks) chunk = traversal_sort(chunk, order);
            break;
        }
    }
    return out;
}

}  // namespace bbleed

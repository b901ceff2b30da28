#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "bbleed/schedule.hpp"

using namespace bbleed;

namespace {

using Chunks = std::vector<std::vector<int>>;

Chunks schedule(ScheduleVariant v, TraversalOrder o) {
    return build_schedule(KSpace::range(1, 11), 2, v, o).chunks;
}

}  // namespace

TEST_CASE("chunk_ks assigns by position mod resource count") {
    const auto two = chunk_ks(KSpace::range(1, 11), 2);
    CHECK(two.chunks == Chunks{{1, 3, 5, 7, 9, 11}, {2, 4, 6, 8, 10}});

    const auto one = chunk_ks(KSpace::range(1, 11), 1);
    CHECK(one.chunks == Chunks{{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}});

    // direct modular-indexing oracle on [2..30] over 3 resources
    const KSpace space = KSpace::range(2, 30);
    const auto three = chunk_ks(space, 3);
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto& chunk = three.chunks[i % 3];
        CHECK(std::find(chunk.begin(), chunk.end(), space[i]) != chunk.end());
    }

    CHECK_THROWS_AS(chunk_ks(space, 0), std::invalid_argument);
}

TEST_CASE("empty chunks appear when resources outnumber candidates") {
    const auto many = chunk_ks(KSpace{{4, 9}}, 5);
    REQUIRE(many.chunks.size() == 5);
    CHECK(many.chunks[0] == std::vector<int>{4});
    CHECK(many.chunks[1] == std::vector<int>{9});
    for (std::size_t r = 2; r < 5; ++r) CHECK(many.chunks[r].empty());
}

TEST_CASE("traversal anchors for [1..11]") {
    const std::vector<int> ks{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    CHECK(traversal_sort(ks, TraversalOrder::PreOrder) ==
          std::vector<int>{6, 3, 2, 1, 5, 4, 9, 8, 7, 11, 10});
    CHECK(traversal_sort(ks, TraversalOrder::PostOrder) ==
          std::vector<int>{1, 2, 4, 5, 3, 7, 8, 10, 11, 9, 6});
    CHECK(traversal_sort(ks, TraversalOrder::InOrder) == ks);
    CHECK(traversal_sort({1, 3, 5, 7, 9, 11}, TraversalOrder::PreOrder) ==
          std::vector<int>{7, 3, 1, 5, 11, 9});
    CHECK(traversal_sort({}, TraversalOrder::PreOrder).empty());
}

TEST_CASE("all twelve cells for [1..11] on two resources") {
    // T1: whole-space sort, then contiguous blocks
    CHECK(schedule(ScheduleVariant::T1, TraversalOrder::InOrder) ==
          Chunks{{1, 2, 3, 4, 5, 6}, {7, 8, 9, 10, 11}});
    CHECK(schedule(ScheduleVariant::T1, TraversalOrder::PreOrder) ==
          Chunks{{6, 3, 2, 1, 5, 4}, {9, 8, 7, 11, 10}});
    CHECK(schedule(ScheduleVariant::T1, TraversalOrder::PostOrder) ==
          Chunks{{1, 2, 4, 5, 3, 7}, {8, 10, 11, 9, 6}});

    // T2: whole-space sort, then skip-mod chunk
    CHECK(schedule(ScheduleVariant::T2, TraversalOrder::InOrder) ==
          Chunks{{1, 3, 5, 7, 9, 11}, {2, 4, 6, 8, 10}});
    CHECK(schedule(ScheduleVariant::T2, TraversalOrder::PreOrder) ==
          Chunks{{3, 1, 5, 9, 7, 11}, {6, 2, 4, 8, 10}});
    CHECK(schedule(ScheduleVariant::T2, TraversalOrder::PostOrder) ==
          Chunks{{1, 5, 3, 7, 11, 9}, {2, 4, 8, 10, 6}});

    // T3: contiguous blocks, then per-block sort
    CHECK(schedule(ScheduleVariant::T3, TraversalOrder::InOrder) ==
          Chunks{{1, 2, 3, 4, 5, 6}, {7, 8, 9, 10, 11}});
    CHECK(schedule(ScheduleVariant::T3, TraversalOrder::PreOrder) ==
          Chunks{{4, 2, 1, 3, 6, 5}, {9, 8, 7, 11, 10}});
    CHECK(schedule(ScheduleVariant::T3, TraversalOrder::PostOrder) ==
          Chunks{{1, 3, 2, 5, 6, 4}, {7, 8, 10, 11, 9}});

    // T4: skip-mod chunk, then per-chunk sort. The published post-order
    // second chunk prints 9 in both chunks; the derived-correct cell is
    // [2, 4, 8, 10, 6].
    CHECK(schedule(ScheduleVariant::T4, TraversalOrder::InOrder) ==
          Chunks{{1, 3, 5, 7, 9, 11}, {2, 4, 6, 8, 10}});
    CHECK(schedule(ScheduleVariant::T4, TraversalOrder::PreOrder) ==
          Chunks{{7, 3, 1, 5, 11, 9}, {6, 4, 2, 10, 8}});
    CHECK(schedule(ScheduleVariant::T4, TraversalOrder::PostOrder) ==
          Chunks{{1, 5, 3, 9, 11, 7}, {2, 4, 8, 10, 6}});
}

TEST_CASE("one resource collapses every variant to the sorted space") {
    const KSpace space = KSpace::range(1, 11);
    for (auto v : {ScheduleVariant::T1, ScheduleVariant::T2, ScheduleVariant::T3,
                   ScheduleVariant::T4}) {
        const auto got = build_schedule(space, 1, v, TraversalOrder::InOrder);
        CHECK(got.chunks == Chunks{space.values()});
    }
}

TEST_CASE("permutation, partition, in-order identity on random spaces") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> len_dist(1, 50);
        std::set<int> ks;
        std::uniform_int_distribution<int> k_dist(1, 200);
        const int len = len_dist(rng);
        while (static_cast<int>(ks.size()) < len) ks.insert(k_dist(rng));
        const std::vector<int> sorted(ks.begin(), ks.end());
        const KSpace space{sorted};

        CHECK(traversal_sort(sorted, TraversalOrder::InOrder) == sorted);
        for (auto o : {TraversalOrder::PreOrder, TraversalOrder::PostOrder}) {
            auto p = traversal_sort(sorted, o);
            std::sort(p.begin(), p.end());
            CHECK(p == sorted);
        }

        std::uniform_int_distribution<int> r_dist(1, 8);
        const int r = r_dist(rng);
        for (auto v : {ScheduleVariant::T1, ScheduleVariant::T2, ScheduleVariant::T3,
                       ScheduleVariant::T4}) {
            for (auto o : {TraversalOrder::InOrder, TraversalOrder::PreOrder,
                           TraversalOrder::PostOrder}) {
                const auto got = build_schedule(space, r, v, o);
                REQUIRE(static_cast<int>(got.chunks.size()) == r);
                std::vector<int> all;
                for (const auto& chunk : got.chunks)
                    all.insert(all.end(), chunk.begin(), chunk.end());
                std::sort(all.begin(), all.end());
                CHECK(all == sorted);  // disjoint and complete
            }
        }
    }
}

TEST_CASE("pre-order chunk heads are the ceiling-midpoint roots") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> len_dist(1, 60);
        const int len = len_dist(rng);
        std::set<int> ks;
        std::uniform_int_distribution<int> k_dist(1, 300);
        while (static_cast<int>(ks.size()) < len) ks.insert(k_dist(rng));
        const KSpace space{std::vector<int>(ks.begin(), ks.end())};
        std::uniform_int_distribution<int> r_dist(1, 5);
        const int r = r_dist(rng);

        const auto got =
            build_schedule(space, r, ScheduleVariant::T4, TraversalOrder::PreOrder);
        const auto plain = chunk_ks(space, r);
        for (std::size_t c = 0; c < got.chunks.size(); ++c) {
            if (got.chunks[c].empty()) continue;
            const auto& ascending = plain.chunks[c];
            const std::size_t n = ascending.size();
            const std::size_t root = (n - 1 + 1) / 2;  // lo + ceil((hi-lo)/2)
            CHECK(got.chunks[c].front() == ascending[root]);
        }
    }
}

TEST_CASE("name parsing round-trips") {
    for (auto o : {TraversalOrder::InOrder, TraversalOrder::PreOrder,
                   TraversalOrder::PostOrder})
        CHECK(parse_order(to_string(o)) == o);
    for (auto v : {ScheduleVariant::T1, ScheduleVariant::T2, ScheduleVariant::T3,
                   ScheduleVariant::T4})
        CHECK(parse_variant(to_string(v)) == v);
    CHECK_THROWS_AS(parse_order("sideways"), std::invalid_argument);
    CHECK_THROWS_AS(parse_variant("t9"), std::invalid_argument);
}

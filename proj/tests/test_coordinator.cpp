#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "bbleed/coordinator.hpp"
#include "bbleed/models.hpp"
#include "bbleed/search.hpp"

using namespace bbleed;

namespace {

Evaluator table_evaluator(std::map<int, double> scores) {
    return [scores = std::move(scores)](int k, std::uint64_t) { return scores.at(k); };
}

std::set<int> evaluated_set(const ParallelResult& r) {
    std::set<int> out;
    for (const auto& [rank, recs] : r.per_resource_records)
        for (const auto& rec : recs) out.insert(rec.k);
    return out;
}

// Three-resource scenario: only k=7 passes the threshold.
std::map<int, double> seven_peaks() {
    std::map<int, double> table;
    for (int k = 1; k <= 11; ++k) table[k] = 0.2;
    table[7] = 0.9;
    return table;
}

}  // namespace

TEST_CASE("broadcast fan-out reaches every rank but the sender") {
    RankNetwork net(3);
    broadcast_k(net, 7, 0);
    const auto r1 = net.drain(1);
    const auto r2 = net.drain(2);
    REQUIRE(r1.size() == 1);
    CHECK(r1[0].k == 7);
    CHECK(r1[0].sender == 0);
    REQUIRE(r2.size() == 1);
    CHECK(r2[0].k == 7);
    CHECK(net.drain(0).empty());

    RankNetwork solo(1);
    broadcast_k(solo, 5, 0);
    CHECK(solo.idle());
}

TEST_CASE("receive_k_check merges, replies on dominance, and is idempotent") {
    RankNetwork net(2);

    // empty inbox keeps the local value
    CHECK(receive_k_check(5, net, 0) == 5);
    CHECK(receive_k_check(std::nullopt, net, 0) == std::nullopt);

    // adopt a larger received k
    net.send_to(0, {KAnnouncement::Kind::Select, 7, 1});
    CHECK(receive_k_check(std::nullopt, net, 0) == 7);

    // local dominates: keep it and reply to the sender
    net.send_to(0, {KAnnouncement::Kind::Select, 7, 1});
    CHECK(receive_k_check(10, net, 0) == 10);
    const auto replies = net.drain(1);
    REQUIRE(replies.size() == 1);
    CHECK(replies[0].k == 10);
    CHECK(replies[0].sender == 0);

    // repeated announcements of the same k change nothing
    net.send_to(0, {KAnnouncement::Kind::Select, 7, 1});
    net.send_to(0, {KAnnouncement::Kind::Select, 7, 1});
    CHECK(receive_k_check(7, net, 0) == 7);
    CHECK(net.idle());
}

TEST_CASE("worker_step skips candidates dominated by the cell") {
    RankNetwork net(2);
    OptimalCell cell;
    cell.k_optimal = 24;
    const Thresholds th(0.5, std::nullopt, Direction::Maximize);
    int calls = 0;
    const Evaluator counting = [&calls](int, std::uint64_t) {
        ++calls;
        return 1.0;
    };
    const auto outcome = worker_step(19, cell, net, counting, th, 0, 0);
    CHECK(outcome.kind == StepOutcome::Kind::SkippedByCell);
    CHECK(outcome.bound == 24);
    CHECK(calls == 0);
}

TEST_CASE("worker_step announces a first threshold pass") {
    RankNetwork net(3);
    OptimalCell cell;
    const Thresholds th(0.5, std::nullopt, Direction::Maximize);
    const auto outcome =
        worker_step(8, cell, net, [](int, std::uint64_t) { return 0.8; }, th, 0, 0);
    CHECK(outcome.kind == StepOutcome::Kind::Evaluated);
    CHECK(outcome.announced);
    CHECK(cell.k_optimal == 8);
    const auto inbox1 = net.drain(1);
    REQUIRE(inbox1.size() == 1);
    CHECK(inbox1[0].k == 8);
    REQUIRE(net.drain(2).size() == 1);
}

TEST_CASE("worker_step keeps a dominant cell and replies to the sender") {
    RankNetwork net(2);
    OptimalCell cell;
    cell.k_optimal = 10;
    net.send_to(0, {KAnnouncement::Kind::Select, 7, 1});
    const Thresholds th(0.5, std::nullopt, Direction::Maximize);
    const auto outcome =
        worker_step(12, cell, net, [](int, std::uint64_t) { return 0.1; }, th, 0, 0);
    CHECK(outcome.kind == StepOutcome::Kind::Evaluated);
    CHECK(cell.k_optimal == 10);
    const auto replies = net.drain(1);
    REQUIRE(replies.size() == 1);
    CHECK(replies[0].k == 10);
}

TEST_CASE("three ranks: k=7 announcement prunes the low span only") {
    const KSpace space = KSpace::range(1, 11);
    const Thresholds th(0.5, std::nullopt, Direction::Maximize);
    const auto result = run_parallel(space, table_evaluator(seven_peaks()), th,
                                     {3, 1, ScheduleVariant::T4, TraversalOrder::PreOrder},
                                     0, SchedulerMode::RoundRobin);
    CHECK(result.k_optimal == 7);
    const auto evaluated = evaluated_set(result);
    CHECK(evaluated == std::set<int>{6, 7, 8, 9, 10, 11});
    CHECK(result.pruned == std::vector<int>{1, 2, 3, 4, 5});
    for (auto cell : result.rank_cells) CHECK(cell == 7);
}

TEST_CASE("four ranks with early stop reproduce both pruned spans") {
    // score(5) passes select, score(8) crosses stop, the rest sit between
    const KSpace space = KSpace::range(1, 11);
    const Thresholds th(0.8, 0.2, Direction::Maximize);
    std::map<int, double> table;
    for (int k = 1; k <= 11; ++k) table[k] = 0.5;
    table[5] = 0.9;
    table[8] = 0.1;
    const auto result = run_parallel(space, table_evaluator(table), th,
                                     {4, 1, ScheduleVariant::T4, TraversalOrder::PreOrder},
                                     0, SchedulerMode::RoundRobin);
    CHECK(result.k_optimal == 5);
    CHECK(evaluated_set(result) == std::set<int>{5, 6, 7, 8});
    CHECK(result.pruned == std::vector<int>{1, 2, 3, 4, 9, 10, 11});
}

TEST_CASE("degenerate single rank and thread agrees with the serial engines") {
    const KSpace space = KSpace::range(1, 11);
    const Thresholds th(0.5, std::nullopt, Direction::Maximize);
    const auto eval = make_square_wave_evaluator({8});
    const auto par = run_parallel(space, eval, th, {1, 1}, 0, SchedulerMode::RoundRobin);
    const auto serial = binary_bleed_serial(space, eval, th, 0);
    const auto linear = linear_grid_search(space, eval, th, 0);
    CHECK(par.k_optimal == serial.k_optimal);
    CHECK(par.k_optimal == linear.k_optimal);
}

TEST_CASE("wide square wave run prunes below the linear visit count") {
    const KSpace space = KSpace::range(2, 30);
    const Thresholds th(0.5, std::nullopt, Direction::Maximize);
    const auto eval = make_square_wave_evaluator({20});
    const auto result = run_parallel(space, eval, th,
                                     {4, 2, ScheduleVariant::T4, TraversalOrder::PreOrder},
                                     0, SchedulerMode::RoundRobin);
    const auto linear = linear_grid_search(space, eval, th, 0);
    CHECK(result.k_optimal == linear.k_optimal);
    CHECK(result.k_optimal == 19);
    CHECK(result.total_visited < 29);
}

TEST_CASE("serial equivalence across rank/thread grids") {
    const KSpace space = KSpace::range(2, 30);
    for (int k0 : {2, 5, 14, 23, 30}) {
        const auto eval = make_square_wave_evaluator({k0});
        for (bool with_stop : {false, true}) {
            const Thresholds th(0.5, with_stop ? std::optional<double>(0.5) : std::nullopt,
                                Direction::Maximize);
            const auto linear = linear_grid_search(space, eval, th, 0);
            for (int ranks : {1, 2, 4})
                for (int threads : {1, 2}) {
                    CAPTURE(k0);
                    CAPTURE(ranks);
                    CAPTURE(threads);
                    const auto result = run_parallel(
                        space, eval, th,
                        {ranks, threads, ScheduleVariant::T4, TraversalOrder::PreOrder}, 0,
                        SchedulerMode::RoundRobin);
                    CHECK(result.k_optimal == linear.k_optimal);
                    CHECK(result.total_visited <= 29);
                }
        }
    }
}

TEST_CASE("protocol invariants under randomized interleavings") {
    const KSpace space = KSpace::range(1, 11);
    const Thresholds th(0.5, std::nullopt, Direction::Maximize);
    const auto eval = table_evaluator(seven_peaks());
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto result = run_parallel(space, eval, th,
                                         {3, 1, ScheduleVariant::T4, TraversalOrder::PreOrder},
                                         0, SchedulerMode::SeededRandom, seed);
        CAPTURE(seed);

        // agreement at quiescence
        for (auto cell : result.rank_cells) CHECK(cell == result.k_optimal);
        CHECK(result.k_optimal == 7);

        // no duplicate evaluation, visit bound
        std::set<int> seen;
        int total = 0;
        for (const auto& [rank, recs] : result.per_resource_records)
            for (const auto& rec : recs) {
                CHECK(seen.insert(rec.k).second);
                ++total;
            }
        CHECK(total == result.total_visited);
        CHECK(total <= 11);

        // monotone cell per rank
        std::map<int, int> last_cell;
        for (const auto& e : result.events) {
            if (e.event != "cell_update") continue;
            if (auto it = last_cell.find(e.rank); it != last_cell.end())
                CHECK(*e.cell_value > it->second);
            last_cell[e.rank] = *e.cell_value;
        }

        // prune causality: a skip follows a cell update or stop message
        // for that bound on the same rank
        for (const auto& e : result.events) {
            if (e.event != "skip") continue;
            REQUIRE(e.cell_value.has_value());
            bool prior = false;
            for (const auto& p : result.events) {
                if (p.logical_time >= e.logical_time || p.rank != e.rank) continue;
                const bool cell_cause =
                    p.event == "cell_update" && p.cell_value && *p.cell_value == *e.cell_value;
                const bool stop_cause = (p.event == "receive" || p.event == "eval_finish") &&
                                        p.k == *e.cell_value;
                if (cell_cause || stop_cause) {
                    prior = true;
                    break;
                }
            }
            CHECK(prior);
        }

        // low candidates are never evaluated after the announcement lands
        std::map<int, std::uint64_t> delivered;  // rank -> time k=7 arrived
        for (const auto& e : result.events)
            if (e.event == "cell_update" && e.k == 7 && !delivered.count(e.rank))
                delivered[e.rank] = e.logical_time;
        for (const auto& e : result.events) {
            if (e.event != "eval_start" || e.k >= 7) continue;
            if (auto it = delivered.find(e.rank); it != delivered.end())
                CHECK(e.logical_time < it->second);
        }
    }
}

TEST_CASE("free-running threads agree with the linear answer") {
    const KSpace space = KSpace::range(2, 30);
    const Thresholds th(0.5, std::nullopt, Direction::Maximize);
    const auto eval = make_square_wave_evaluator({17});
    const auto linear = linear_grid_search(space, eval, th, 0);
    for (int round = 0; round < 10; ++round) {
        const auto result = run_parallel(space, eval, th,
                                         {4, 2, ScheduleVariant::T4, TraversalOrder::PreOrder},
                                         0, SchedulerMode::FreeRunning);
        CHECK(result.k_optimal == linear.k_optimal);
        CHECK(result.total_visited <= 29);
        for (auto cell : result.rank_cells) CHECK(cell == result.k_optimal);
        std::set<int> seen;
        for (const auto& [rank, recs] : result.per_resource_records)
            for (const auto& rec : recs) CHECK(seen.insert(rec.k).second);
    }
}

TEST_CASE("deterministic mode emits identical event logs") {
    const KSpace space = KSpace::range(2, 30);
    const Thresholds th(0.5, 0.5, Direction::Maximize);
    const auto eval = make_square_wave_evaluator({12});
    const RankConfig config{3, 2, ScheduleVariant::T4, TraversalOrder::PreOrder};
    const auto a = run_parallel(space, eval, th, config, 9, SchedulerMode::RoundRobin);
    const auto b = run_parallel(space, eval, th, config, 9, SchedulerMode::RoundRobin);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].event == b.events[i].event);
        CHECK(a.events[i].rank == b.events[i].rank);
        CHECK(a.events[i].k == b.events[i].k);
        CHECK(a.events[i].logical_time == b.events[i].logical_time);
    }
    CHECK(a.k_optimal == b.k_optimal);
}

TEST_CASE("evaluator failure aborts and surfaces partial logs") {
    const KSpace space = KSpace::range(1, 11);
    const Thresholds th(0.5, std::nullopt, Direction::Maximize);
    const Evaluator broken = [](int k, std::uint64_t) -> double {
        if (k == 3) throw std::runtime_error("device lost");
        return 0.1;
    };
    CHECK_THROWS_AS(run_parallel(space, broken, th,
                                 {2, 1, ScheduleVariant::T4, TraversalOrder::PreOrder}, 0,
                                 SchedulerMode::RoundRobin),
                    EvaluatorFailure);
}

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bbleed/schedule.hpp"
#include "bbleed/types.hpp"

namespace bbleed {

/// Resource layout and schedule shape for a parallel run.
struct RankConfig {
    int num_ranks = 1;
    int threads_per_rank = 1;
    ScheduleVariant variant = ScheduleVariant::T4;
    TraversalOrder order = TraversalOrder::PreOrder;
};

/// How workers are interleaved.
///   FreeRunning:   one OS thread per worker, real concurrency.
///   RoundRobin:    single-stepped simulation; within each round workers
///                  step in descending (rank, thread) order, biasing the
///                  higher chunks' announcements ahead of lower k values.
///   SeededRandom:  single-stepped simulation, next worker drawn from a
///                  seeded RNG; reproducible per schedule_seed.
enum class SchedulerMode { FreeRunning, RoundRobin, SeededRandom };

/// Announcements exchanged between ranks. Select carries a k that passed
/// the select threshold; Stop carries an upper prune bound from a score
/// that crossed the stop bound.
struct KAnnouncement {
    enum class Kind { Select, Stop };
    Kind kind = Kind::Select;
    int k = 0;
    int sender = 0;
};

/// Best threshold-passing k known to a rank, guarded for exclusive access.
/// The value is only ever replaced by a larger k.
struct OptimalCell {
    std::mutex mutex;
    std::optional<int> k_optimal;
    std::optional<int> upper;  // lowest stop-crossing k seen
};

/// One record per protocol action, suitable for JSON-lines export.
struct Event {
    std::string event;  // eval_start|eval_finish|skip|broadcast|receive|cell_update
    int rank = 0;
    int thread = 0;
    int k = 0;
    std::optional<double> score;
    std::optional<int> cell_value;
    std::uint64_t logical_time = 0;
};

struct ParallelResult {
    std::optional<int> k_optimal;
    std::map<int, std::vector<ScoreRecord>> per_resource_records;
    int total_visited = 0;
    int space_size = 0;
    std::vector<int> pruned;                 // ascending, never evaluated
    std::map<int, int> skipped_by;           // pruned k -> bound value that caused the skip
    std::vector<std::optional<int>> rank_cells;  // per-rank cell value at quiescence
    std::vector<Event> events;

    double visited_fraction() const {
        return space_size == 0 ? 0.0
                               : static_cast<double>(total_visited) / space_size;
    }
};

/// In-process rank network: per-receiver FIFO mailboxes with reliable
/// delivery. Messages between any two ranks stay ordered.
class RankNetwork {
public:
    explicit RankNetwork(int num_ranks);

    /// Enqueue to every rank except the sender.
    void broadcast(const KAnnouncement& msg);
    /// Enqueue to one rank (used for dominance replies).
    void send_to(int receiver, const KAnnouncement& msg);
    /// Drain all pending messages for a rank in arrival order.
    std::vector<KAnnouncement> drain(int rank);
    bool idle() const;

    int num_ranks() const { return static_cast<int>(inboxes_.size()); }

private:
    mutable std::mutex mutex_;
    std::vector<std::deque<KAnnouncement>> inboxes_;
};

/// Fan a select announcement out to every rank except the sender.
void broadcast_k(RankNetwork& network, int k, int sender,
                 KAnnouncement::Kind kind = KAnnouncement::Kind::Select);

/// Drain a rank's inbox and merge into `local`: adopt any larger received
/// k; when the local value dominates a received one, reply it to that
/// sender. Returns the merged value.
std::optional<int> receive_k_check(std::optional<int> local, RankNetwork& network, int rank_id);

/// Outcome of one worker step over a single candidate.
struct StepOutcome {
    enum class Kind { Evaluated, SkippedByCell, SkippedByStop };
    Kind kind = Kind::Evaluated;
    double score = 0.0;  // set when evaluated
    int bound = 0;       // responsible cell/upper value when skipped
    bool announced = false;
};

/// Hook receiving protocol events; logical_time is assigned by the caller.
using EventHook = std::function<void(Event)>;

/// One candidate through the per-k procedure: merge pending
/// announcements into the cell (replying when the local value dominates),
/// skip when the known optimum exceeds k or k sits at/above the announced
/// stop bound, otherwise evaluate, and on an improving threshold pass
/// update the cell and broadcast. Evaluator exceptions propagate.
StepOutcome worker_step(int k, OptimalCell& cell, RankNetwork& network,
                        const Evaluator& evaluator, const Thresholds& thresholds,
                        std::uint64_t seed, int rank_id, int thread_id = 0,
                        const EventHook& hook = {});

/// Multi-rank, multi-thread search over a chunked and traversal-sorted
/// k space. Workers skip candidates dominated by the announced optimum
/// (and, with a stop bound, candidates at or above an announced stop
/// crossing), evaluate the rest, and propagate improvements.
ParallelResult run_parallel(const KSpace& space, const Evaluator& evaluator,
                            const Thresholds& thresholds, const RankConfig& config,
                            std::uint64_t seed,
                            SchedulerMode mode = SchedulerMode::RoundRobin,
                            std::uint64_t schedule_seed = 0);

/// Serialize events as JSON lines to a file.
void write_events_jsonl(const std::vector<Event>& events, const std::string& path);

}  // namespace bbleed

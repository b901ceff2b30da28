#include <algorithm>
#include <atomic>
#include <fstream>
#include <memory>
#include <random>
#include <thread>

#include <json.hpp>

#include "bbleed/coordinator.hpp"

namespace bbleed {

RankNetwork::RankNetwork(int num_ranks) {
    if (num_ranks < 1) throw std::invalid_argument("RankNetwork: num_ranks must be >= 1");
    inboxes_.resize(static_cast<std::size_t>(num_ranks));
}

void RankNetwork::broadcast(const KAnnouncement& msg) {
    std::lock_guard lock(mutex_);
    for (std::size_t r = 0; r < inboxes_.size(); ++r)
        if (static_cast<int>(r) != msg.sender) inboxes_[r].push_back(msg);
}

void RankNetwork::send_to(int receiver, const KAnnouncement& msg) {
    std::lock_guard lock(mutex_);
    inboxes_.at(static_cast<std::size_t>(receiver)).push_back(msg);
}

std::vector<KAnnouncement> RankNetwork::drain(int rank) {
    std::lock_guard lock(mutex_);
    auto& inbox = inboxes_.at(static_cast<std::size_t>(rank));
    std::vector<KAnnouncement> out(inbox.begin(), inbox.end());
    inbox.clear();
    return out;
}

bool RankNetwork::idle() const {
    std::lock_guard lock(mutex_);
    return std::all_of(inboxes_.begin(), inboxes_.end(),
                       [](const auto& q) { return q.empty(); });
}

void broadcast_k(RankNetwork& network, int k, int sender, KAnnouncement::Kind kind) {
    network.broadcast({kind, k, sender});
}

std::optional<int> receive_k_check(std::optional<int> local, RankNetwork& network, int rank_id) {
    for (const auto& msg : network.drain(rank_id)) {
        if (msg.kind != KAnnouncement::Kind::Select) continue;
        if (!local || msg.k > *local) {
            local = msg.k;
        } else if (*local > msg.k) {
            network.send_to(msg.sender, {KAnnouncement::Kind::Select, *local, rank_id});
        }
    }
    return local;
}

namespace {

void emit(const EventHook& hook, const char* name, int rank, int thread, int k,
          std::optional<double> score, std::optional<int> cell_value) {
    if (hook) hook(Event{name, rank, thread, k, score, cell_value, 0});
}

// Drain one rank's pending messages into its cell under the cell lock.
// Dominated select announcements are answered with the local value.
void drain_into_cell(OptimalCell& cell, RankNetwork& network, int rank, int thread,
                     const EventHook& hook) {
    const auto msgs = network.drain(rank);
    std::lock_guard lock(cell.mutex);
    for (const auto& msg : msgs) {
        emit(hook, "receive", rank, thread, msg.k, std::nullopt, cell.k_optimal);
        if (msg.kind == KAnnouncement::Kind::Select) {
            if (!cell.k_optimal || msg.k > *cell.k_optimal) {
                cell.k_optimal = msg.k;
                emit(hook, "cell_update", rank, thread, msg.k, std::nullopt, msg.k);
            } else if (*cell.k_optimal > msg.k) {
                network.send_to(msg.sender,
                                {KAnnouncement::Kind::Select, *cell.k_optimal, rank});
                emit(hook, "broadcast", rank, thread, *cell.k_optimal, std::nullopt,
                     cell.k_optimal);
            }
        } else {
            if (!cell.upper || msg.k < *cell.upper) cell.upper = msg.k;
        }
    }
}

}  // namespace

StepOutcome worker_step(int k, OptimalCell& cell, RankNetwork& network,
                        const Evaluator& evaluator, const Thresholds& thresholds,
                        std::uint64_t seed, int rank_id, int thread_id,
                        const EventHook& hook) {
    drain_into_cell(cell, network, rank_id, thread_id, hook);

    std::optional<int> known, upper;
    {
        std::lock_guard lock(cell.mutex);
        known = cell.k_optimal;
        upper = cell.upper;
    }
    if (known && *known > k) {
        emit(hook, "skip", rank_id, thread_id, k, std::nullopt, known);
        return {StepOutcome::Kind::SkippedByCell, 0.0, *known, false};
    }
    if (upper && k >= *upper) {
        emit(hook, "skip", rank_id, thread_id, k, std::nullopt, upper);
        return {StepOutcome::Kind::SkippedByStop, 0.0, *upper, false};
    }

    emit(hook, "eval_start", rank_id, thread_id, k, std::nullopt, known);
    const double score = evaluator(k, seed);
    emit(hook, "eval_finish", rank_id, thread_id, k, score, std::nullopt);

    StepOutcome outcome{StepOutcome::Kind::Evaluated, score, 0, false};
    if (thresholds.passes_select(score)) {
        bool improved = false;
        {
            std::lock_guard lock(cell.mutex);
            if (!cell.k_optimal || k > *cell.k_optimal) {
                cell.k_optimal = k;
                improved = true;
            }
        }
        if (improved) {
            emit(hook, "cell_update", rank_id, thread_id, k, score, k);
            network.broadcast({KAnnouncement::Kind::Select, k, rank_id});
            emit(hook, "broadcast", rank_id, thread_id, k, std::nullopt, k);
            outcome.announced = true;
        }
    }
    if (thresholds.crosses_stop(score)) {
        bool tightened = false;
        {
            std::lock_guard lock(cell.mutex);
            if (!cell.upper || k < *cell.upper) {
                cell.upper = k;
                tightened = true;
            }
        }
        if (tightened) {
            network.broadcast({KAnnouncement::Kind::Stop, k, rank_id});
            emit(hook, "broadcast", rank_id, thread_id, k, std::nullopt, std::nullopt);
        }
    }
    return outcome;
}

namespace {

struct EventSink {
    std::mutex mutex;
    std::vector<Event> events;
    std::uint64_t next_time = 0;

    void log(Event e) {
        std::lock_guard lock(mutex);
        e.logical_time = next_time++;
        events.push_back(std::move(e));
    }
};

struct RunState {
    const Evaluator& evaluator;
    const Thresholds& thresholds;
    std::uint64_t seed;
    RankNetwork network;
    std::vector<std::unique_ptr<OptimalCell>> cells;
    EventSink sink;
    std::atomic<int> visit_counter{0};
    std::atomic<bool> aborted{false};

    std::mutex result_mutex;
    std::map<int, std::vector<ScoreRecord>> records;
    std::map<int, int> skipped_by;
    std::optional<EvaluatorFailure> failure;

    RunState(const Evaluator& ev, const Thresholds& th, std::uint64_t sd, int num_ranks)
        : evaluator(ev), thresholds(th), seed(sd), network(num_ranks) {
        for (int r = 0; r < num_ranks; ++r) cells.push_back(std::make_unique<OptimalCell>());
    }

    void step(int rank, int thread, int k) {
        if (aborted.load()) return;
        auto hook = [this](Event e) { sink.log(std::move(e)); };
        StepOutcome outcome;
        try {
            outcome = worker_step(k, *cells[static_cast<std::size_t>(rank)], network,
                                  evaluator, thresholds, seed, rank, thread, hook);
        } catch (const std::exception& e) {
            aborted.store(true);
            std::lock_guard lock(result_mutex);
            if (!failure) {
                std::vector<ScoreRecord> partial;
                for (const auto& [r, recs] : records)
                    partial.insert(partial.end(), recs.begin(), recs.end());
                failure.emplace(k, std::move(partial), e.what());
            }
            return;
        }
        std::lock_guard lock(result_mutex);
        if (outcome.kind == StepOutcome::Kind::Evaluated)
            records[rank].push_back({k, outcome.score, visit_counter.fetch_add(1)});
        else
            skipped_by.emplace(k, outcome.bound);
    }

    // Quiescence: deliver everything still in flight (replies may generate
    // more traffic; cell values strictly grow, so this terminates).
    void settle() {
        auto hook = [this](Event e) { sink.log(std::move(e)); };
        while (!network.idle())
            for (int r = 0; r < network.num_ranks(); ++r)
                drain_into_cell(*cells[static_cast<std::size_t>(r)], network, r, 0, hook);
    }
};

struct WorkerPlan {
    int rank = 0;
    int thread = 0;
    std::vector<int> ks;
};

std::vector<WorkerPlan> plan_workers(const ChunkAssignment& schedule, int threads_per_rank) {
    std::vector<WorkerPlan> plans;
    for (int r = 0; r < schedule.num_resources; ++r) {
        const auto& chunk = schedule.chunks[static_cast<std::size_t>(r)];
        for (int t = 0; t < threads_per_rank; ++t) {
            WorkerPlan plan{r, t, {}};
            for (std::size_t i = static_cast<std::size_t>(t); i < chunk.size();
                 i += static_cast<std::size_t>(threads_per_rank))
                plan.ks.push_back(chunk[i]);
            plans.push_back(std::move(plan));
        }
    }
    return plans;
}

}  // namespace

ParallelResult run_parallel(const KSpace& space, const Evaluator& evaluator,
                            const Thresholds& thresholds, const RankConfig& config,
                            std::uint64_t seed, SchedulerMode mode,
                            std::uint64_t schedule_seed) {
    if (config.num_ranks < 1 || config.threads_per_rank < 1)
        throw std::invalid_argument("run_parallel: ranks and threads must be >= 1");

    const auto schedule =
        build_schedule(space, config.num_ranks, config.variant, config.order);
    auto plans = plan_workers(schedule, config.threads_per_rank);

    RunState state(evaluator, thresholds, seed, config.num_ranks);

    if (mode == SchedulerMode::FreeRunning) {
        std::vector<std::thread> threads;
        threads.reserve(plans.size());
        for (const auto& plan : plans)
            threads.emplace_back([&state, &plan] {
                for (int k : plan.ks) state.step(plan.rank, plan.thread, k);
            });
        for (auto& t : threads) t.join();
    } else {
        // Single-stepped simulation: one whole candidate per step.
        std::vector<std::size_t> cursor(plans.size(), 0);
        auto pending = [&](std::size_t w) { return cursor[w] < plans[w].ks.size(); };
        if (mode == SchedulerMode::RoundRobin) {
            // Within a round, workers step in descending (rank, thread)
            // order: higher chunks hold the larger k values of each block,
            // so their announcements land before lower ranks reach the
            // small candidates of the same round.
            std::stable_sort(plans.begin(), plans.end(), [](const auto& a, const auto& b) {
                return std::pair(a.rank, a.thread) > std::pair(b.rank, b.thread);
            });
            bool any = true;
            while (any) {
                any = false;
                for (std::size_t w = 0; w < plans.size(); ++w) {
                    if (!pending(w)) continue;
                    any = true;
                    state.step(plans[w].rank, plans[w].thread, plans[w].ks[cursor[w]++]);
                }
            }
        } else {
            std::mt19937_64 rng(schedule_seed);
            while (true) {
                std::vector<std::size_t> ready;
                for (std::size_t w = 0; w < plans.size(); ++w)
                    if (pending(w)) ready.push_back(w);
                if (ready.empty()) break;
                std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
                const std::size_t w = ready[pick(rng)];
                state.step(plans[w].rank, plans[w].thread, plans[w].ks[cursor[w]++]);
            }
        }
    }

    if (state.failure) throw *state.failure;
    state.settle();

    ParallelResult result;
    result.space_size = static_cast<int>(space.size());
    result.per_resource_records = std::move(state.records);
    for (const auto& [rank, recs] : result.per_resource_records)
        result.total_visited += static_cast<int>(recs.size());
    for (const auto& cell : state.cells) result.rank_cells.push_back(cell->k_optimal);
    result.k_optimal = result.rank_cells.front();
    result.skipped_by = std::move(state.skipped_by);
    result.events = std::move(state.sink.events);

    std::vector<bool> seen(space.size(), false);
    for (const auto& [rank, recs] : result.per_resource_records)
        for (const auto& rec : recs) seen[static_cast<std::size_t>(space.index_of(rec.k))] = true;
    for (std::size_t i = 0; i < space.size(); ++i)
        if (!seen[i]) result.pruned.push_back(space[i]);
    return result;
}

void write_events_jsonl(const std::vector<Event>& events, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    for (const auto& e : events) {
        nlohmann::json j{{"event", e.event},
                         {"rank", e.rank},
                         {"thread", e.thread},
                         {"k", e.k},
                         {"logical_time", e.logical_time}};
        if (e.score) j["score"] = *e.score;
        if (e.cell_value) j["cell_value"] = *e.cell_value;
        out << j.dump() << '\n';
    }
}

}  // namespace bbleed

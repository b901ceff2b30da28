#include "bbleed/search.hpp"

#include <algorithm>
#include <numeric>

namespace bbleed {

KSpace::KSpace(std::vector<int> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("KSpace: empty candidate list");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] < 1) throw std::invalid_argument("KSpace: all k must be >= 1");
        if (i > 0 && values_[i] <= values_[i - 1])
            throw std::invalid_argument("KSpace: values must be strictly ascending");
    }
}

KSpace KSpace::range(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("KSpace::range: lo > hi");
    std::vector<int> v(static_cast<std::size_t>(hi - lo + 1));
    std::iota(v.begin(), v.end(), lo);
    return KSpace(std::move(v));
}

int KSpace::index_of(int k) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), k);
    if (it == values_.end() || *it != k) return -1;
    return static_cast<int>(it - values_.begin());
}

Thresholds::Thresholds(double select_, std::optional<double> stop_, Direction dir)
    : select(select_), stop(stop_), direction(dir) {
    if (stop) {
        if (dir == Direction::Maximize && *stop > select)
            throw std::invalid_argument("Thresholds: stop must be <= select when maximizing");
        if (dir == Direction::Minimize && *stop < select)
            throw std::invalid_argument("Thresholds: stop must be >= select when minimizing");
    }
}

Bounds update_bounds(Bounds bounds, int k, double score, const Thresholds& thresholds) {
    if (thresholds.passes_select(score)) bounds.raise_min(k);
    if (thresholds.crosses_stop(score)) bounds.lower_max(k);
    return bounds;
}

namespace {

struct SerialRun {
    const KSpace& space;
    const Evaluator& evaluator;
    const Thresholds& thresholds;
    std::uint64_t seed;
    Bounds bounds;
    std::vector<ScoreRecord> records;

    // Inclusive index range [lo, hi]. Midpoint splits by ceiling, so the
    // visit tree matches the balanced BST of the schedule module and a
    // two-element range evaluates its larger k first.
    void recurse(int lo, int hi) {
        if (lo > hi) return;
        const int mid = lo + (hi - lo + 1) / 2;
        const int k_mid = space[static_cast<std::size_t>(mid)];
        if (bounds.contains(k_mid)) {
            double score;
            try {
                score = evaluator(k_mid, seed);
            } catch (const EvaluatorFailure&) {
                throw;
            } catch (const std::exception& e) {
                throw EvaluatorFailure(k_mid, records, e.what());
            }
            records.push_back({k_mid, score, static_cast<int>(records.size())});
            bounds = update_bounds(bounds, k_mid, score, thresholds);
        }
        // Upper half first; a half is skipped when its whole k range lies
        // outside the (possibly just narrowed) window.
        if (mid + 1 <= hi && half_alive(mid + 1, hi)) recurse(mid + 1, hi);
        if (lo <= mid - 1 && half_alive(lo, mid - 1)) recurse(lo, mid - 1);
    }

    bool half_alive(int lo, int hi) const {
        const int k_lo = space[static_cast<std::size_t>(lo)];
        const int k_hi = space[static_cast<std::size_t>(hi)];
        if (bounds.k_min && k_hi <= *bounds.k_min) return false;
        if (bounds.k_max && k_lo >= *bounds.k_max) return false;
        return true;
    }
};

std::optional<int> pick_optimal(const std::vector<ScoreRecord>& records,
                                const Thresholds& thresholds) {
    std::optional<int> best;
    for (const auto& r : records)
        if (thresholds.passes_select(r.score) && (!best || r.k > *best)) best = r.k;
    return best;
}

SearchResult finish(const KSpace& space, std::vector<ScoreRecord> records,
                    const Thresholds& thresholds) {
    SearchResult result;
    result.space_size = static_cast<int>(space.size());
    result.k_optimal = pick_optimal(records, thresholds);
    std::vector<bool> seen(space.size(), false);
    for (const auto& r : records) seen[static_cast<std::size_t>(space.index_of(r.k))] = true;
    for (std::size_t i = 0; i < space.size(); ++i)
        if (!seen[i]) result.pruned.push_back(space[i]);
    result.records = std::move(records);
    return result;
}

}  // namespace

SearchResult binary_bleed_serial(const KSpace& space, const Evaluator& evaluator,
                                 const Thresholds& thresholds, std::uint64_t seed) {
    SerialRun run{space, evaluator, thresholds, seed, {}, {}};
    run.recurse(0, static_cast<int>(space.size()) - 1);
    return finish(space, std::move(run.records), thresholds);
}

SearchResult linear_grid_search(const KSpace& space, const Evaluator& evaluator,
                                const Thresholds& thresholds, std::uint64_t seed) {
    std::vector<ScoreRecord> records;
    records.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const int k = space[i];
        double score;
        try {
            score = evaluator(k, seed);
        } catch (const EvaluatorFailure&) {
            throw;
        } catch (const std::exception& e) {
            throw EvaluatorFailure(k, records, e.what());
        }
        records.push_back({k, score, static_cast<int>(i)});
    }
    return finish(space, std::move(records), thresholds);
}

}  // namespace bbleed

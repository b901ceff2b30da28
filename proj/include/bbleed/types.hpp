#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbleed {

/// Ordered candidate k values the search explores.
/// Values are distinct, strictly ascending and >= 1.
class KSpace {
public:
    explicit KSpace(std::vector<int> values);

    /// Inclusive range [lo, hi].
    static KSpace range(int lo, int hi);

    const std::vector<int>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    int operator[](std::size_t i) const { return values_[i]; }

    /// Index of k in the ascending space, or -1 if absent.
    int index_of(int k) const;

private:
    std::vector<int> values_;
};

enum class Direction { Maximize, Minimize };

/// Select threshold, optional stop bound, and optimization direction.
struct Thresholds {
    double select = 0.0;
    std::optional<double> stop;
    Direction direction = Direction::Maximize;

    Thresholds() = default;
    Thresholds(double select_, std::optional<double> stop_, Direction dir);

    /// True when a score qualifies k as a candidate optimum.
    bool passes_select(double score) const {
        return direction == Direction::Maximize ? score >= select : score <= select;
    }
    /// True when a score crosses the stop bound (upper truncation).
    bool crosses_stop(double score) const {
        if (!stop) return false;
        return direction == Direction::Maximize ? score <= *stop : score >= *stop;
    }
};

/// Shared pruning window. Absent bound means unbounded on that side.
/// k_min only ever increases and k_max only ever decreases over a run.
struct Bounds {
    std::optional<int> k_min;
    std::optional<int> k_max;

    bool contains(int k) const {
        return (!k_min || k > *k_min) && (!k_max || k < *k_max);
    }
    void raise_min(int k) {
        if (!k_min || k > *k_min) k_min = k;
    }
    void lower_max(int k) {
        if (!k_max || k < *k_max) k_max = k;
    }
};

struct ScoreRecord {
    int k = 0;
    double score = 0.0;
    int visit_index = 0;

    friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

struct SearchResult {
    std::optional<int> k_optimal;
    std::vector<ScoreRecord> records;   // in evaluation order
    int space_size = 0;
    std::vector<int> pruned;            // ascending, never evaluated

    double visited_fraction() const {
        return space_size == 0 ? 0.0
                               : static_cast<double>(records.size()) / space_size;
    }
};

/// Deterministic evaluation function: same (k, seed) always yields the
/// same score. The dataset is captured by the callable.
using Evaluator = std::function<double(int k, std::uint64_t seed)>;

/// Thrown when an evaluator fails mid-search; carries the partial log.
class EvaluatorFailure : public std::runtime_error {
public:
    EvaluatorFailure(int k, std::vector<ScoreRecord> partial, const std::string& what)
        : std::runtime_error("evaluator failed at k=" + std::to_string(k) + ": " + what),
          k_(k),
          partial_(std::move(partial)) {}

    int k() const { return k_; }
    const std::vector<ScoreRecord>& partial_records() const { return partial_; }

private:
    int k_;
    std::vector<ScoreRecord> partial_;
};

/// splitmix64; used to derive per-k evaluation seeds from a run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace bbleed

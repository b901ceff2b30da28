#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bbleed/coordinator.hpp"
#include "bbleed/types.hpp"

namespace bbleed {

/// All knobs of one experiment; JSON config keys mirror CLI flags.
struct RunConfig {
    std::vector<int> space;                  // resolved candidate list
    std::string method = "vanilla";          // standard | vanilla | early-stop
    std::string engine = "auto";             // auto | recursive | scheduled
    std::string evaluator = "square-wave";   // square-wave | laplacian | kmeans-db | nmfk-silhouette
    std::optional<double> select;            // defaulted per evaluator when absent
    std::optional<double> stop;              // required for early-stop
    std::string variant = "t4";
    std::string order = "pre";
    int ranks = 1;
    int threads = 1;
    std::uint64_t seed = 0;
    bool deterministic = false;              // single-stepped scheduler
    std::string out_dir;

    // evaluator parameters
    int k0 = 8;                              // square-wave / laplacian
    double width = 2.0;                      // laplacian
    std::string data_path;                   // kmeans-db / nmfk-silhouette input
    int restarts = 8;                        // nmfk restarts
    int nmf_max_iters = 500;
    double nmf_tol = 1e-6;
    int kmeans_init = 4;
    int kmeans_max_iters = 100;

    // sweep / compare / gen-data parameters
    std::vector<int> k_true;                 // swept true k (or k0 for square-wave)
    int repeats = 1;
    std::vector<std::string> methods = {"standard", "vanilla", "early-stop"};
    std::vector<std::string> orders = {"pre", "post"};
    std::string gen_mode = "clusters";       // clusters | nmf
    int samples_per_cluster = 100;
    int dim = 2;
    double cluster_std = 0.5;
    double noise_fraction = 0.05;
    int rows = 120;
    int cols = 130;
    double noise_level = 0.01;
};

/// Parse "a:b" (inclusive) or a comma-separated list.
std::vector<int> parse_space(const std::string& text);

RunConfig load_config_file(const std::filesystem::path& path);
/// Stable textual identity of a run (config + seed), used as run_id.
std::string run_id(const RunConfig& config);

struct RunOutput {
    std::optional<int> k_optimal;
    int visited = 0;
    int space_size = 0;
    std::vector<ScoreRecord> records;        // evaluation order
    std::map<int, int> record_resource;      // k -> resource id
    std::map<int, int> skipped_by;           // pruned k -> responsible bound
    std::vector<Event> events;               // scheduled engine only
    bool scheduled = false;

    double visited_fraction() const {
        return space_size == 0 ? 0.0 : static_cast<double>(visited) / space_size;
    }
    /// k_optimal when present, else the direction-best scoring record.
    std::optional<int> k_found(Direction direction) const;
};

/// Execute one search per the config. Standard always scans linearly;
/// vanilla/early-stop use the recursive engine when ranks and threads are
/// both 1 (engine=auto), the scheduled coordinator otherwise.
RunOutput execute_search(const RunConfig& config);

/// Resolved thresholds (per-evaluator defaults applied).
Thresholds resolve_thresholds(const RunConfig& config);
Direction evaluator_direction(const std::string& evaluator);

// Subcommand drivers; return a process exit code (0 ok, 2 config error,
// 3 evaluator error).
int cmd_search(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_compare(const RunConfig& config);
int cmd_gen_data(const RunConfig& config);

}  // namespace bbleed

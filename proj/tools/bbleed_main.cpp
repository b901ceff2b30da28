#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bbleed/runner.hpp"

namespace {

// Flags mirror config-file keys one to one; a flag given on the command
// line overrides the corresponding config value.
void add_common_flags(CLI::App* cmd, bbleed::RunConfig& config, std::string& space_text,
                      std::string& k_true_text, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--space", space_text, "k space as a:b (inclusive) or k1,k2,...");
    cmd->add_option("--method", config.method, "standard | vanilla | early-stop");
    cmd->add_option("--engine", config.engine, "auto | recursive | scheduled");
    cmd->add_option("--evaluator", config.evaluator,
                    "square-wave | laplacian | kmeans-db | nmfk-silhouette");
    cmd->add_option("--select", [&config](const CLI::results_t& r) {
        config.select = std::stod(r[0]);
        return true;
    }, "select threshold");
    cmd->add_option("--stop", [&config](const CLI::results_t& r) {
        config.stop = std::stod(r[0]);
        return true;
    }, "stop bound (early-stop)");
    cmd->add_option("--variant", config.variant, "schedule variant t1|t2|t3|t4");
    cmd->add_option("--order", config.order, "traversal order in|pre|post");
    cmd->add_option("--ranks", config.ranks, "simulated ranks");
    cmd->add_option("--threads", config.threads, "threads per rank");
    cmd->add_option("--seed", config.seed, "run seed");
    cmd->add_flag("--deterministic", config.deterministic,
                  "single-stepped scheduler (reproducible)");
    cmd->add_option("--out", config.out_dir, "output directory");
    cmd->add_option("--k0", config.k0, "square-wave / laplacian optimum");
    cmd->add_option("--width", config.width, "laplacian width");
    cmd->add_option("--data", config.data_path, "input matrix (.bbmx or .csv)");
    cmd->add_option("--restarts", config.restarts, "NMF restarts per k");
    cmd->add_option("--nmf-max-iters", config.nmf_max_iters, "NMF iteration cap");
    cmd->add_option("--nmf-tol", config.nmf_tol, "NMF relative-error change tolerance");
    cmd->add_option("--kmeans-init", config.kmeans_init, "k-means starts per fit");
    cmd->add_option("--kmeans-max-iters", config.kmeans_max_iters, "Lloyd iteration cap");
    cmd->add_option("--k-true", k_true_text, "true k list for sweeps, a:b or csv");
    cmd->add_option("--repeats", config.repeats, "repeats per sweep cell");
    cmd->add_option("--methods", config.methods, "methods swept")->delimiter(',');
    cmd->add_option("--orders", config.orders, "orders swept")->delimiter(',');
    cmd->add_option("--gen-mode", config.gen_mode, "clusters | nmf");
    cmd->add_option("--samples-per-cluster", config.samples_per_cluster, "points per cluster");
    cmd->add_option("--dim", config.dim, "point dimension");
    cmd->add_option("--cluster-std", config.cluster_std, "cluster standard deviation");
    cmd->add_option("--noise-fraction", config.noise_fraction, "background noise fraction");
    cmd->add_option("--rows", config.rows, "matrix rows");
    cmd->add_option("--cols", config.cols, "matrix cols");
    cmd->add_option("--noise-level", config.noise_level, "matrix noise level");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Binary Bleed k-search toolkit"};
    app.require_subcommand(1);

    struct SubState {
        bbleed::RunConfig config;
        std::string space_text, k_true_text, config_path;
    };
    SubState search_state, sweep_state, compare_state, gen_state;

    auto* search = app.add_subcommand("search", "run one k search");
    add_common_flags(search, search_state.config, search_state.space_text,
                     search_state.k_true_text, search_state.config_path);
    auto* sweep = app.add_subcommand("sweep", "sweep true k values and compare methods");
    add_common_flags(sweep, sweep_state.config, sweep_state.space_text,
                     sweep_state.k_true_text, sweep_state.config_path);
    auto* compare = app.add_subcommand("compare", "visited fractions per method/order");
    add_common_flags(compare, compare_state.config, compare_state.space_text,
                     compare_state.k_true_text, compare_state.config_path);
    auto* gen = app.add_subcommand("gen-data", "generate synthetic datasets");
    add_common_flags(gen, gen_state.config, gen_state.space_text, gen_state.k_true_text,
                     gen_state.config_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto finalize = [](CLI::App* cmd, SubState& state) {
        // Start from the config file (if any), then re-apply flag overrides.
        if (!state.config_path.empty()) {
            // Flags already parsed into state.config; fill everything the
            // command line did not touch from the file.
            bbleed::RunConfig merged = bbleed::load_config_file(state.config_path);
            if (cmd->count("--method")) merged.method = state.config.method;
            if (cmd->count("--engine")) merged.engine = state.config.engine;
            if (cmd->count("--evaluator")) merged.evaluator = state.config.evaluator;
            if (cmd->count("--select")) merged.select = state.config.select;
            if (cmd->count("--stop")) merged.stop = state.config.stop;
            if (cmd->count("--variant")) merged.variant = state.config.variant;
            if (cmd->count("--order")) merged.order = state.config.order;
            if (cmd->count("--ranks")) merged.ranks = state.config.ranks;
            if (cmd->count("--threads")) merged.threads = state.config.threads;
            if (cmd->count("--seed")) merged.seed = state.config.seed;
            if (cmd->count("--deterministic")) merged.deterministic = state.config.deterministic;
            if (cmd->count("--out")) merged.out_dir = state.config.out_dir;
            if (cmd->count("--k0")) merged.k0 = state.config.k0;
            if (cmd->count("--width")) merged.width = state.config.width;
            if (cmd->count("--data")) merged.data_path = state.config.data_path;
            if (cmd->count("--restarts")) merged.restarts = state.config.restarts;
            if (cmd->count("--nmf-max-iters")) merged.nmf_max_iters = state.config.nmf_max_iters;
            if (cmd->count("--nmf-tol")) merged.nmf_tol = state.config.nmf_tol;
            if (cmd->count("--kmeans-init")) merged.kmeans_init = state.config.kmeans_init;
            if (cmd->count("--kmeans-max-iters"))
                merged.kmeans_max_iters = state.config.kmeans_max_iters;
            if (cmd->count("--repeats")) merged.repeats = state.config.repeats;
            if (cmd->count("--methods")) merged.methods = state.config.methods;
            if (cmd->count("--orders")) merged.orders = state.config.orders;
            if (cmd->count("--gen-mode")) merged.gen_mode = state.config.gen_mode;
            if (cmd->count("--samples-per-cluster"))
                merged.samples_per_cluster = state.config.samples_per_cluster;
            if (cmd->count("--dim")) merged.dim = state.config.dim;
            if (cmd->count("--cluster-std")) merged.cluster_std = state.config.cluster_std;
            if (cmd->count("--noise-fraction"))
                merged.noise_fraction = state.config.noise_fraction;
            if (cmd->count("--rows")) merged.rows = state.config.rows;
            if (cmd->count("--cols")) merged.cols = state.config.cols;
            if (cmd->count("--noise-level")) merged.noise_level = state.config.noise_level;
            state.config = merged;
        }
        if (!state.space_text.empty()) state.config.space = bbleed::parse_space(state.space_text);
        if (!state.k_true_text.empty())
            state.config.k_true = bbleed::parse_space(state.k_true_text);
    };

    try {
        if (search->parsed()) {
            finalize(search, search_state);
            return bbleed::cmd_search(search_state.config);
        }
        if (sweep->parsed()) {
            finalize(sweep, sweep_state);
            return bbleed::cmd_sweep(sweep_state.config);
        }
        if (compare->parsed()) {
            finalize(compare, compare_state);
            return bbleed::cmd_compare(compare_state.config);
        }
        if (gen->parsed()) {
            finalize(gen, gen_state);
            return bbleed::cmd_gen_data(gen_state.config);
        }
    } catch (const bbleed::EvaluatorFailure& e) {
        std::cerr << "evaluator error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "bbleed/datagen.hpp"
#include "bbleed/models.hpp"
#include "bbleed/runner.hpp"
#include "bbleed/search.hpp"

namespace bbleed {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

std::vector<int> parse_space(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty space specification");
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 2) throw std::invalid_argument("space range must be a:b");
        const int lo = std::stoi(parts[0]);
        const int hi = std::stoi(parts[1]);
        if (lo > hi) throw std::invalid_argument("space range is empty");
        std::vector<int> out;
        for (int k = lo; k <= hi; ++k) out.push_back(k);
        return out;
    }
    std::vector<int> out;
    for (const auto& item : split(text, ',')) out.push_back(std::stoi(item));
    return out;
}

namespace {

std::vector<int> int_list_field(const json& j) {
    if (j.is_string()) return parse_space(j.get<std::string>());
    return j.get<std::vector<int>>();
}

}  // namespace

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path.string());
    json j = json::parse(in);
    RunConfig c;
    if (j.contains("space")) c.space = int_list_field(j["space"]);
    if (j.contains("method")) c.method = j["method"];
    if (j.contains("engine")) c.engine = j["engine"];
    if (j.contains("evaluator")) c.evaluator = j["evaluator"];
    if (j.contains("select")) c.select = j["select"].get<double>();
    if (j.contains("stop")) c.stop = j["stop"].get<double>();
    if (j.contains("variant")) c.variant = j["variant"];
    if (j.contains("order")) c.order = j["order"];
    if (j.contains("ranks")) c.ranks = j["ranks"];
    if (j.contains("threads")) c.threads = j["threads"];
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("deterministic")) c.deterministic = j["deterministic"];
    if (j.contains("out")) c.out_dir = j["out"];
    if (j.contains("k0")) c.k0 = j["k0"];
    if (j.contains("width")) c.width = j["width"];
    if (j.contains("data")) c.data_path = j["data"];
    if (j.contains("restarts")) c.restarts = j["restarts"];
    if (j.contains("nmf_max_iters")) c.nmf_max_iters = j["nmf_max_iters"];
    if (j.contains("nmf_tol")) c.nmf_tol = j["nmf_tol"];
    if (j.contains("kmeans_init")) c.kmeans_init = j["kmeans_init"];
    if (j.contains("kmeans_max_iters")) c.kmeans_max_iters = j["kmeans_max_iters"];
    if (j.contains("k_true")) c.k_true = int_list_field(j["k_true"]);
    if (j.contains("repeats")) c.repeats = j["repeats"];
    if (j.contains("methods")) c.methods = j["methods"].get<std::vector<std::string>>();
    if (j.contains("orders")) c.orders = j["orders"].get<std::vector<std::string>>();
    if (j.contains("gen_mode")) c.gen_mode = j["gen_mode"];
    if (j.contains("samples_per_cluster")) c.samples_per_cluster = j["samples_per_cluster"];
    if (j.contains("dim")) c.dim = j["dim"];
    if (j.contains("cluster_std")) c.cluster_std = j["cluster_std"];
    if (j.contains("noise_fraction")) c.noise_fraction = j["noise_fraction"];
    if (j.contains("rows")) c.rows = j["rows"];
    if (j.contains("cols")) c.cols = j["cols"];
    if (j.contains("noise_level")) c.noise_level = j["noise_level"];
    return c;
}

namespace {

json config_echo(const RunConfig& c) {
    json j;
    j["space"] = c.space;
    j["method"] = c.method;
    j["engine"] = c.engine;
    j["evaluator"] = c.evaluator;
    if (c.select) j["select"] = *c.select;
    if (c.stop) j["stop"] = *c.stop;
    j["variant"] = c.variant;
    j["order"] = c.order;
    j["ranks"] = c.ranks;
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    j["deterministic"] = c.deterministic;
    j["k0"] = c.k0;
    j["width"] = c.width;
    if (!c.data_path.empty()) j["data"] = c.data_path;
    j["restarts"] = c.restarts;
    return j;
}

}  // namespace

std::string run_id(const RunConfig& config) {
    const std::string text = config_echo(config).dump();
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

Direction evaluator_direction(const std::string& evaluator) {
    if (evaluator == "kmeans-db") return Direction::Minimize;
    if (evaluator == "square-wave" || evaluator == "laplacian" ||
        evaluator == "nmfk-silhouette")
        return Direction::Maximize;
    throw std::invalid_argument("unknown evaluator: " + evaluator);
}

namespace {

double default_select(const std::string& evaluator) {
    if (evaluator == "nmfk-silhouette") return 0.7;
    return 0.5;
}

double default_stop(const std::string& evaluator) {
    if (evaluator == "kmeans-db") return 1.2;    // DB above this never recovers
    if (evaluator == "nmfk-silhouette") return 0.2;
    if (evaluator == "laplacian") return 0.25;
    return 0.5;                                   // square-wave: any 0 score stops
}

}  // namespace

Thresholds resolve_thresholds(const RunConfig& config) {
    const Direction direction = evaluator_direction(config.evaluator);
    const double select = config.select ? *config.select : default_select(config.evaluator);
    std::optional<double> stop;
    if (config.method == "early-stop")
        stop = config.stop ? *config.stop : default_stop(config.evaluator);
    else if (config.method != "standard" && config.method != "vanilla")
        throw std::invalid_argument("unknown method: " + config.method);
    return Thresholds(select, stop, direction);
}

namespace {

DenseMatrix load_matrix(const std::string& path) {
    if (path.empty())
        throw std::invalid_argument("this evaluator requires --data FILE (BBMX or CSV)");
    const std::filesystem::path p(path);
    if (p.extension() == ".csv") return read_csv(p);
    return read_bbmx(p);
}

Evaluator build_evaluator(const RunConfig& config) {
    if (config.evaluator == "square-wave")
        return make_square_wave_evaluator({config.k0});
    if (config.evaluator == "laplacian")
        return make_laplacian_evaluator(config.k0, config.width);
    if (config.evaluator == "kmeans-db")
        return make_kmeans_db_evaluator(load_matrix(config.data_path), config.kmeans_init,
                                        config.kmeans_max_iters);
    if (config.evaluator == "nmfk-silhouette")
        return make_nmfk_silhouette_evaluator(load_matrix(config.data_path), config.restarts,
                                              {config.nmf_max_iters, config.nmf_tol});
    throw std::invalid_argument("unknown evaluator: " + config.evaluator);
}

RunOutput from_serial(const SearchResult& result, const Thresholds& thresholds) {
    RunOutput out;
    out.k_optimal = result.k_optimal;
    out.visited = static_cast<int>(result.records.size());
    out.space_size = result.space_size;
    out.records = result.records;
    for (const auto& r : result.records) out.record_resource[r.k] = 0;

    // Final pruning window: every never-visited k lies outside it.
    std::optional<int> k_min, k_max;
    for (const auto& r : result.records) {
        if (thresholds.passes_select(r.score) && (!k_min || r.k > *k_min)) k_min = r.k;
        if (thresholds.crosses_stop(r.score) && (!k_max || r.k < *k_max)) k_max = r.k;
    }
    for (int k : result.pruned) {
        if (k_min && k <= *k_min)
            out.skipped_by[k] = *k_min;
        else if (k_max && k >= *k_max)
            out.skipped_by[k] = *k_max;
    }
    return out;
}

RunOutput from_parallel(ParallelResult result) {
    RunOutput out;
    out.scheduled = true;
    out.k_optimal = result.k_optimal;
    out.visited = result.total_visited;
    out.space_size = result.space_size;
    for (const auto& [rank, recs] : result.per_resource_records)
        for (const auto& r : recs) {
            out.records.push_back(r);
            out.record_resource[r.k] = rank;
        }
    std::sort(out.records.begin(), out.records.end(),
              [](const auto& a, const auto& b) { return a.visit_index < b.visit_index; });
    out.skipped_by = std::move(result.skipped_by);
    out.events = std::move(result.events);
    return out;
}

}  // namespace

std::optional<int> RunOutput::k_found(Direction direction) const {
    if (k_optimal) return k_optimal;
    if (records.empty()) return std::nullopt;
    const ScoreRecord* best = &records.front();
    for (const auto& r : records) {
        const bool better = direction == Direction::Maximize ? r.score > best->score
                                                             : r.score < best->score;
        if (better) best = &r;
    }
    return best->k;
}

RunOutput execute_search(const RunConfig& config) {
    if (config.space.empty()) throw std::invalid_argument("no k space configured");
    const KSpace space{config.space};
    const Thresholds thresholds = resolve_thresholds(config);
    const Evaluator evaluator = build_evaluator(config);

    if (config.method == "standard")
        return from_serial(linear_grid_search(space, evaluator, thresholds, config.seed),
                           thresholds);

    const bool recursive = config.engine == "recursive" ||
                           (config.engine == "auto" && config.ranks == 1 && config.threads == 1);
    if (config.engine != "auto" && config.engine != "recursive" && config.engine != "scheduled")
        throw std::invalid_argument("unknown engine: " + config.engine);
    if (recursive) {
        if (config.ranks != 1 || config.threads != 1)
            throw std::invalid_argument("engine=recursive runs on a single rank and thread");
        return from_serial(binary_bleed_serial(space, evaluator, thresholds, config.seed),
                           thresholds);
    }

    RankConfig rank_config{config.ranks, config.threads, parse_variant(config.variant),
                           parse_order(config.order)};
    const SchedulerMode mode =
        config.deterministic ? SchedulerMode::RoundRobin : SchedulerMode::FreeRunning;
    return from_parallel(
        run_parallel(space, evaluator, thresholds, rank_config, config.seed, mode));
}

namespace {

void write_result_json(const RunConfig& config, const RunOutput& out,
                       const std::filesystem::path& path) {
    json records = json::array();
    for (const auto& r : out.records)
        records.push_back({{"k", r.k},
                           {"score", r.score},
                           {"visit_index", r.visit_index},
                           {"resource", out.record_resource.at(r.k)}});
    json pruned = json::array();
    for (const auto& [k, by] : out.skipped_by) pruned.push_back({{"k", k}, {"skipped_by", by}});
    json j;
    j["schema_version"] = 1;
    j["run_id"] = run_id(config);
    j["config"] = config_echo(config);
    j["k_optimal"] = out.k_optimal ? json(*out.k_optimal) : json(nullptr);
    j["visited"] = out.visited;
    j["space_size"] = out.space_size;
    j["visited_fraction"] = out.visited_fraction();
    j["records"] = records;
    j["pruned"] = pruned;
    std::ofstream f(path);
    f << j.dump(2) << '\n';
}

void write_records_csv(const RunConfig& config, const RunOutput& out,
                       const std::filesystem::path& path) {
    std::ofstream f(path);
    f << "run_id,k,score,visit_index,resource,skipped_by\n";
    const std::string id = run_id(config);
    std::map<int, const ScoreRecord*> by_k;
    for (const auto& r : out.records) by_k[r.k] = &r;
    for (int k : config.space) {
        f << id << ',' << k << ',';
        if (auto it = by_k.find(k); it != by_k.end()) {
            f << fmt_double(it->second->score) << ',' << it->second->visit_index << ','
              << out.record_resource.at(k) << ',';
        } else {
            f << ",,";
            if (auto res = out.record_resource.find(k); res != out.record_resource.end())
                f << res->second;
            f << ',';
            if (auto sk = out.skipped_by.find(k); sk != out.skipped_by.end()) f << sk->second;
        }
        f << '\n';
    }
}

std::filesystem::path ensure_out_dir(const RunConfig& config) {
    std::filesystem::path dir = config.out_dir.empty() ? "." : config.out_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

int cmd_search(const RunConfig& config) {
    const auto dir = ensure_out_dir(config);
    RunOutput out;
    try {
        out = execute_search(config);
    } catch (const EvaluatorFailure& e) {
        std::cerr << "evaluator error: " << e.what() << "\n";
        RunOutput partial;
        partial.records = e.partial_records();
        partial.visited = static_cast<int>(partial.records.size());
        partial.space_size = static_cast<int>(config.space.size());
        for (const auto& r : partial.records) partial.record_resource[r.k] = 0;
        write_records_csv(config, partial, dir / "records.csv");
        return 3;
    }
    write_result_json(config, out, dir / "result.json");
    write_records_csv(config, out, dir / "records.csv");
    if (out.scheduled) write_events_jsonl(out.events, (dir / "events.jsonl").string());
    std::cout << "k_optimal="
              << (out.k_optimal ? std::to_string(*out.k_optimal) : std::string("none"))
              << " visited=" << out.visited << "/" << out.space_size << " ("
              << fmt_double(out.visited_fraction()) << ")\n";
    return 0;
}

namespace {

struct SweepRow {
    int k_true = 0;
    std::string method;
    std::string order;
    int repeat = 0;
    std::optional<int> k_found;
    int visited = 0;
    double fraction = 0.0;
    bool correct = false;
};

struct SweepAggregate {
    std::string method;
    std::string order;
    double rmse = 0.0;
    double mean_fraction = 0.0;
    double within_1 = 0.0;
};

/// One sweep cell: configure data + evaluator for a given true k and run.
RunOutput run_sweep_cell(const RunConfig& base, int k_true, int repeat,
                         const std::string& method, const std::string& order) {
    RunConfig c = base;
    c.method = method;
    c.order = order;
    c.engine = method == "standard" ? "auto" : "scheduled";
    c.seed = mix_seed(base.seed, static_cast<std::uint64_t>(k_true) * 1000 +
                                     static_cast<std::uint64_t>(repeat));
    if (c.evaluator == "square-wave" || c.evaluator == "laplacian") {
        // Score stays high through k_true and drops after it.
        c.k0 = c.evaluator == "square-wave" ? k_true + 1 : k_true;
        return execute_search(c);
    }
    const std::uint64_t data_seed = c.seed;
    if (c.evaluator == "kmeans-db") {
        ClusterGenSpec spec{k_true, c.samples_per_cluster, c.dim, c.cluster_std,
                            c.noise_fraction, data_seed};
        auto [data, labels] = gen_gaussian_clusters(spec);
        const Thresholds thresholds = resolve_thresholds(c);
        const Evaluator evaluator =
            make_kmeans_db_evaluator(std::move(data), c.kmeans_init, c.kmeans_max_iters);
        RunConfig run = c;
        if (run.method == "standard")
            return from_serial(
                linear_grid_search(KSpace{run.space}, evaluator, thresholds, run.seed),
                thresholds);
        RankConfig rc{run.ranks, run.threads, parse_variant(run.variant),
                      parse_order(run.order)};
        return from_parallel(run_parallel(KSpace{run.space}, evaluator, thresholds, rc,
                                          run.seed, SchedulerMode::RoundRobin));
    }
    if (c.evaluator == "nmfk-silhouette") {
        MatrixGenSpec spec{k_true, c.rows, c.cols, c.noise_level, data_seed};
        auto data = gen_nmf_matrix(spec);
        const Thresholds thresholds = resolve_thresholds(c);
        const Evaluator evaluator = make_nmfk_silhouette_evaluator(
            std::move(data), c.restarts, {c.nmf_max_iters, c.nmf_tol});
        if (c.method == "standard")
            return from_serial(linear_grid_search(KSpace{c.space}, evaluator, thresholds, c.seed),
                               thresholds);
        RankConfig rc{c.ranks, c.threads, parse_variant(c.variant), parse_order(c.order)};
        return from_parallel(run_parallel(KSpace{c.space}, evaluator, thresholds, rc, c.seed,
                                          SchedulerMode::RoundRobin));
    }
    throw std::invalid_argument("unknown evaluator: " + c.evaluator);
}

std::pair<std::vector<SweepRow>, std::vector<SweepAggregate>> run_sweep_grid(
    const RunConfig& config) {
    if (config.k_true.empty()) throw std::invalid_argument("sweep requires --k-true");
    if (config.space.empty()) throw std::invalid_argument("sweep requires --space");
    const Direction direction = evaluator_direction(config.evaluator);

    std::vector<SweepRow> rows;
    for (int k_true : config.k_true)
        for (int rep = 0; rep < config.repeats; ++rep)
            for (const auto& method : config.methods) {
                const std::vector<std::string> orders =
                    method == "standard" ? std::vector<std::string>{"-"} : config.orders;
                for (const auto& order : orders) {
                    const auto out = run_sweep_cell(
                        config, k_true, rep, method, order == "-" ? "pre" : order);
                    SweepRow row;
                    row.k_true = k_true;
                    row.method = method;
                    row.order = order;
                    row.repeat = rep;
                    row.k_found = out.k_found(direction);
                    row.visited = out.visited;
                    row.fraction = out.visited_fraction();
                    row.correct = row.k_found && *row.k_found == k_true;
                    rows.push_back(row);
                }
            }

    std::vector<SweepAggregate> aggregates;
    for (const auto& method : config.methods) {
        const std::vector<std::string> orders =
            method == "standard" ? std::vector<std::string>{"-"} : config.orders;
        for (const auto& order : orders) {
            SweepAggregate agg;
            agg.method = method;
            agg.order = order;
            double se = 0.0, frac = 0.0, hits = 0.0;
            int n = 0;
            for (const auto& row : rows) {
                if (row.method != method || row.order != order) continue;
                ++n;
                const int found = row.k_found ? *row.k_found : 0;
                se += static_cast<double>(found - row.k_true) * (found - row.k_true);
                frac += row.fraction;
                hits += row.k_found && std::abs(*row.k_found - row.k_true) <= 1 ? 1.0 : 0.0;
            }
            if (n == 0) continue;
            agg.rmse = std::sqrt(se / n);
            agg.mean_fraction = frac / n;
            agg.within_1 = hits / n;
            aggregates.push_back(agg);
        }
    }
    return {rows, aggregates};
}

void write_summary_csv(const std::vector<SweepRow>& rows,
                       const std::vector<SweepAggregate>& aggregates,
                       const std::filesystem::path& path) {
    std::ofstream f(path);
    f << "row,k_true,method,order,repeat,k_found,visited,visited_fraction,correct,"
         "rmse,mean_visited_fraction,within_1_rate\n";
    for (const auto& r : rows) {
        f << "run," << r.k_true << ',' << r.method << ',' << r.order << ',' << r.repeat << ',';
        if (r.k_found) f << *r.k_found;
        f << ',' << r.visited << ',' << fmt_double(r.fraction) << ','
          << (r.correct ? "true" : "false") << ",,,\n";
    }
    for (const auto& a : aggregates)
        f << "aggregate,," << a.method << ',' << a.order << ",,,,,," << fmt_double(a.rmse)
          << ',' << fmt_double(a.mean_fraction) << ',' << fmt_double(a.within_1) << '\n';
}

}  // namespace

int cmd_sweep(const RunConfig& config) {
    const auto dir = ensure_out_dir(config);
    const auto [rows, aggregates] = run_sweep_grid(config);
    write_summary_csv(rows, aggregates, dir / "summary.csv");
    for (const auto& a : aggregates)
        std::cout << a.method << '/' << a.order << ": rmse=" << fmt_double(a.rmse)
                  << " mean_visited_fraction=" << fmt_double(a.mean_fraction)
                  << " within_1=" << fmt_double(a.within_1) << "\n";
    return 0;
}

int cmd_compare(const RunConfig& config) {
    RunConfig c = config;
    c.methods = {"standard", "vanilla", "early-stop"};
    if (c.k_true.empty()) c.k_true = c.space;  // sweep the whole space by default
    const auto dir = ensure_out_dir(c);
    const auto [rows, aggregates] = run_sweep_grid(c);
    write_summary_csv(rows, aggregates, dir / "summary.csv");
    std::cout << "method,order,mean_visited_fraction\n";
    for (const auto& a : aggregates)
        std::cout << a.method << ',' << a.order << ',' << fmt_double(a.mean_fraction) << "\n";
    return 0;
}

int cmd_gen_data(const RunConfig& config) {
    const auto dir = ensure_out_dir(config);
    if (config.k_true.empty())
        throw std::invalid_argument("gen-data requires --k-true");
    const int k_true = config.k_true.front();
    json manifest;
    manifest["k_true"] = k_true;
    manifest["seed"] = config.seed;
    manifest["mode"] = config.gen_mode;

    if (config.gen_mode == "clusters") {
        ClusterGenSpec spec{k_true, config.samples_per_cluster, config.dim, config.cluster_std,
                            config.noise_fraction, config.seed};
        auto [data, labels] = gen_gaussian_clusters(spec);
        write_bbmx(data, dir / "data.bbmx");
        write_csv(data, dir / "data.csv");
        std::ofstream lf(dir / "labels.csv");
        lf << "sample,label\n";
        for (std::size_t i = 0; i < labels.assignments.size(); ++i)
            lf << i << ',' << labels.assignments[i] << '\n';
        manifest["samples_per_cluster"] = spec.samples_per_cluster;
        manifest["dim"] = spec.dim;
        manifest["cluster_std"] = spec.cluster_std;
        manifest["noise_fraction"] = spec.noise_fraction;
    } else if (config.gen_mode == "nmf") {
        MatrixGenSpec spec{k_true, config.rows, config.cols, config.noise_level, config.seed};
        auto data = gen_nmf_matrix(spec);
        write_bbmx(data, dir / "data.bbmx");
        write_csv(data, dir / "data.csv");
        manifest["rows"] = spec.rows;
        manifest["cols"] = spec.cols;
        manifest["noise_level"] = spec.noise_level;
    } else {
        throw std::invalid_argument("gen-data mode must be clusters or nmf");
    }
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << '\n';
    std::cout << "wrote " << (dir / "data.bbmx").string() << "\n";
    return 0;
}

}  // namespace bbleed

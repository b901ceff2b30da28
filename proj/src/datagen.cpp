#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "bbleed/datagen.hpp"
#include "bbleed/types.hpp"

namespace bbleed {

namespace {

void validate(const ClusterGenSpec& spec) {
    if (spec.k_true < 1) throw std::invalid_argument("gen_gaussian_clusters: k_true must be >= 1");
    if (spec.samples_per_cluster < 1)
        throw std::invalid_argument("gen_gaussian_clusters: samples_per_cluster must be >= 1");
    if (spec.dim < 1) throw std::invalid_argument("gen_gaussian_clusters: dim must be >= 1");
    if (spec.cluster_std <= 0.0)
        throw std::invalid_argument("gen_gaussian_clusters: cluster_std must be > 0");
    if (spec.noise_fraction < 0.0 || spec.noise_fraction >= 1.0)
        throw std::invalid_argument("gen_gaussian_clusters: noise_fraction must be in [0, 1)");
}

}  // namespace

std::pair<DenseMatrix, Labeling> gen_gaussian_clusters(const ClusterGenSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const double separation = 6.0 * spec.cluster_std;
    // Domain scales with the cluster count so the separation stays feasible.
    const double side =
        separation * (std::pow(static_cast<double>(spec.k_true), 1.0 / spec.dim) + 1.0) * 1.25;
    std::uniform_real_distribution<double> in_domain(0.0, side);

    constexpr int kRetryCap = 10000;
    std::vector<std::vector<double>> centers;
    for (int c = 0; c < spec.k_true; ++c) {
        bool placed = false;
        for (int attempt = 0; attempt < kRetryCap && !placed; ++attempt) {
            std::vector<double> cand(static_cast<std::size_t>(spec.dim));
            for (double& v : cand) v = in_domain(rng);
            placed = std::none_of(centers.begin(), centers.end(), [&](const auto& other) {
                double d2 = 0.0;
                for (std::size_t i = 0; i < cand.size(); ++i) {
                    const double d = cand[i] - other[i];
                    d2 += d * d;
                }
                return d2 < separation * separation;
            });
            if (placed) centers.push_back(std::move(cand));
        }
        if (!placed)
            throw std::runtime_error(
                "gen_gaussian_clusters: could not separate centers; use a larger domain "
                "(more dimensions or smaller k_true/cluster_std)");
    }

    const std::size_t n = static_cast<std::size_t>(spec.k_true) *
                          static_cast<std::size_t>(spec.samples_per_cluster);
    DenseMatrix data(n, static_cast<std::size_t>(spec.dim));
    Labeling labels;
    labels.k = spec.k_true;
    labels.assignments.resize(n);

    std::size_t row = 0;
    for (int c = 0; c < spec.k_true; ++c) {
        for (int s = 0; s < spec.samples_per_cluster; ++s, ++row) {
            labels.assignments[row] = c;
            for (int d = 0; d < spec.dim; ++d)
                data(row, static_cast<std::size_t>(d)) =
                    centers[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)] +
                    spec.cluster_std * normal(rng);
        }
    }

    // Replace a deterministic subset with uniform background; generator
    // labels are kept so downstream accuracy metrics stay well defined.
    const auto n_noise = static_cast<std::size_t>(spec.noise_fraction * static_cast<double>(n));
    if (n_noise > 0) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < n_noise; ++i)
            for (int d = 0; d < spec.dim; ++d)
                data(idx[i], static_cast<std::size_t>(d)) = in_domain(rng);
    }

    return {std::move(data), std::move(labels)};
}

DenseMatrix gen_nmf_matrix(const MatrixGenSpec& spec) {
    if (spec.k_true < 1) throw std::invalid_argument("gen_nmf_matrix: k_true must be >= 1");
    if (spec.rows < 1 || spec.cols < 1)
        throw std::invalid_argument("gen_nmf_matrix: rows and cols must be >= 1");
    if (spec.k_true > std::min(spec.rows, spec.cols))
        throw std::invalid_argument("gen_nmf_matrix: k_true must be <= min(rows, cols)");
    if (spec.noise_level < 0.0)
        throw std::invalid_argument("gen_nmf_matrix: noise_level must be >= 0");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const auto rows = static_cast<std::size_t>(spec.rows);
    const auto cols = static_cast<std::size_t>(spec.cols);
    const auto k = static_cast<std::size_t>(spec.k_true);

    std::vector<double> w(rows * k), h(k * cols);
    for (double& v : w) v = std::abs(normal(rng));
    for (double& v : h) v = std::abs(normal(rng));

    DenseMatrix x(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < k; ++i) acc += w[r * k + i] * h[i * cols + c];
            x(r, c) = acc;
        }
    if (spec.noise_level > 0.0)
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                x(r, c) = std::max(0.0, x(r, c) + spec.noise_level * normal(rng));
    return x;
}

}  // namespace bbleed

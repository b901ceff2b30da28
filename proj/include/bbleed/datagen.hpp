#pragma once

#include <cstdint>
#include <utility>

#include "bbleed/matrix.hpp"
#include "bbleed/models.hpp"

namespace bbleed {

/// Gaussian cluster point set with a known true cluster count.
struct ClusterGenSpec {
    int k_true = 1;
    int samples_per_cluster = 100;
    int dim = 2;
    double cluster_std = 0.5;
    double noise_fraction = 0.05;  // fraction of points replaced by uniform background
    std::uint64_t seed = 0;
};

/// Low-rank nonnegative matrix with a known true rank.
struct MatrixGenSpec {
    int k_true = 1;
    int rows = 100;
    int cols = 110;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
};

/// Draws k_true centers with pairwise separation >= 6 * cluster_std
/// (rejection sampling), isotropic Gaussian points around each, then
/// replaces noise_fraction of the points with uniform background draws.
/// true_labels keep the generator assignment of replaced points.
std::pair<DenseMatrix, Labeling> gen_gaussian_clusters(const ClusterGenSpec& spec);

/// X = W * H + noise, absolute-valued Gaussian factors, noise clipped at 0.
DenseMatrix gen_nmf_matrix(const MatrixGenSpec& spec);

}  // namespace bbleed

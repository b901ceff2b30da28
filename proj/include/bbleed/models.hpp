#pragma once

#include <cstdint>
#include <vector>

#include "bbleed/matrix.hpp"
#include "bbleed/types.hpp"

namespace bbleed {

/// Cluster assignment, one id per sample, ids in [0, k).
struct Labeling {
    std::vector<int> assignments;
    int k = 0;
};

// --- synthetic analytic scorers -------------------------------------------

struct SquareWaveSpec {
    int k0 = 1;
};

/// 1 for k < k0, 0 for k >= k0.
double square_wave_score(int k, const SquareWaveSpec& spec);

/// exp(-|k - k0| / width); peak 1 at k0.
double laplacian_peak_score(int k, int k0, double width);

// --- K-means + Davies-Bouldin ---------------------------------------------

struct KMeansResult {
    DenseMatrix centroids;  // k x dim
    Labeling labels;
    double inertia = 0.0;
};

/// Lloyd iterations from seeded k-means++ initialization until the
/// assignment fixpoint or max_iters. n_init independent starts, best
/// inertia kept. An emptied cluster is re-seeded from the point farthest
/// from its assigned centroid.
KMeansResult kmeans_fit(const DenseMatrix& data, int k, std::uint64_t seed,
                        int max_iters = 100, int n_init = 1);

/// Standard Davies-Bouldin index: mean over clusters of the worst pairwise
/// (s_i + s_j) / d(c_i, c_j), with s the mean distance to centroid.
/// Lower is better. Requires k >= 2, no empty cluster, distinct centroids.
double davies_bouldin(const DenseMatrix& data, const Labeling& labels);

/// Mean silhouette over all points given a full pairwise distance matrix.
/// Singleton clusters contribute 0. Requires >= 2 distinct labels.
double mean_silhouette(const DenseMatrix& distances, const std::vector<int>& labels);

// --- NMF + stability silhouette -------------------------------------------

struct NmfOptions {
    int max_iters = 500;
    double tol = 1e-6;  // stop when the relative-error change drops below
};

struct NmfFactors {
    DenseMatrix w;  // rows x k
    DenseMatrix h;  // k x cols
    double relative_error = 0.0;
    std::vector<double> error_trace;  // relative error after each update
};

/// Multiplicative-update NMF (Frobenius objective), `restarts` independent
/// seeded factorizations. Input must be nonnegative and k <= min(rows, cols).
std::vector<NmfFactors> nmf_fit(const DenseMatrix& data, int k, int restarts,
                                std::uint64_t seed, const NmfOptions& options = {});

/// Factor-stability score of a restart ensemble: normalized W columns are
/// greedily matched across restarts by cosine similarity into k pattern
/// groups; returns the minimum of the mean silhouette over those groups
/// (cosine distance) and the mean silhouette of the samples clustered by
/// their dominant H component in the best restart (Euclidean distance on
/// the data columns). Higher is more stable.
double nmfk_silhouette(const std::vector<NmfFactors>& ensemble, const DenseMatrix& data);

// --- evaluator factories ----------------------------------------------------

Evaluator make_square_wave_evaluator(SquareWaveSpec spec);
Evaluator make_laplacian_evaluator(int k0, double width);
Evaluator make_kmeans_db_evaluator(DenseMatrix data, int n_init = 4, int max_iters = 100);
Evaluator make_nmfk_silhouette_evaluator(DenseMatrix data, int restarts = 8,
                                         NmfOptions options = {});

}  // namespace bbleed

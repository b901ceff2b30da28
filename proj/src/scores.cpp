#include <cmath>
#include <limits>
#include <stdexcept>

#include "bbleed/models.hpp"

namespace bbleed {

double square_wave_score(int k, const SquareWaveSpec& spec) {
    // sgn(k0 - k) with sgn(0) = -1, mapped to {0, 1}
    return k < spec.k0 ? 1.0 : 0.0;
}

double laplacian_peak_score(int k, int k0, double width) {
    if (width <= 0.0) throw std::invalid_argument("laplacian_peak_score: width must be > 0");
    return std::exp(-std::abs(k - k0) / width);
}

namespace {

void check_labeling(const Labeling& labels, std::size_t n_samples) {
    if (labels.assignments.size() != n_samples)
        throw std::invalid_argument("labeling size does not match sample count");
    if (labels.k < 1) throw std::invalid_argument("labeling: k must be >= 1");
    for (int a : labels.assignments)
        if (a < 0 || a >= labels.k) throw std::invalid_argument("labeling: id out of range");
}

double euclidean(const DenseMatrix& data, std::size_t a, const std::vector<double>& centroid) {
    double s = 0.0;
    for (std::size_t c = 0; c < data.cols(); ++c) {
        const double d = data(a, c) - centroid[c];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

double davies_bouldin(const DenseMatrix& data, const Labeling& labels) {
    check_labeling(labels, data.rows());
    const int k = labels.k;
    if (k < 2) throw std::invalid_argument("davies_bouldin: needs k >= 2");

    const std::size_t dim = data.cols();
    std::vector<std::vector<double>> centroids(static_cast<std::size_t>(k),
                                               std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels.assignments[i]);
        ++counts[c];
        for (std::size_t d = 0; d < dim; ++d) centroids[c][d] += data(i, d);
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
        if (counts[c] == 0)
            throw std::invalid_argument("davies_bouldin: empty cluster " + std::to_string(c));
        for (double& v : centroids[c]) v /= static_cast<double>(counts[c]);
    }

    // mean distance to centroid per cluster
    std::vector<double> scatter(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels.assignments[i]);
        scatter[c] += euclidean(data, i, centroids[c]);
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c)
        scatter[c] /= static_cast<double>(counts[c]);

    double total = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
            if (i == j) continue;
            double d = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double diff = centroids[i][c] - centroids[j][c];
                d += diff * diff;
            }
            d = std::sqrt(d);
            if (d <= 0.0)
                throw std::runtime_error("davies_bouldin: coincident centroids (degenerate clustering)");
            worst = std::max(worst, (scatter[i] + scatter[j]) / d);
        }
        total += worst;
    }
    return total / k;
}

double mean_silhouette(const DenseMatrix& distances, const std::vector<int>& labels) {
    const std::size_t n = distances.rows();
    if (distances.cols() != n) throw std::invalid_argument("mean_silhouette: matrix not square");
    if (labels.size() != n) throw std::invalid_argument("mean_silhouette: label count mismatch");

    int max_label = 0;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("mean_silhouette: negative label");
        max_label = std::max(max_label, l);
    }
    const std::size_t k = static_cast<std::size_t>(max_label) + 1;
    std::vector<std::size_t> counts(k, 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    std::size_t present = 0;
    for (std::size_t c = 0; c < k; ++c) present += counts[c] > 0 ? 1 : 0;
    if (present < 2) throw std::invalid_argument("mean_silhouette: needs >= 2 nonempty clusters");

    double total = 0.0;
    std::vector<double> dist_sum(k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(labels[i]);
        if (counts[own] == 1) continue;  // singleton contributes 0
        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            dist_sum[static_cast<std::size_t>(labels[j])] += distances(i, j);
        const double a = dist_sum[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c)
            if (c != own && counts[c] > 0)
                b = std::min(b, dist_sum[c] / static_cast<double>(counts[c]));
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

Evaluator make_square_wave_evaluator(SquareWaveSpec spec) {
    return [spec](int k, std::uint64_t) { return square_wave_score(k, spec); };
}

Evaluator make_laplacian_evaluator(int k0, double width) {
    if (width <= 0.0) throw std::invalid_argument("laplacian evaluator: width must be > 0");
    return [k0, width](int k, std::uint64_t) { return laplacian_peak_score(k, k0, width); };
}

}  // namespace bbleed

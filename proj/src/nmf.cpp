#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bbleed/models.hpp"

namespace bbleed {

namespace {

constexpr double kEps = 1e-12;

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

DenseMatrix to_dense(const Eigen::MatrixXd& m) {
    DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
    return out;
}

Eigen::MatrixXd abs_gaussian(Eigen::Index rows, Eigen::Index cols, double scale,
                             std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = std::abs(normal(rng)) * scale;
    return m;
}

}  // namespace

std::vector<NmfFactors> nmf_fit(const DenseMatrix& data, int k, int restarts,
                                std::uint64_t seed, const NmfOptions& options) {
    if (!data.all_nonnegative())
        throw std::invalid_argument("nmf_fit: input has negative entries");
    if (k < 1 || static_cast<std::size_t>(k) > std::min(data.rows(), data.cols()))
        throw std::invalid_argument("nmf_fit: k must be in [1, min(rows, cols)]");
    if (restarts < 1) throw std::invalid_argument("nmf_fit: restarts must be >= 1");

    RowMajorMap x(data.data(), static_cast<Eigen::Index>(data.rows()),
                  static_cast<Eigen::Index>(data.cols()));
    const double norm_x = x.norm();
    const double denom = std::max(norm_x, kEps);
    const double scale = std::sqrt(x.mean() / static_cast<double>(k));

    std::vector<NmfFactors> ensemble;
    ensemble.reserve(static_cast<std::size_t>(restarts));
    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        Eigen::MatrixXd w = abs_gaussian(x.rows(), k, scale, rng);
        Eigen::MatrixXd h = abs_gaussian(k, x.cols(), scale, rng);

        NmfFactors out;
        double prev = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < options.max_iters; ++iter) {
            h.array() *= (w.transpose() * x).array() /
                         ((w.transpose() * w) * h + Eigen::MatrixXd::Constant(k, x.cols(), kEps))
                             .array();
            w.array() *= (x * h.transpose()).array() /
                         (w * (h * h.transpose()) + Eigen::MatrixXd::Constant(x.rows(), k, kEps))
                             .array();
            const double err = (x - w * h).norm() / denom;
            out.error_trace.push_back(err);
            if (std::abs(prev - err) < options.tol) break;
            prev = err;
        }
        out.relative_error = out.error_trace.empty() ? 0.0 : out.error_trace.back();
        out.w = to_dense(w);
        out.h = to_dense(h);
        ensemble.push_back(std::move(out));
    }
    return ensemble;
}

namespace {

// Unit-normalized W columns of one restart; zero columns stay zero.
Eigen::MatrixXd normalized_columns(const DenseMatrix& w) {
    RowMajorMap m(w.data(), static_cast<Eigen::Index>(w.rows()),
                  static_cast<Eigen::Index>(w.cols()));
    Eigen::MatrixXd out = m;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        const double n = out.col(c).norm();
        if (n > 0.0) out.col(c) /= n;
    }
    return out;
}

}  // namespace

double nmfk_silhouette(const std::vector<NmfFactors>& ensemble, const DenseMatrix& data) {
    if (ensemble.size() < 2)
        throw std::invalid_argument("nmfk_silhouette: ensemble must have >= 2 restarts");
    const auto k = static_cast<Eigen::Index>(ensemble[0].w.cols());

    // Collect unit patterns per restart and greedily align each restart's
    // columns to the first restart's columns by cosine similarity.
    const Eigen::MatrixXd reference = normalized_columns(ensemble[0].w);
    std::vector<Eigen::VectorXd> points;
    std::vector<int> groups;
    for (Eigen::Index c = 0; c < k; ++c) {
        points.push_back(reference.col(c));
        groups.push_back(static_cast<int>(c));
    }
    for (std::size_t r = 1; r < ensemble.size(); ++r) {
        const Eigen::MatrixXd cols = normalized_columns(ensemble[r].w);
        Eigen::MatrixXd sim = reference.transpose() * cols;  // group x column
        std::vector<bool> group_used(static_cast<std::size_t>(k), false);
        std::vector<bool> col_used(static_cast<std::size_t>(k), false);
        for (Eigen::Index pick = 0; pick < k; ++pick) {
            Eigen::Index best_g = -1, best_c = -1;
            double best = -2.0;
            for (Eigen::Index g = 0; g < k; ++g) {
                if (group_used[static_cast<std::size_t>(g)]) continue;
                for (Eigen::Index c = 0; c < k; ++c) {
                    if (col_used[static_cast<std::size_t>(c)]) continue;
                    if (sim(g, c) > best) {
                        best = sim(g, c);
                        best_g = g;
                        best_c = c;
                    }
                }
            }
            group_used[static_cast<std::size_t>(best_g)] = true;
            col_used[static_cast<std::size_t>(best_c)] = true;
            points.push_back(cols.col(best_c));
            groups.push_back(static_cast<int>(best_g));
        }
    }

    const std::size_t np = points.size();
    DenseMatrix w_dist(np, np);
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < np; ++j)
            w_dist(i, j) = i == j ? 0.0 : std::clamp(1.0 - points[i].dot(points[j]), 0.0, 2.0);
    const double sil_w = mean_silhouette(w_dist, groups);

    // Sample-side stability: dominant H component of the best restart
    // labels the samples; silhouette in the original sample space.
    std::size_t best_restart = 0;
    for (std::size_t r = 1; r < ensemble.size(); ++r)
        if (ensemble[r].relative_error < ensemble[best_restart].relative_error) best_restart = r;
    const DenseMatrix& h = ensemble[best_restart].h;
    const std::size_t n = h.cols();
    std::vector<int> sample_labels(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < h.rows(); ++i)
            if (h(i, j) > h(arg, j)) arg = i;
        sample_labels[j] = static_cast<int>(arg);
    }

    double sil_h = 0.0;
    const bool multi = [&] {
        for (std::size_t j = 1; j < n; ++j)
            if (sample_labels[j] != sample_labels[0]) return true;
        return false;
    }();
    if (multi) {
        RowMajorMap x(data.data(), static_cast<Eigen::Index>(data.rows()),
                      static_cast<Eigen::Index>(data.cols()));
        DenseMatrix h_dist(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = (x.col(static_cast<Eigen::Index>(i)) -
                                  x.col(static_cast<Eigen::Index>(j)))
                                     .norm();
                h_dist(i, j) = d;
                h_dist(j, i) = d;
            }
        sil_h = mean_silhouette(h_dist, sample_labels);
    }

    return std::min(sil_w, sil_h);
}

Evaluator make_nmfk_silhouette_evaluator(DenseMatrix data, int restarts, NmfOptions options) {
    return [data = std::move(data), restarts, options](int k, std::uint64_t seed) {
        const auto ensemble =
            nmf_fit(data, k, restarts, mix_seed(seed, static_cast<std::uint64_t>(k)), options);
        return nmfk_silhouette(ensemble, data);
    };
}

}  // namespace bbleed

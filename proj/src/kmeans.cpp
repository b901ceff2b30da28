#include <Eigen/Dense>
#include <limits>
#include <random>
#include <stdexcept>

#include "bbleed/models.hpp"

namespace bbleed {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

struct Fit {
    Eigen::MatrixXd centroids;  // k x dim
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

double sq_dist(const RowMajorMap& x, std::size_t row, const Eigen::MatrixXd& c, int cluster) {
    return (x.row(static_cast<Eigen::Index>(row)) - c.row(cluster)).squaredNorm();
}

Eigen::MatrixXd plus_plus_init(const RowMajorMap& x, int k, std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(x.rows());
    Eigen::MatrixXd centroids(k, x.cols());
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centroids.row(0) = x.row(static_cast<Eigen::Index>(first(rng)));

    std::vector<double> d2(n);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < c; ++j) best = std::min(best, sq_dist(x, i, centroids, j));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng), acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = first(rng);  // all points coincide with existing centroids
        }
        centroids.row(c) = x.row(static_cast<Eigen::Index>(pick));
    }
    return centroids;
}

Fit lloyd(const RowMajorMap& x, int k, std::mt19937_64& rng, int max_iters) {
    const auto n = static_cast<std::size_t>(x.rows());
    Fit fit;
    fit.centroids = plus_plus_init(x, k, rng);
    fit.labels.assign(n, -1);

    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(x, i, fit.centroids, 0);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(x, i, fit.centroids, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (fit.labels[i] != best) {
                fit.labels[i] = best;
                changed = true;
            }
        }
        if (!changed) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums.row(fit.labels[i]) += x.row(static_cast<Eigen::Index>(i));
            ++counts[static_cast<std::size_t>(fit.labels[i])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                fit.centroids.row(c) =
                    sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            } else {
                // re-seed an emptied cluster from the farthest point
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = sq_dist(x, i, fit.centroids, fit.labels[i]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                fit.centroids.row(c) = x.row(static_cast<Eigen::Index>(far));
            }
        }
    }

    fit.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) fit.inertia += sq_dist(x, i, fit.centroids, fit.labels[i]);
    return fit;
}

}  // namespace

KMeansResult kmeans_fit(const DenseMatrix& data, int k, std::uint64_t seed, int max_iters,
                        int n_init) {
    if (k < 1) throw std::invalid_argument("kmeans_fit: k must be >= 1");
    if (static_cast<std::size_t>(k) > data.rows())
        throw std::invalid_argument("kmeans_fit: k exceeds sample count");
    if (n_init < 1) throw std::invalid_argument("kmeans_fit: n_init must be >= 1");

    RowMajorMap x(data.data(), static_cast<Eigen::Index>(data.rows()),
                  static_cast<Eigen::Index>(data.cols()));

    Fit best;
    for (int init = 0; init < n_init; ++init) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(init)));
        Fit fit = lloyd(x, k, rng, max_iters);
        if (fit.inertia < best.inertia) best = std::move(fit);
    }

    KMeansResult result;
    result.centroids = DenseMatrix(static_cast<std::size_t>(k), data.cols());
    for (int c = 0; c < k; ++c)
        for (std::size_t d = 0; d < data.cols(); ++d)
            result.centroids(static_cast<std::size_t>(c), d) = best.centroids(c, d);
    result.labels = Labeling{std::move(best.labels), k};
    result.inertia = best.inertia;
    return result;
}

Evaluator make_kmeans_db_evaluator(DenseMatrix data, int n_init, int max_iters) {
    return [data = std::move(data), n_init, max_iters](int k, std::uint64_t seed) {
        const auto fit = kmeans_fit(data, k, mix_seed(seed, static_cast<std::uint64_t>(k)),
                                    max_iters, n_init);
        return davies_bouldin(data, fit.labels);
    };
}

}  // namespace bbleed

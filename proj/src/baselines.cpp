#include "ssm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ssm/histogram.hpp"

namespace ssm {

namespace {

void finalize(Eigen::MatrixXd& theta) {
    theta = (0.5 * (theta + theta.transpose())).eval();
    theta = theta.cwiseMax(0.0).cwiseMin(1.0);
    theta.diagonal().setZero();
}

}  // namespace

DenseEstimate usvt_threshold(const Graph& g, double threshold, const PairMask* mask) {
    const int n = g.n();
    if (mask && mask->n() != n) throw std::invalid_argument("usvt: mask does not match graph");
    Eigen::MatrixXd y = g.adjacency().cast<double>();
    if (mask) {
        double edges = 0.0;
        double pairs = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (!mask->observed(i, j)) continue;
                pairs += 1.0;
                edges += g(i, j);
            }
        }
        const double fill = pairs > 0 ? edges / pairs : 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j && !mask->observed(i, j)) y(i, j) = fill;
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(y);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const Eigen::MatrixXd& v = eig.eigenvectors();
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, n);
    int kept = 0;
    for (int c = 0; c < n; ++c) {
        if (std::abs(lambda(c)) > threshold) {
            theta.noalias() += lambda(c) * v.col(c) * v.col(c).transpose();
            ++kept;
        }
    }
    finalize(theta);
    return {std::move(theta), "usvt", kept};
}

DenseEstimate usvt(const Graph& g, double eta, const PairMask* mask) {
    if (!(eta > 0.0)) throw std::invalid_argument("usvt: eta must be positive");
    return usvt_threshold(g, (2.0 + eta) * std::sqrt(static_cast<double>(g.n())), mask);
}

DenseEstimate sas(const Graph& g, int h, int window, const PairMask* mask) {
    const int n = g.n();
    if (h < 1 || h > n) throw std::invalid_argument("sas: need 1 <= h <= n");
    if (window < 1) throw std::invalid_argument("sas: window must be positive");
    if (mask && mask->n() != n) throw std::invalid_argument("sas: mask does not match graph");

    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && (!mask || mask->observed(i, j))) degree[static_cast<std::size_t>(i)] += g(i, j);
        }
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return degree[static_cast<std::size_t>(a)] < degree[static_cast<std::size_t>(b)];
    });

    const int k = (n + h - 1) / h;
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) labels[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos / h;
    const NodePartition z = NodePartition::from_labels(std::move(labels), k);
    const BlockAverages ba = block_averages(g, z, mask);

    Eigen::MatrixXd smooth(k, k);
    const int back = (window - 1) / 2;
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            double sum = 0.0;
            int count = 0;
            for (int r = std::max(0, a - back); r <= std::min(k - 1, a - back + window - 1); ++r) {
                for (int c = std::max(0, b - back); c <= std::min(k - 1, b - back + window - 1); ++c) {
                    if (ba.pair_counts(r, c) <= 0) continue;
                    sum += ba.means(r, c);
                    ++count;
                }
            }
            smooth(a, b) = count > 0 ? sum / count : ba.means(a, b);
        }
    }

    Eigen::MatrixXd theta(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) theta(i, j) = smooth(z.z[static_cast<std::size_t>(i)], z.z[static_cast<std::size_t>(j)]);
    }
    finalize(theta);
    return {std::move(theta), "sas", k * (k + 1) / 2};
}

}  // namespace ssm

#include "ssm/evaluation.hpp"

#include <algorithm>
#include <numeric>

#include "ssm/errors.hpp"
#include "ssm/rng.hpp"

namespace ssm {

double mse(const Eigen::MatrixXd& theta_hat, const Eigen::MatrixXd& theta) {
    if (theta_hat.rows() != theta.rows() || theta_hat.cols() != theta.cols() || theta.rows() != theta.cols()) {
        throw std::invalid_argument("mse: dimension mismatch");
    }
    const Eigen::Index n = theta.rows();
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == j) continue;
            const double d = theta_hat(i, j) - theta(i, j);
            sum += d * d;
        }
    }
    return sum / (static_cast<double>(n) * static_cast<double>(n));
}

double mise_aligned(const Eigen::MatrixXd& theta_hat, const Graphon& f, const LatentSample& xi, int grid) {
    const auto n = static_cast<int>(theta_hat.rows());
    if (xi.xi.empty()) throw UnsupportedError("mise_aligned: latent positions are not available");
    if (static_cast<int>(xi.xi.size()) != n || theta_hat.cols() != n) {
        throw std::invalid_argument("mise_aligned: estimate and latents disagree on n");
    }
    if (grid < 1) throw std::invalid_argument("mise_aligned: grid must be positive");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return xi.xi[static_cast<std::size_t>(a)] < xi.xi[static_cast<std::size_t>(b)];
    });

    std::vector<double> mid(static_cast<std::size_t>(grid));
    std::vector<int> node(static_cast<std::size_t>(grid));
    for (int p = 0; p < grid; ++p) {
        mid[static_cast<std::size_t>(p)] = (p + 0.5) / grid;
        node[static_cast<std::size_t>(p)] = order[static_cast<std::size_t>(grid_cell(mid[static_cast<std::size_t>(p)], n))];
    }
    double sum = 0.0;
    for (int p = 0; p < grid; ++p) {
        for (int q = 0; q < grid; ++q) {
            const double d = f.eval(mid[static_cast<std::size_t>(p)], mid[static_cast<std::size_t>(q)]) -
                             theta_hat(node[static_cast<std::size_t>(p)], node[static_cast<std::size_t>(q)]);
            sum += d * d;
        }
    }
    return sum / (static_cast<double>(grid) * grid);
}

double auc(std::span<const ScoredPair> scores) {
    std::vector<ScoredPair> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end(), [](const ScoredPair& a, const ScoredPair& b) { return a.score < b.score; });
    double positives = 0.0;
    double negatives = 0.0;
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].score == sorted[i].score) ++j;
        // Mid-rank of the tie group (ranks are 1-based).
        const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t t = i; t < j; ++t) {
            if (sorted[t].label) {
                positives += 1.0;
                rank_sum += rank;
            } else {
                negatives += 1.0;
            }
        }
        i = j;
    }
    if (positives == 0.0 || negatives == 0.0) {
        throw UndefinedMetricError("auc: needs at least one positive and one negative");
    }
    return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

namespace {

std::vector<ScoredPair> score_pairs(const Graph& g, const Eigen::MatrixXd& theta, const PairMask& test) {
    std::vector<ScoredPair> out;
    out.reserve(test.pair_count());
    for (int i = 0; i < g.n(); ++i) {
        for (int j = i + 1; j < g.n(); ++j) {
            if (test.observed(i, j)) out.push_back({theta(i, j), g(i, j)});
        }
    }
    return out;
}

}  // namespace

double link_prediction_auc(const Graph& g, const std::string& method, double fraction, std::uint64_t seed,
                           const EstimatorOptions& opts) {
    const HoldoutSplit split = holdout_split(g, fraction, mix_seed(seed, "holdout"));
    const Estimate est = estimate(g, method, mix_seed(seed, "fit"), opts, &split.train);
    return auc(score_pairs(g, est.theta, split.test));
}

HoldoutComparison holdout_compare(const Graph& g, double fraction, std::uint64_t seed, const EstimatorOptions& opts) {
    const HoldoutSplit split = holdout_split(g, fraction, mix_seed(seed, "holdout"));
    const SsmFit fit = fit_ssm(g, mix_seed(seed, "fit"), opts, &split.train);
    HoldoutComparison out;
    out.auc_smoothed = auc(score_pairs(g, predict_theta(fit.smooth.best), split.test));
    out.auc_histogram = auc(score_pairs(g, predict_theta(fit.smooth.histogram), split.test));
    out.s = fit.smooth.best.s;
    out.tiles = fit.smooth.histogram.s;
    return out;
}

RatioReport param_and_auc_ratios(const Graphon& f, int n, std::span<const std::uint64_t> seeds,
                                 const EstimatorOptions& opts, double fraction) {
    RatioReport report;
    for (std::uint64_t seed : seeds) {
        const LatentSample xi = sample_latents(n, mix_seed(seed, "latents"));
        const SampledGraph sg = sample_graph(f, xi, mix_seed(seed, "graph"));
        const HoldoutComparison cmp = holdout_compare(sg.graph, fraction, seed, opts);
        report.rp_each.push_back(static_cast<double>(cmp.s) / cmp.tiles);
        report.rauc_each.push_back(cmp.auc_smoothed / cmp.auc_histogram);
    }
    if (!seeds.empty()) {
        const double count = static_cast<double>(seeds.size());
        report.rp = std::accumulate(report.rp_each.begin(), report.rp_each.end(), 0.0) / count;
        report.rauc = std::accumulate(report.rauc_each.begin(), report.rauc_each.end(), 0.0) / count;
    }
    return report;
}

}  // namespace ssm

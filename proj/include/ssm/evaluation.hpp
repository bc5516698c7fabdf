#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ssm/estimators.hpp"
#include "ssm/graph.hpp"
#include "ssm/graphon.hpp"

namespace ssm {

/// (1/n^2) sum_{i != j} (theta_hat_ij - theta_ij)^2.
double mse(const Eigen::MatrixXd& theta_hat, const Eigen::MatrixXd& theta);
inline double mse(const Eigen::MatrixXd& theta_hat, const GroundTruth& truth) {
    return mse(theta_hat, truth.theta);
}

/// Integrated squared error between f and the empirical graphon of the
/// estimate after ordering nodes by their known latent positions, by a
/// grid x grid midpoint rule. This upper-bounds the error minimised over
/// measure-preserving relabellings; it is not that quantity.
double mise_aligned(const Eigen::MatrixXd& theta_hat, const Graphon& f, const LatentSample& xi, int grid = 200);

struct ScoredPair {
    double score = 0.0;
    int label = 0;
};

/// Mann-Whitney area under the ROC curve: P(s+ > s-) + P(s+ = s-) / 2.
double auc(std::span<const ScoredPair> scores);

/// Holds out `fraction` of the pairs, fits `method` on the rest and scores
/// the held-out pairs by the fitted probabilities.
double link_prediction_auc(const Graph& g, const std::string& method, double fraction, std::uint64_t seed,
                           const EstimatorOptions& opts = {});

/// Smoothed and unsmoothed models from one masked fit, scored on the same
/// held-out pairs.
struct HoldoutComparison {
    double auc_smoothed = 0.0;
    double auc_histogram = 0.0;
    int s = 0;
    int tiles = 0;
};

HoldoutComparison holdout_compare(const Graph& g, double fraction, std::uint64_t seed,
                                  const EstimatorOptions& opts = {});

struct RatioReport {
    double rp = 0.0;    // mean of s_selected / tile count
    double rauc = 0.0;  // mean of AUC(smoothed) / AUC(histogram)
    std::vector<double> rp_each;
    std::vector<double> rauc_each;
};

/// Samples one graph per seed from `f` with n nodes and averages the
/// parameter and AUC ratios of the smoothed model against the histogram.
RatioReport param_and_auc_ratios(const Graphon& f, int n, std::span<const std::uint64_t> seeds,
                                 const EstimatorOptions& opts = {}, double fraction = 0.1);

struct EvalReport {
    std::string method;
    std::string graphon;
    int n = 0;
    std::uint64_t seed = 0;
    double mse = 0.0;
    std::optional<double> mise_aligned;
    std::optional<double> auc;
    int n_params = 0;
    int s = 0;
    int k = 0;
    double runtime_ms = 0.0;
};

}  // namespace ssm

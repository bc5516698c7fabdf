#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ssm/graph.hpp"
#include "ssm/histogram.hpp"
#include "ssm/shapes.hpp"

namespace ssm {

struct EstimatorOptions {
    int k = 0;                 // 0: default_bandwidth(n, bandwidth_c)
    double bandwidth_c = 2.0;
    int max_sweeps = 50;
    int histogram_restarts = -1;  // -1: histogram_restarts(n)
    int restarts = 10;         // k-means restarts
    double usvt_eta = 0.01;
    int sas_h = 0;             // 0: ceil(n / k) with k as above
    int sas_window = 3;
};

int resolve_k(int n, const EstimatorOptions& opts);

/// Two-step estimate: histogram fit, then BIC-selected shape smoothing.
struct SsmFit {
    HistogramFit histogram;
    SmoothResult smooth;
};

SsmFit fit_ssm(const Graph& g, std::uint64_t seed, const EstimatorOptions& opts = {},
               const PairMask* mask = nullptr);

struct Estimate {
    std::string method;
    Eigen::MatrixXd theta;
    int n_params = 0;
    int k = 0;  // block resolution (0 for usvt)
    int s = 0;  // shapes (0 for baselines)
    std::optional<SsmFit> fit;
};

/// "ssm" (smoothed), "histogram" (unsmoothed tiles), "usvt" or "sas".
Estimate estimate(const Graph& g, const std::string& method, std::uint64_t seed,
                  const EstimatorOptions& opts = {}, const PairMask* mask = nullptr);

const std::vector<std::string>& method_names();

}  // namespace ssm

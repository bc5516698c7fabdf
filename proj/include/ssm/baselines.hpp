#pragma once

#include <string>

#include <Eigen/Core>

#include "ssm/graph.hpp"

namespace ssm {

/// Probability-matrix estimate from a baseline method.
struct DenseEstimate {
    Eigen::MatrixXd theta_hat;  // symmetric, entries in [0, 1], zero diagonal
    std::string method;
    int n_params = 0;
};

/// Universal singular value thresholding on the symmetric adjacency: keeps
/// eigen-components with |lambda| > (2 + eta) sqrt(n), reconstructs, clips to
/// [0, 1] and zeroes the diagonal. Held-out pairs (outside `mask`) are
/// filled with the observed density before the decomposition.
DenseEstimate usvt(const Graph& g, double eta = 0.01, const PairMask* mask = nullptr);

/// Same, with an explicit threshold on |lambda|.
DenseEstimate usvt_threshold(const Graph& g, double threshold, const PairMask* mask = nullptr);

/// "SAS-lite" sorting and smoothing: stable ascending degree sort, contiguous
/// groups of h nodes (the last may be smaller), tile-mean histogram, then a
/// window x window moving average over the tile-mean matrix. The total
/// variation step of the original method is not reproduced; window = 1 gives
/// the plain sorted histogram.
DenseEstimate sas(const Graph& g, int h, int window, const PairMask* mask = nullptr);

}  // namespace ssm

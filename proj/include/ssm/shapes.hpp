#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ssm/graph.hpp"
#include "ssm/histogram.hpp"

namespace ssm {

/// Assignment of the k(k+1)/2 unordered tiles to s shapes.
struct TilePartition {
    int k = 0;
    int s = 0;
    Eigen::MatrixXi u;  // symmetric k x k, entries in [0, s)

    /// Each tile its own shape, numbered row-major over a <= b.
    static TilePartition identity(int k);
    static TilePartition single(int k);

    int tile_count() const noexcept { return k * (k + 1) / 2; }
    void validate() const;
};

/// Complete shape-model estimate: theta_ij = q[u(z_i, z_j)].
struct FittedModel {
    int k = 0;
    int s = 0;
    NodePartition z;
    TilePartition u;
    std::vector<double> q;
    double loglik = 0.0;
    double bic = 0.0;
    int n_params = 0;

    std::string to_json() const;
};

/// Edge-variable mean over shape c, i.e. the pair-count weighted mean of the
/// member tiles' means. Throws InvariantError for a shape without tiles.
double shape_average(const BlockAverages& ba, const TilePartition& u, int c);
/// All s shape averages; a shape whose tiles have no pairs falls back to the
/// overall density of the counted pairs.
std::vector<double> shape_averages(const BlockAverages& ba, const TilePartition& u);

struct KMeansOptions {
    int restarts = 10;
    int max_iterations = 100;
    double tolerance = 1e-10;
};

/// Weighted one-dimensional k-means of tile means (weights = pair counts)
/// with k-means++ seeding. Shapes are numbered by increasing centroid.
TilePartition kmeans_tiles(const BlockAverages& ba, int s, std::uint64_t seed, const KMeansOptions& opts = {});

/// Pair-count weighted within-shape sum of squares of tile means.
double within_shape_ss(const BlockAverages& ba, const TilePartition& u);

/// Clamp used for likelihoods over m pairs: p in [1/(2m), 1 - 1/(2m)].
double clamp_probability(double p, double m);

/// -2 l + s log m over observed pairs i < j (all pairs without a mask),
/// evaluated pair by pair from the adjacency.
double model_bic(const Graph& g, const FittedModel& model, const PairMask* mask = nullptr);
/// Pair-by-pair Bernoulli log-likelihood with clamped probabilities.
double model_loglik(const Graph& g, const FittedModel& model, const PairMask* mask = nullptr);

struct BicPoint {
    int s = 0;
    double loglik = 0.0;
    double bic = 0.0;
};

struct SmoothResult {
    FittedModel best;
    FittedModel histogram;  // s = tile count
    std::vector<BicPoint> curve;
};

/// Fits the shape model for every s in 1..k(k+1)/2 and keeps the smallest
/// BIC (ties go to the smaller s).
SmoothResult smooth_and_select(const Graph& g, const BlockAverages& ba, const NodePartition& z, std::uint64_t seed,
                               const PairMask* mask = nullptr, const KMeansOptions& opts = {});

/// Builds the model for a given tile partition with likelihood and BIC
/// computed from tile statistics.
FittedModel assemble_model(const BlockAverages& ba, const NodePartition& z, TilePartition u);

Eigen::MatrixXd predict_theta(const FittedModel& model);

/// Least-squares objective sum_{i<j} (A_ij - theta_ij)^2 evaluated directly.
double lsq_objective(const Graph& g, const FittedModel& model);
/// Same objective at the shape averages, from tile statistics only.
double lsq_objective(const BlockAverages& ba, const TilePartition& u);

struct LsqOptimum {
    double objective = 0.0;
    FittedModel model;
};

/// Exhaustive minimiser of the least-squares objective over all regular
/// node partitions into k groups and all surjective tile partitions into s
/// shapes. Guarded to n <= 8, k <= 3, s <= 3.
LsqOptimum brute_force_lsq(const Graph& g, int k, int s);

}  // namespace ssm

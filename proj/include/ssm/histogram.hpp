#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "ssm/graph.hpp"

namespace ssm {

/// Assignment of n nodes to k groups (zero-based labels).
struct NodePartition {
    int n = 0;
    int k = 0;
    std::vector<int> z;
    std::vector<int> sizes;

    static NodePartition from_labels(std::vector<int> labels, int k);
    /// Near-equal contiguous groups over `order` (first n mod k groups one larger).
    static NodePartition contiguous(const std::vector<int>& order, int k);

    /// Every group non-empty, labels in range, sizes consistent.
    void validate() const;
    bool is_regular() const;
};

/// Tile statistics of a partition. Off-diagonal tiles count |a||b| pairs,
/// diagonal tiles C(|a|, 2); under a mask only observed pairs are counted.
struct BlockAverages {
    int k = 0;
    Eigen::MatrixXd means;        // symmetric k x k
    Eigen::MatrixXd pair_counts;  // symmetric k x k
    Eigen::MatrixXd edge_counts;  // symmetric k x k

    int tile_count() const noexcept { return k * (k + 1) / 2; }
    /// Counted pairs and edges over all tiles (each unordered pair once).
    double total_pairs() const;
    double total_edges() const;
};

/// Without a mask, a tile with no pairs has mean 0. With a mask, tiles with
/// no observed pair take the global observed density.
BlockAverages block_averages(const Graph& g, const NodePartition& z, const PairMask* mask = nullptr);

/// Bernoulli log-likelihood of the tile model maximised over tile
/// probabilities: sum over tiles of P [m log m + (1 - m) log(1 - m)].
double profile_log_likelihood(const Graph& g, const NodePartition& z, const PairMask* mask = nullptr);
double profile_log_likelihood(const BlockAverages& ba);

struct HistogramFit {
    NodePartition partition;
    BlockAverages averages;
    double loglik = 0.0;
    double initial_loglik = 0.0;
    int sweeps = 0;
    bool converged = false;
};

struct HistogramOptions {
    int max_sweeps = 50;
    int restarts = -1;  // extra ascents from random regular starts; -1: histogram_restarts(n)
};

/// Default restart count: ceil(160000 / n^2) clamped to [4, 64]. Small
/// graphs get more restarts because each ascent is cheap and local maxima
/// are common; on a balanced assortative SBM the degree-sorted start carries
/// no block information and a single random start succeeds about half the time.
int histogram_restarts(int n);

/// Regular k-block histogram by greedy profile-likelihood ascent.
///
/// Starts from contiguous near-equal groups in ascending (stable) degree
/// order, then sweeps over nodes in a seed-shuffled order proposing
/// single-node relabels that keep group sizes within one of each other and
/// pairwise label swaps. A proposal is taken only if it strictly raises the
/// profile likelihood. Stops after a sweep with no accepted move or after
/// max_sweeps. The same ascent is then repeated from `restarts` random
/// regular partitions and the best local maximum is kept; initial_loglik
/// always refers to the degree-sorted start. Entries outside `mask` are
/// never read.
HistogramFit fit_histogram(const Graph& g, int k, std::uint64_t seed,
                           const HistogramOptions& opts = {}, const PairMask* mask = nullptr);

/// k = max(2, round(sqrt(n) / c)).
int default_bandwidth(int n, double c = 2.0);

}  // namespace ssm

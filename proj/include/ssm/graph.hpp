#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace ssm {

using AdjMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Simple undirected graph on nodes 0..n-1 with dense 0/1 adjacency.
///
/// Immutable once built; construction checks that the adjacency is binary,
/// symmetric, and has an empty diagonal.
class Graph {
public:
    explicit Graph(AdjMatrix adj, std::vector<std::string> labels = {});

    static Graph empty(int n);
    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                            std::vector<std::string> labels = {});

    int n() const noexcept { return static_cast<int>(adj_.rows()); }
    bool edge(int i, int j) const noexcept { return adj_(i, j) != 0; }
    std::uint8_t operator()(int i, int j) const noexcept { return adj_(i, j); }
    const AdjMatrix& adjacency() const noexcept { return adj_; }

    /// External identifiers; empty when the graph was not read from a file.
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::string label(int i) const;

    std::size_t edge_count() const noexcept { return edge_count_; }
    /// Edges (i, j) with i < j in row-major order.
    std::vector<std::pair<int, int>> edges() const;
    double density() const noexcept;

private:
    AdjMatrix adj_;
    std::vector<std::string> labels_;
    std::size_t edge_count_ = 0;
};

/// Symmetric set of node pairs; the diagonal is never observed.
class PairMask {
public:
    PairMask() = default;
    explicit PairMask(AdjMatrix observed);

    static PairMask full(int n);

    int n() const noexcept { return static_cast<int>(observed_.rows()); }
    bool observed(int i, int j) const noexcept { return observed_(i, j) != 0; }
    std::uint8_t operator()(int i, int j) const noexcept { return observed_(i, j); }
    const AdjMatrix& matrix() const noexcept { return observed_; }
    /// Number of observed unordered pairs.
    std::size_t pair_count() const noexcept { return pair_count_; }

private:
    AdjMatrix observed_;
    std::size_t pair_count_ = 0;
};

struct HoldoutSplit {
    PairMask train;
    PairMask test;
};

std::vector<int> degree_sequence(const Graph& g);

/// Splits the unordered pairs uniformly at random: round(fraction * C(n,2))
/// pairs go to the test mask, the rest to the train mask.
HoldoutSplit holdout_split(const Graph& g, double fraction, std::uint64_t seed);

/// Reads a whitespace (or comma) separated edge list. Lines starting with '#'
/// are comments; tokens after the first two on a line are ignored. Duplicate,
/// reversed and self-loop edges are tolerated and collapsed/dropped.
///
/// Node order: numeric when every identifier is an integer, otherwise
/// lexicographic. A "# nodes N" header declares integer nodes 0..N-1 so
/// that isolated nodes survive a write/read cycle.
Graph load_edge_list(const std::filesystem::path& path, bool drop_isolated);
Graph parse_edge_list(std::istream& in, bool drop_isolated);

void write_edge_list(const Graph& g, const std::filesystem::path& path);
void write_edge_list(const Graph& g, std::ostream& out);

/// JSON dump {n, edges:[[i,j],...], labels:[...]}.
std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);

}  // namespace ssm

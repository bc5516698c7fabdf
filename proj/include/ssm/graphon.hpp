#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ssm/graph.hpp"

namespace ssm {

/// Stochastic shape model on a k x k grid: every unordered tile (a, b) is
/// assigned to one of s shapes, and each shape carries one edge probability.
/// Indices are zero-based.
struct SsmSpec {
    int k = 0;
    int s = 0;
    Eigen::MatrixXi u;   // k x k, symmetric, entries in [0, s)
    std::vector<double> q;

    /// Throws InvariantError unless u is symmetric and surjective onto [0, s)
    /// and every probability lies strictly inside (0, 1).
    void validate() const;

    std::string to_json() const;
    static SsmSpec from_json(const std::string& text);
    static SsmSpec load(const std::string& path);
};

enum class GraphonKind { formula, block_table, shape_model };

/// Symmetric function [0,1]^2 -> [0,1] used to generate ground truth.
class Graphon {
public:
    static Graphon formula(std::string name, std::function<double(double, double)> f);
    static Graphon block_table(std::string name, Eigen::MatrixXd table);
    static Graphon shape_model(std::string name, SsmSpec spec);

    GraphonKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    /// Equal-width grid resolution for block_table / shape_model, 0 otherwise.
    int resolution() const noexcept;
    const Eigen::MatrixXd& table() const noexcept { return table_; }
    const SsmSpec& spec() const noexcept { return spec_; }

    /// f(x, y). Grid-based kinds use cell ceil(k x) with x = 0 mapped to the
    /// first cell. Throws std::invalid_argument outside [0,1]^2.
    double eval(double x, double y) const;
    double operator()(double x, double y) const { return eval(x, y); }

private:
    GraphonKind kind_ = GraphonKind::formula;
    std::string name_;
    std::function<double(double, double)> f_;
    Eigen::MatrixXd table_;
    SsmSpec spec_;
};

/// Zero-based grid cell of x in [0,1] at resolution k.
int grid_cell(double x, int k) noexcept;

struct LatentSample {
    std::vector<double> xi;
    std::uint64_t seed = 0;
};

struct GroundTruth {
    Eigen::MatrixXd theta;  // zero diagonal
    LatentSample latents;
    Graphon source;
};

struct SampledGraph {
    Graph graph;
    GroundTruth truth;
};

LatentSample sample_latents(int n, std::uint64_t seed);

/// theta_ij = f(xi_i, xi_j) for i != j, A_ij ~ Bernoulli(theta_ij) for i < j.
SampledGraph sample_graph(const Graphon& f, const LatentSample& xi, std::uint64_t seed);

Eigen::MatrixXd theta_from_latents(const Graphon& f, const LatentSample& xi);

// Built-in graphons.
Graphon make_latent_distance();  // f0(x,y) = |x - y|
Graphon make_logit_sum();        // f1(x,y) = 1 / (1 + exp(-10 (x^2 + y^2)))
Graphon make_log_max();          // f2(x,y) = log(1 + 0.5 max(x, y))
Graphon make_constant(double p);
Graphon make_assortative_sbm(int k, double p_in, double p_out);
/// f3: two macro-groups of two sub-blocks each, one shared cross-macro
/// probability. The table lives in configs/f3_hierarchical.json as well.
Graphon make_hierarchical_sbm();
Eigen::MatrixXd hierarchical_sbm_table();
/// Ten-block, five-shape model with well separated probabilities; shape
/// index grows with a + b so block degrees are strictly ordered.
SsmSpec planted_ssm_spec();

/// Distinct-value shape model induced by a block table.
SsmSpec ssm_from_table(const Eigen::MatrixXd& table);

/// Names accepted by graphon_by_name.
std::vector<std::string> graphon_zoo();
/// Resolves "f0".."f3", "sbm_assort", "sbm_disassort", "ssm_planted",
/// "const:<p>" and "ssm:<path to SsmSpec JSON>".
Graphon graphon_by_name(const std::string& name);

}  // namespace ssm

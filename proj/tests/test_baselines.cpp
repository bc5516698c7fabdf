#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "ssm/baselines.hpp"
#include "ssm/graphon.hpp"
#include "ssm/histogram.hpp"

using ssm::Graph;

namespace {

double off_diagonal_mean(const Eigen::MatrixXd& t) {
    const auto n = static_cast<double>(t.rows());
    return (t.sum() - t.trace()) / (n * (n - 1));
}

}  // namespace

TEST_CASE("usvt on an empty graph") {
    const auto est = ssm::usvt(Graph::empty(30));
    CHECK(est.theta_hat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(est.n_params == 0);
    CHECK(est.method == "usvt");
}

TEST_CASE("usvt on a complete graph keeps only the top component") {
    const int n = 200;
    ssm::AdjMatrix a = ssm::AdjMatrix::Ones(n, n);
    a.diagonal().setZero();
    const auto est = ssm::usvt(Graph(a));
    CHECK(est.n_params == 1);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) worst = std::max(worst, std::abs(1.0 - est.theta_hat(i, j)));
        }
    }
    CHECK(worst <= 2.0 / n);
}

TEST_CASE("usvt on Erdos-Renyi recovers the density") {
    const auto sg = ssm::sample_graph(ssm::make_constant(0.5), ssm::sample_latents(500, 3), 4);
    const auto est = ssm::usvt(sg.graph);
    CHECK(std::abs(off_diagonal_mean(est.theta_hat) - 0.5) < 0.05);
    CHECK(est.n_params >= 1);
}

TEST_CASE("usvt fills held-out pairs with the observed density") {
    const auto sg = ssm::sample_graph(ssm::make_constant(0.5), ssm::sample_latents(300, 5), 6);
    const auto split = ssm::holdout_split(sg.graph, 0.2, 7);
    const auto est = ssm::usvt(sg.graph, 0.01, &split.train);
    CHECK(std::abs(off_diagonal_mean(est.theta_hat) - 0.5) < 0.05);
    const auto small = ssm::PairMask::full(5);
    CHECK_THROWS_AS(ssm::usvt(sg.graph, 0.01, &small), std::invalid_argument);
}

TEST_CASE("sas degenerate settings") {
    const auto sg = ssm::sample_graph(ssm::make_log_max(), ssm::sample_latents(50, 1), 2);
    const auto one = ssm::sas(sg.graph, 50, 1);
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            if (i != j) CHECK(one.theta_hat(i, j) == doctest::Approx(sg.graph.density()));
        }
    }
    CHECK(one.n_params == 1);
    CHECK(ssm::sas(sg.graph, 10, 3).n_params == 15);
    CHECK_THROWS_AS(ssm::sas(sg.graph, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(ssm::sas(sg.graph, 51, 1), std::invalid_argument);
    CHECK_THROWS_AS(ssm::sas(sg.graph, 5, 0), std::invalid_argument);
}

TEST_CASE("sas with window 1 is the degree-sorted histogram") {
    const auto sg = ssm::sample_graph(ssm::make_logit_sum(), ssm::sample_latents(60, 8), 9);
    const auto deg = ssm::degree_sequence(sg.graph);
    std::vector<int> order(60);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return deg[a] < deg[b]; });
    const auto z = ssm::NodePartition::contiguous(order, 6);
    const auto ba = ssm::block_averages(sg.graph, z);
    const auto est = ssm::sas(sg.graph, 10, 1);
    for (int i = 0; i < 60; ++i) {
        for (int j = 0; j < 60; ++j) {
            if (i != j) CHECK(est.theta_hat(i, j) == doctest::Approx(ba.means(z.z[i], z.z[j])).epsilon(1e-14));
        }
    }
}

TEST_CASE("degree-sorted tile means follow a monotone graphon") {
    int rising = 0;
    int comparisons = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto sg = ssm::sample_graph(ssm::make_log_max(), ssm::sample_latents(500, seed), seed + 50);
        const auto deg = ssm::degree_sequence(sg.graph);
        std::vector<int> order(500);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return deg[a] < deg[b]; });
        const int k = ssm::default_bandwidth(500);
        const auto ba = ssm::block_averages(sg.graph, ssm::NodePartition::contiguous(order, k));
        for (int a = 1; a < k; ++a) {
            ++comparisons;
            rising += ba.means(a, a) >= ba.means(a - 1, a - 1);
        }
    }
    CHECK(rising >= 0.9 * comparisons);
}

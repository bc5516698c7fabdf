#include "ssm/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssm/errors.hpp"
#include "ssm/rng.hpp"

namespace ssm {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Maximised Bernoulli log-likelihood of a tile with `e` edges among `p` pairs.
double tile_term(double e, double p) { return xlogx(e) + xlogx(p - e) - xlogx(p); }

}  // namespace

NodePartition NodePartition::from_labels(std::vector<int> labels, int k) {
    NodePartition part;
    part.n = static_cast<int>(labels.size());
    part.k = k;
    part.z = std::move(labels);
    part.sizes.assign(static_cast<std::size_t>(std::max(k, 0)), 0);
    for (int c : part.z) {
        if (c < 0 || c >= k) throw std::invalid_argument("NodePartition: label out of range");
        ++part.sizes[static_cast<std::size_t>(c)];
    }
    part.validate();
    return part;
}

NodePartition NodePartition::contiguous(const std::vector<int>& order, int k) {
    const int n = static_cast<int>(order.size());
    if (k < 1 || k > n) throw std::invalid_argument("NodePartition: need 1 <= k <= n");
    std::vector<int> labels(static_cast<std::size_t>(n));
    const int base = n / k;
    const int extra = n % k;
    int pos = 0;
    for (int c = 0; c < k; ++c) {
        const int size = base + (c < extra ? 1 : 0);
        for (int t = 0; t < size; ++t) labels[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = c;
    }
    return from_labels(std::move(labels), k);
}

void NodePartition::validate() const {
    if (k < 1) throw InvariantError("NodePartition: k must be positive");
    if (static_cast<int>(z.size()) != n || static_cast<int>(sizes.size()) != k) {
        throw InvariantError("NodePartition: inconsistent sizes");
    }
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int c : z) {
        if (c < 0 || c >= k) throw InvariantError("NodePartition: label out of range");
        ++count[static_cast<std::size_t>(c)];
    }
    if (count != sizes) throw InvariantError("NodePartition: stale group sizes");
    if (std::find(sizes.begin(), sizes.end(), 0) != sizes.end()) {
        throw InvariantError("NodePartition: empty group");
    }
}

bool NodePartition::is_regular() const {
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    return *hi - *lo <= 1;
}

namespace {

double upper_sum(const Eigen::MatrixXd& m) {
    double sum = 0.0;
    for (Eigen::Index b = 0; b < m.cols(); ++b) {
        for (Eigen::Index a = 0; a <= b; ++a) sum += m(a, b);
    }
    return sum;
}

}  // namespace

double BlockAverages::total_pairs() const { return upper_sum(pair_counts); }
double BlockAverages::total_edges() const { return upper_sum(edge_counts); }

BlockAverages block_averages(const Graph& g, const NodePartition& z, const PairMask* mask) {
    if (z.n != g.n()) throw std::invalid_argument("block_averages: partition does not match graph");
    if (mask && mask->n() != g.n()) throw std::invalid_argument("block_averages: mask does not match graph");
    const int k = z.k;
    BlockAverages ba;
    ba.k = k;
    ba.edge_counts = Eigen::MatrixXd::Zero(k, k);
    ba.pair_counts = Eigen::MatrixXd::Zero(k, k);
    const int n = g.n();
    for (int i = 0; i < n; ++i) {
        const int a = z.z[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) {
            if (mask && !mask->observed(i, j)) continue;
            const int b = z.z[static_cast<std::size_t>(j)];
            ba.pair_counts(a, b) += 1.0;
            if (g.edge(i, j)) ba.edge_counts(a, b) += 1.0;
        }
    }
    // Fold the two triangles of each off-diagonal tile together.
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            ba.pair_counts(a, b) = ba.pair_counts(b, a) = ba.pair_counts(a, b) + ba.pair_counts(b, a);
            ba.edge_counts(a, b) = ba.edge_counts(b, a) = ba.edge_counts(a, b) + ba.edge_counts(b, a);
        }
    }
    double fallback = 0.0;
    if (mask) {
        const double pairs = ba.total_pairs();
        const double edges = ba.total_edges();
        fallback = pairs > 0 ? edges / pairs : 0.0;
    }
    ba.means.resize(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            const double p = ba.pair_counts(a, b);
            ba.means(a, b) = p > 0 ? ba.edge_counts(a, b) / p : fallback;
        }
    }
    return ba;
}

double profile_log_likelihood(const BlockAverages& ba) {
    double ll = 0.0;
    for (int a = 0; a < ba.k; ++a) {
        for (int b = a; b < ba.k; ++b) ll += tile_term(ba.edge_counts(a, b), ba.pair_counts(a, b));
    }
    return ll;
}

double profile_log_likelihood(const Graph& g, const NodePartition& z, const PairMask* mask) {
    return profile_log_likelihood(block_averages(g, z, mask));
}

namespace {

// Incremental state for the greedy ascent. Edge and pair counts are kept as
// integers so tile terms come from an x log x lookup table and deltas are
// exact up to rounding of the table entries.
class AscentState {
public:
    AscentState(const Graph& g, const PairMask* mask, NodePartition init)
        : n_(g.n()), k_(init.k), part_(std::move(init)) {
        w_.resize(static_cast<std::size_t>(n_) * n_);
        o_.resize(static_cast<std::size_t>(n_) * n_);
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                const bool seen = i != j && (!mask || mask->observed(i, j));
                o_[idx(i, j)] = seen ? 1 : 0;
                w_[idx(i, j)] = seen && g.edge(i, j) ? 1 : 0;
            }
        }
        edges_to_.assign(static_cast<std::size_t>(n_) * k_, 0);
        pairs_to_.assign(static_cast<std::size_t>(n_) * k_, 0);
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                const int b = part_.z[static_cast<std::size_t>(j)];
                edges_to_[nk(i, b)] += w_[idx(i, j)];
                pairs_to_[nk(i, b)] += o_[idx(i, j)];
            }
        }
        tile_e_.assign(static_cast<std::size_t>(k_) * k_, 0);
        tile_p_.assign(static_cast<std::size_t>(k_) * k_, 0);
        long long total_pairs = 0;
        for (int i = 0; i < n_; ++i) {
            const int a = part_.z[static_cast<std::size_t>(i)];
            for (int b = 0; b < k_; ++b) {
                tile_e_[kk(a, b)] += edges_to_[nk(i, b)];
                tile_p_[kk(a, b)] += pairs_to_[nk(i, b)];
                total_pairs += pairs_to_[nk(i, b)];
            }
        }
        // Diagonal tiles saw every unordered pair twice; off-diagonal tiles
        // got one count per direction, which sums to the right total.
        for (int a = 0; a < k_; ++a) {
            tile_e_[kk(a, a)] /= 2;
            tile_p_[kk(a, a)] /= 2;
        }
        table_.resize(static_cast<std::size_t>(total_pairs / 2 + 2));
        for (std::size_t x = 0; x < table_.size(); ++x) table_[x] = xlogx(static_cast<double>(x));
    }

    const NodePartition& partition() const { return part_; }

    double loglik() const {
        double ll = 0.0;
        for (int a = 0; a < k_; ++a) {
            for (int b = a; b < k_; ++b) ll += term(tile_e_[kk(a, b)], tile_p_[kk(a, b)]);
        }
        return ll;
    }

    // Change in log-likelihood when node i moves from its group to b.
    double relabel_delta(int i, int b) const {
        const int a = group(i);
        double delta = 0.0;
        for (int c = 0; c < k_; ++c) {
            if (c == a || c == b) continue;
            delta += shift(a, c, -de(i, c), -dp(i, c));
            delta += shift(b, c, de(i, c), dp(i, c));
        }
        delta += shift(a, a, -de(i, a), -dp(i, a));
        delta += shift(b, b, de(i, b), dp(i, b));
        delta += shift(a, b, de(i, a) - de(i, b), dp(i, a) - dp(i, b));
        return delta;
    }

    // Change in log-likelihood when i (group a) and j (group b) trade labels.
    double swap_delta(int i, int j) const {
        const int a = group(i);
        const int b = group(j);
        const int e = w_[idx(i, j)];
        const int m = o_[idx(i, j)];
        double delta = 0.0;
        for (int c = 0; c < k_; ++c) {
            if (c == a || c == b) continue;
            delta += shift(a, c, de(j, c) - de(i, c), dp(j, c) - dp(i, c));
            delta += shift(b, c, de(i, c) - de(j, c), dp(i, c) - dp(j, c));
        }
        delta += shift(a, a, de(j, a) - de(i, a) - e, dp(j, a) - dp(i, a) - m);
        delta += shift(b, b, de(i, b) - de(j, b) - e, dp(i, b) - dp(j, b) - m);
        delta += shift(a, b, de(j, b) + de(i, a) - de(i, b) - de(j, a) + 2 * e,
                       dp(j, b) + dp(i, a) - dp(i, b) - dp(j, a) + 2 * m);
        return delta;
    }

    void apply_relabel(int i, int b) {
        const int a = group(i);
        for (int c = 0; c < k_; ++c) {
            if (c == a || c == b) continue;
            bump(a, c, -de(i, c), -dp(i, c));
            bump(b, c, de(i, c), dp(i, c));
        }
        const int daa = de(i, a), dpa = dp(i, a), dbb = de(i, b), dpb = dp(i, b);
        bump(a, a, -daa, -dpa);
        bump(b, b, dbb, dpb);
        bump(a, b, daa - dbb, dpa - dpb);
        for (int v = 0; v < n_; ++v) {
            edges_to_[nk(v, a)] -= w_[idx(v, i)];
            pairs_to_[nk(v, a)] -= o_[idx(v, i)];
            edges_to_[nk(v, b)] += w_[idx(v, i)];
            pairs_to_[nk(v, b)] += o_[idx(v, i)];
        }
        part_.z[static_cast<std::size_t>(i)] = b;
        --part_.sizes[static_cast<std::size_t>(a)];
        ++part_.sizes[static_cast<std::size_t>(b)];
    }

    void apply_swap(int i, int j) {
        const int a = group(i);
        const int b = group(j);
        const int e = w_[idx(i, j)];
        const int m = o_[idx(i, j)];
        for (int c = 0; c < k_; ++c) {
            if (c == a || c == b) continue;
            bump(a, c, de(j, c) - de(i, c), dp(j, c) - dp(i, c));
            bump(b, c, de(i, c) - de(j, c), dp(i, c) - dp(j, c));
        }
        const int eaa = de(j, a) - de(i, a) - e, paa = dp(j, a) - dp(i, a) - m;
        const int ebb = de(i, b) - de(j, b) - e, pbb = dp(i, b) - dp(j, b) - m;
        const int eab = de(j, b) + de(i, a) - de(i, b) - de(j, a) + 2 * e;
        const int pab = dp(j, b) + dp(i, a) - dp(i, b) - dp(j, a) + 2 * m;
        bump(a, a, eaa, paa);
        bump(b, b, ebb, pbb);
        bump(a, b, eab, pab);
        for (int v = 0; v < n_; ++v) {
            const int dw = w_[idx(v, j)] - w_[idx(v, i)];
            const int dm = o_[idx(v, j)] - o_[idx(v, i)];
            edges_to_[nk(v, a)] += dw;
            pairs_to_[nk(v, a)] += dm;
            edges_to_[nk(v, b)] -= dw;
            pairs_to_[nk(v, b)] -= dm;
        }
        part_.z[static_cast<std::size_t>(i)] = b;
        part_.z[static_cast<std::size_t>(j)] = a;
    }

    int group(int i) const { return part_.z[static_cast<std::size_t>(i)]; }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }
    std::size_t nk(int i, int c) const { return static_cast<std::size_t>(i) * k_ + c; }
    std::size_t kk(int a, int b) const { return static_cast<std::size_t>(a) * k_ + b; }
    int de(int i, int c) const { return edges_to_[nk(i, c)]; }
    int dp(int i, int c) const { return pairs_to_[nk(i, c)]; }

    double term(long long e, long long p) const {
        return table_[static_cast<std::size_t>(e)] + table_[static_cast<std::size_t>(p - e)] -
               table_[static_cast<std::size_t>(p)];
    }

    double shift(int a, int b, int de_, int dp_) const {
        const long long e = tile_e_[kk(a, b)];
        const long long p = tile_p_[kk(a, b)];
        return term(e + de_, p + dp_) - term(e, p);
    }

    void bump(int a, int b, int de_, int dp_) {
        tile_e_[kk(a, b)] += de_;
        tile_p_[kk(a, b)] += dp_;
        if (a != b) {
            tile_e_[kk(b, a)] += de_;
            tile_p_[kk(b, a)] += dp_;
        }
    }

    int n_;
    int k_;
    NodePartition part_;
    std::vector<std::uint8_t> w_;  // observed edges
    std::vector<std::uint8_t> o_;  // observed pairs
    std::vector<int> edges_to_;    // n x k: observed edges from node to group (self excluded)
    std::vector<int> pairs_to_;    // n x k: observed pairs from node to group
    std::vector<long long> tile_e_;
    std::vector<long long> tile_p_;
    std::vector<double> table_;
};

constexpr double kImproveTol = 1e-7;

struct Ascent {
    NodePartition partition;
    double initial_loglik = 0.0;
    double loglik = 0.0;
    int sweeps = 0;
    bool converged = false;
};

Ascent ascend(const Graph& g, const PairMask* mask, NodePartition init, Rng& rng, int max_sweeps) {
    const int n = g.n();
    const int k = init.k;
    AscentState state(g, mask, std::move(init));
    Ascent out;
    out.initial_loglik = state.loglik();
    double ll = out.initial_loglik;

    std::vector<int> visit(static_cast<std::size_t>(n));
    std::iota(visit.begin(), visit.end(), 0);
    const int base = n / k;
    const bool divisible = n % k == 0;

    for (int sweep = 0; sweep < max_sweeps && k > 1; ++sweep) {
        rng.shuffle(std::span(visit));
        bool moved = false;
        for (int i : visit) {
            if (!divisible) {
                // A relabel keeps sizes within one only when it moves a node
                // from a larger group to a smaller one.
                for (int b = 0; b < k; ++b) {
                    const int a = state.group(i);
                    if (b == a) continue;
                    const auto& sizes = state.partition().sizes;
                    if (sizes[static_cast<std::size_t>(a)] != base + 1 || sizes[static_cast<std::size_t>(b)] != base) {
                        continue;
                    }
                    const double delta = state.relabel_delta(i, b);
                    if (delta > kImproveTol) {
                        state.apply_relabel(i, b);
                        ll += delta;
                        moved = true;
                    }
                }
            }
            for (int j : visit) {
                if (state.group(j) == state.group(i)) continue;
                const double delta = state.swap_delta(i, j);
                if (delta > kImproveTol) {
                    state.apply_swap(i, j);
                    ll += delta;
                    moved = true;
                }
            }
        }
        out.sweeps = sweep + 1;
        if (!moved) {
            out.converged = true;
            break;
        }
    }
    if (k == 1) out.converged = true;
    if (ll + kImproveTol < out.initial_loglik) {
        throw InvariantError("fit_histogram: likelihood decreased during ascent");
    }
    out.partition = state.partition();
    out.loglik = ll;
    return out;
}

}  // namespace

HistogramFit fit_histogram(const Graph& g, int k, std::uint64_t seed, const HistogramOptions& opts,
                           const PairMask* mask) {
    const int n = g.n();
    if (k < 1 || k > n) throw std::invalid_argument("fit_histogram: need 1 <= k <= n");
    if (mask && mask->n() != n) throw std::invalid_argument("fit_histogram: mask does not match graph");
    if (opts.max_sweeps < 0) throw std::invalid_argument("fit_histogram: max_sweeps must be non-negative");
    if (opts.restarts < -1) throw std::invalid_argument("fit_histogram: restarts must be -1 or non-negative");
    const int restarts = opts.restarts < 0 ? histogram_restarts(n) : opts.restarts;

    // Observed degree, so held-out pairs never influence the start.
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && (!mask || mask->observed(i, j)) && g.edge(i, j)) ++degree[static_cast<std::size_t>(i)];
        }
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return degree[static_cast<std::size_t>(x)] < degree[static_cast<std::size_t>(y)];
    });

    Rng rng(seed);
    Ascent best = ascend(g, mask, NodePartition::contiguous(order, k), rng, opts.max_sweeps);
    const double degree_start_ll = best.initial_loglik;
    // Further ascents from random regular partitions; the first strictly
    // better local maximum wins.
    for (int r = 0; r < restarts && k > 1; ++r) {
        Rng start_rng(mix_seed(seed, static_cast<std::uint64_t>(r + 1)));
        std::vector<int> shuffled(static_cast<std::size_t>(n));
        std::iota(shuffled.begin(), shuffled.end(), 0);
        start_rng.shuffle(std::span(shuffled));
        Ascent a = ascend(g, mask, NodePartition::contiguous(shuffled, k), start_rng, opts.max_sweeps);
        if (a.loglik > best.loglik + kImproveTol) best = std::move(a);
    }

    HistogramFit fit;
    fit.partition = std::move(best.partition);
    fit.partition.validate();
    fit.averages = block_averages(g, fit.partition, mask);
    fit.loglik = profile_log_likelihood(fit.averages);
    fit.initial_loglik = degree_start_ll;
    fit.sweeps = best.sweeps;
    fit.converged = best.converged;
    if (fit.loglik + 1e-6 * std::max(1.0, std::abs(fit.loglik)) < fit.initial_loglik) {
        throw InvariantError("fit_histogram: likelihood decreased during ascent");
    }
    if (std::abs(best.loglik - fit.loglik) > 1e-6 * std::max(1.0, std::abs(fit.loglik))) {
        throw InvariantError("fit_histogram: incremental likelihood drifted from recomputed value");
    }
    return fit;
}

int histogram_restarts(int n) {
    if (n < 1) return 64;
    const long long sq = static_cast<long long>(n) * n;
    return static_cast<int>(std::clamp<long long>((160000 + sq - 1) / sq, 4, 64));
}

int default_bandwidth(int n, double c) {
    if (n < 1) throw std::invalid_argument("default_bandwidth: n must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("default_bandwidth: c must be positive");
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n)) / c));
    return std::min(n, std::max(2, k));
}

}  // namespace ssm

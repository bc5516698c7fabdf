#include "ssm/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ssm/errors.hpp"
#include "ssm/rng.hpp"

namespace ssm {

TilePartition TilePartition::identity(int k) {
    TilePartition t;
    t.k = k;
    t.s = k * (k + 1) / 2;
    t.u.resize(k, k);
    int c = 0;
    for (int a = 0; a < k; ++a) {
        for (int b = a; b < k; ++b) {
            t.u(a, b) = t.u(b, a) = c++;
        }
    }
    return t;
}

TilePartition TilePartition::single(int k) {
    TilePartition t;
    t.k = k;
    t.s = 1;
    t.u = Eigen::MatrixXi::Zero(k, k);
    return t;
}

void TilePartition::validate() const {
    if (k < 1 || s < 1 || s > tile_count()) throw InvariantError("TilePartition: bad k or s");
    if (u.rows() != k || u.cols() != k) throw InvariantError("TilePartition: u must be k x k");
    std::vector<bool> used(static_cast<std::size_t>(s), false);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            if (u(a, b) != u(b, a)) throw InvariantError("TilePartition: u is not symmetric");
            if (u(a, b) < 0 || u(a, b) >= s) throw InvariantError("TilePartition: shape id out of range");
            used[static_cast<std::size_t>(u(a, b))] = true;
        }
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        throw InvariantError("TilePartition: empty shape");
    }
}

std::string FittedModel::to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["s"] = s;
    j["z"] = z.z;
    auto tiles = nlohmann::json::array();
    for (int a = 0; a < k; ++a) {
        for (int b = a; b < k; ++b) tiles.push_back({a, b, u.u(a, b)});
    }
    j["u"] = std::move(tiles);
    j["Q"] = q;
    j["loglik"] = loglik;
    j["bic"] = bic;
    j["n_params"] = n_params;
    return j.dump();
}

namespace {

struct ShapeTotals {
    std::vector<double> edges;
    std::vector<double> pairs;
    std::vector<int> tiles;
};

ShapeTotals shape_totals(const BlockAverages& ba, const TilePartition& u) {
    if (u.k != ba.k) throw std::invalid_argument("tile partition does not match block averages");
    ShapeTotals t;
    t.edges.assign(static_cast<std::size_t>(u.s), 0.0);
    t.pairs.assign(static_cast<std::size_t>(u.s), 0.0);
    t.tiles.assign(static_cast<std::size_t>(u.s), 0);
    for (int a = 0; a < ba.k; ++a) {
        for (int b = a; b < ba.k; ++b) {
            const auto c = static_cast<std::size_t>(u.u(a, b));
            if (c >= t.edges.size()) throw InvariantError("shape id out of range");
            t.edges[c] += ba.edge_counts(a, b);
            t.pairs[c] += ba.pair_counts(a, b);
            ++t.tiles[c];
        }
    }
    return t;
}

double total_density(const BlockAverages& ba) {
    const double pairs = ba.total_pairs();
    return pairs > 0 ? ba.total_edges() / pairs : 0.0;
}

}  // namespace

double shape_average(const BlockAverages& ba, const TilePartition& u, int c) {
    if (c < 0 || c >= u.s) throw std::invalid_argument("shape_average: shape id out of range");
    double weighted = 0.0;
    double weight = 0.0;
    int tiles = 0;
    for (int a = 0; a < ba.k; ++a) {
        for (int b = a; b < ba.k; ++b) {
            if (u.u(a, b) != c) continue;
            weighted += ba.pair_counts(a, b) * ba.means(a, b);
            weight += ba.pair_counts(a, b);
            ++tiles;
        }
    }
    if (tiles == 0) throw InvariantError("shape_average: shape has no tiles");
    return weight > 0 ? weighted / weight : total_density(ba);
}

std::vector<double> shape_averages(const BlockAverages& ba, const TilePartition& u) {
    const ShapeTotals t = shape_totals(ba, u);
    const double fallback = total_density(ba);
    std::vector<double> q(static_cast<std::size_t>(u.s));
    for (std::size_t c = 0; c < q.size(); ++c) {
        if (t.tiles[c] == 0) throw InvariantError("shape_averages: shape has no tiles");
        q[c] = t.pairs[c] > 0 ? t.edges[c] / t.pairs[c] : fallback;
    }
    return q;
}

namespace {

struct Point {
    double x;
    double w;
    int a;
    int b;
};

std::vector<Point> tile_points(const BlockAverages& ba) {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(ba.tile_count()));
    for (int a = 0; a < ba.k; ++a) {
        for (int b = a; b < ba.k; ++b) pts.push_back({ba.means(a, b), ba.pair_counts(a, b), a, b});
    }
    return pts;
}

// Index of the nearest centre; ties go to the lower index.
int nearest(const std::vector<double>& centres, double x) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centres.size(); ++c) {
        const double d = (x - centres[c]) * (x - centres[c]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

// Draws an index with probability proportional to `mass`; uniform if the
// total is zero.
std::size_t draw(Rng& rng, const std::vector<double>& mass) {
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (!(total > 0.0)) return static_cast<std::size_t>(rng.below(mass.size()));
    double r = rng.uniform() * total;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        r -= mass[i];
        if (r < 0.0) return i;
    }
    for (std::size_t i = mass.size(); i-- > 0;) {
        if (mass[i] > 0.0) return i;
    }
    return 0;
}

struct Clustering {
    std::vector<int> label;
    std::vector<double> centre;
    double wss = std::numeric_limits<double>::infinity();
};

void update_centres(const std::vector<Point>& pts, Clustering& cl, int s) {
    std::vector<double> sw(static_cast<std::size_t>(s), 0.0), swx(static_cast<std::size_t>(s), 0.0),
        sx(static_cast<std::size_t>(s), 0.0);
    std::vector<int> cnt(static_cast<std::size_t>(s), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto c = static_cast<std::size_t>(cl.label[i]);
        sw[c] += pts[i].w;
        swx[c] += pts[i].w * pts[i].x;
        sx[c] += pts[i].x;
        ++cnt[c];
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(s); ++c) {
        if (cnt[c] == 0) continue;
        cl.centre[c] = sw[c] > 0 ? swx[c] / sw[c] : sx[c] / cnt[c];
    }
}

// Moves the point farthest (weighted) from its centre, taken from a cluster
// with at least two members, into each empty cluster.
bool repair_empty(const std::vector<Point>& pts, Clustering& cl, int s) {
    std::vector<int> cnt(static_cast<std::size_t>(s), 0);
    for (int l : cl.label) ++cnt[static_cast<std::size_t>(l)];
    bool repaired = false;
    for (int c = 0; c < s; ++c) {
        if (cnt[static_cast<std::size_t>(c)] > 0) continue;
        std::size_t pick = pts.size();
        double best = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto l = static_cast<std::size_t>(cl.label[i]);
            if (cnt[l] < 2) continue;
            const double d = pts[i].x - cl.centre[l];
            const double score = (pts[i].w > 0 ? pts[i].w : 1.0) * d * d;
            if (score > best) {
                best = score;
                pick = i;
            }
        }
        if (pick == pts.size()) throw InvariantError("kmeans_tiles: cannot repair empty cluster");
        --cnt[static_cast<std::size_t>(cl.label[pick])];
        cl.label[pick] = c;
        cl.centre[static_cast<std::size_t>(c)] = pts[pick].x;
        ++cnt[static_cast<std::size_t>(c)];
        repaired = true;
    }
    return repaired;
}

double weighted_ss(const std::vector<Point>& pts, const Clustering& cl) {
    double ss = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = pts[i].x - cl.centre[static_cast<std::size_t>(cl.label[i])];
        ss += pts[i].w * d * d;
    }
    return ss;
}

Clustering lloyd_run(const std::vector<Point>& pts, int s, Rng& rng, const KMeansOptions& opts) {
    const std::size_t n = pts.size();
    Clustering cl;
    cl.label.assign(n, 0);

    // k-means++ seeding on the weighted D^2 distribution.
    std::vector<double> mass(n);
    for (std::size_t i = 0; i < n; ++i) mass[i] = pts[i].w;
    cl.centre.push_back(pts[draw(rng, mass)].x);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(cl.centre.size()) < s) {
        const double last = cl.centre.back();
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], (pts[i].x - last) * (pts[i].x - last));
            mass[i] = pts[i].w * d2[i];
            any = any || mass[i] > 0.0;
        }
        if (!any) {
            for (std::size_t i = 0; i < n; ++i) mass[i] = d2[i] > 0.0 ? 1.0 : 0.0;
        }
        cl.centre.push_back(pts[draw(rng, mass)].x);
    }

    for (int it = 0; it < opts.max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) cl.label[i] = nearest(cl.centre, pts[i].x);
        const bool repaired = repair_empty(pts, cl, s);
        const std::vector<double> previous = cl.centre;
        update_centres(pts, cl, s);
        double shift = 0.0;
        for (std::size_t c = 0; c < cl.centre.size(); ++c) shift = std::max(shift, std::abs(cl.centre[c] - previous[c]));
        if (!repaired && shift < opts.tolerance) break;
    }
    cl.wss = weighted_ss(pts, cl);
    return cl;
}

// Exact zero-SS clustering when there are no more distinct values than shapes.
Clustering exact_clustering(const std::vector<Point>& pts, int s) {
    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < pts.size(); ++i) groups[pts[i].x].push_back(i);
    std::vector<std::vector<std::size_t>> clusters;
    for (auto& [x, members] : groups) clusters.push_back(std::move(members));
    while (static_cast<int>(clusters.size()) < s) {
        auto largest = std::max_element(clusters.begin(), clusters.end(),
                                        [](const auto& l, const auto& r) { return l.size() < r.size(); });
        const std::size_t moved = largest->back();
        largest->pop_back();
        clusters.push_back({moved});
    }
    Clustering cl;
    cl.label.assign(pts.size(), 0);
    cl.centre.assign(clusters.size(), 0.0);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (std::size_t i : clusters[c]) cl.label[i] = static_cast<int>(c);
        cl.centre[c] = pts[clusters[c].front()].x;
    }
    cl.wss = 0.0;
    return cl;
}

}  // namespace

TilePartition kmeans_tiles(const BlockAverages& ba, int s, std::uint64_t seed, const KMeansOptions& opts) {
    const int tiles = ba.tile_count();
    if (s < 1 || s > tiles) throw std::invalid_argument("kmeans_tiles: need 1 <= s <= tile count");
    if (s == tiles) return TilePartition::identity(ba.k);
    if (s == 1) return TilePartition::single(ba.k);

    const std::vector<Point> pts = tile_points(ba);
    std::vector<double> values;
    for (const auto& p : pts) values.push_back(p.x);
    std::sort(values.begin(), values.end());
    const auto distinct = std::unique(values.begin(), values.end()) - values.begin();

    Clustering best;
    if (distinct <= s) {
        best = exact_clustering(pts, s);
    } else {
        Rng rng(seed);
        for (int r = 0; r < std::max(1, opts.restarts); ++r) {
            Clustering cl = lloyd_run(pts, s, rng, opts);
            if (cl.wss < best.wss) best = std::move(cl);
        }
    }

    // Number shapes by increasing centroid, ties by first member tile.
    std::vector<int> first(static_cast<std::size_t>(s), std::numeric_limits<int>::max());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto& f = first[static_cast<std::size_t>(best.label[i])];
        f = std::min(f, static_cast<int>(i));
    }
    std::vector<int> order(static_cast<std::size_t>(s));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int l, int r) {
        const double cl = best.centre[static_cast<std::size_t>(l)];
        const double cr = best.centre[static_cast<std::size_t>(r)];
        if (cl != cr) return cl < cr;
        return first[static_cast<std::size_t>(l)] < first[static_cast<std::size_t>(r)];
    });
    std::vector<int> rank(static_cast<std::size_t>(s));
    for (int pos = 0; pos < s; ++pos) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;

    TilePartition out;
    out.k = ba.k;
    out.s = s;
    out.u.resize(ba.k, ba.k);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const int c = rank[static_cast<std::size_t>(best.label[i])];
        out.u(pts[i].a, pts[i].b) = out.u(pts[i].b, pts[i].a) = c;
    }
    out.validate();
    return out;
}

double within_shape_ss(const BlockAverages& ba, const TilePartition& u) {
    const std::vector<double> q = shape_averages(ba, u);
    double ss = 0.0;
    for (int a = 0; a < ba.k; ++a) {
        for (int b = a; b < ba.k; ++b) {
            const double d = ba.means(a, b) - q[static_cast<std::size_t>(u.u(a, b))];
            ss += ba.pair_counts(a, b) * d * d;
        }
    }
    return ss;
}

double clamp_probability(double p, double m) {
    const double eps = m > 0 ? 1.0 / (2.0 * m) : 0.5;
    return std::clamp(p, eps, 1.0 - eps);
}

double model_loglik(const Graph& g, const FittedModel& model, const PairMask* mask) {
    if (model.z.n != g.n()) throw std::invalid_argument("model does not match graph");
    const double m = mask ? static_cast<double>(mask->pair_count()) : 0.5 * g.n() * (g.n() - 1.0);
    std::vector<double> log_p(model.q.size()), log_q(model.q.size());
    for (std::size_t c = 0; c < model.q.size(); ++c) {
        const double p = clamp_probability(model.q[c], m);
        log_p[c] = std::log(p);
        log_q[c] = std::log1p(-p);
    }
    double ll = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const int a = model.z.z[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < g.n(); ++j) {
            if (mask && !mask->observed(i, j)) continue;
            const auto c = static_cast<std::size_t>(model.u.u(a, model.z.z[static_cast<std::size_t>(j)]));
            ll += g.edge(i, j) ? log_p[c] : log_q[c];
        }
    }
    return ll;
}

double model_bic(const Graph& g, const FittedModel& model, const PairMask* mask) {
    const double m = mask ? static_cast<double>(mask->pair_count()) : 0.5 * g.n() * (g.n() - 1.0);
    return -2.0 * model_loglik(g, model, mask) + model.s * std::log(m);
}

FittedModel assemble_model(const BlockAverages& ba, const NodePartition& z, TilePartition u) {
    FittedModel model;
    model.k = ba.k;
    model.s = u.s;
    model.z = z;
    model.q = shape_averages(ba, u);
    model.n_params = u.s;

    const ShapeTotals t = shape_totals(ba, u);
    const double m = std::accumulate(t.pairs.begin(), t.pairs.end(), 0.0);
    double ll = 0.0;
    for (std::size_t c = 0; c < model.q.size(); ++c) {
        const double p = clamp_probability(model.q[c], m);
        ll += t.edges[c] * std::log(p) + (t.pairs[c] - t.edges[c]) * std::log1p(-p);
    }
    model.loglik = ll;
    model.bic = -2.0 * ll + u.s * std::log(std::max(m, 1.0));
    model.u = std::move(u);
    return model;
}

SmoothResult smooth_and_select(const Graph& g, const BlockAverages& ba, const NodePartition& z, std::uint64_t seed,
                               const PairMask* mask, const KMeansOptions& opts) {
    if (z.n != g.n() || z.k != ba.k) throw std::invalid_argument("smooth_and_select: inconsistent inputs");
    if (mask && mask->n() != g.n()) throw std::invalid_argument("smooth_and_select: mask does not match graph");
    const int tiles = ba.tile_count();
    SmoothResult out;
    out.curve.reserve(static_cast<std::size_t>(tiles));
    bool have_best = false;
    for (int s = 1; s <= tiles; ++s) {
        FittedModel model = assemble_model(ba, z, kmeans_tiles(ba, s, mix_seed(seed, static_cast<std::uint64_t>(s)), opts));
        out.curve.push_back({s, model.loglik, model.bic});
        if (!have_best || model.bic < out.best.bic) {
            out.best = model;
            have_best = true;
        }
        if (s == tiles) out.histogram = std::move(model);
    }
    return out;
}

Eigen::MatrixXd predict_theta(const FittedModel& model) {
    const int n = model.z.n;
    Eigen::MatrixXd theta(n, n);
    for (int i = 0; i < n; ++i) {
        const int a = model.z.z[static_cast<std::size_t>(i)];
        theta(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double p = model.q[static_cast<std::size_t>(model.u.u(a, model.z.z[static_cast<std::size_t>(j)]))];
            theta(i, j) = theta(j, i) = p;
        }
    }
    return theta;
}

double lsq_objective(const Graph& g, const FittedModel& model) {
    const Eigen::MatrixXd theta = predict_theta(model);
    double sum = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        for (int j = i + 1; j < g.n(); ++j) {
            const double d = g(i, j) - theta(i, j);
            sum += d * d;
        }
    }
    return sum;
}

double lsq_objective(const BlockAverages& ba, const TilePartition& u) {
    // With binary entries, sum (A - Q)^2 over a shape is E - E^2 / P at Q = E / P.
    const ShapeTotals t = shape_totals(ba, u);
    double sum = 0.0;
    for (std::size_t c = 0; c < t.edges.size(); ++c) {
        if (t.pairs[c] > 0) sum += t.edges[c] - t.edges[c] * t.edges[c] / t.pairs[c];
    }
    return sum;
}

namespace {

template <typename F>
void for_each_labelling(int length, int values, std::vector<int>& current, int pos, F&& visit) {
    if (pos == length) {
        visit(current);
        return;
    }
    for (int v = 0; v < values; ++v) {
        current[static_cast<std::size_t>(pos)] = v;
        for_each_labelling(length, values, current, pos + 1, visit);
    }
}

}  // namespace

LsqOptimum brute_force_lsq(const Graph& g, int k, int s) {
    const int n = g.n();
    if (n > 8 || k > 3 || s > 3) throw std::invalid_argument("brute_force_lsq: requires n <= 8, k <= 3, s <= 3");
    if (k < 1 || k > n) throw std::invalid_argument("brute_force_lsq: need 1 <= k <= n");
    const int tiles = k * (k + 1) / 2;
    if (s < 1 || s > tiles) throw std::invalid_argument("brute_force_lsq: need 1 <= s <= tile count");

    std::vector<std::pair<int, int>> tile_index;
    for (int a = 0; a < k; ++a) {
        for (int b = a; b < k; ++b) tile_index.emplace_back(a, b);
    }
    std::vector<TilePartition> tile_partitions;
    {
        std::vector<int> cur(static_cast<std::size_t>(tiles));
        for_each_labelling(tiles, s, cur, 0, [&](const std::vector<int>& lab) {
            std::vector<bool> used(static_cast<std::size_t>(s), false);
            for (int l : lab) used[static_cast<std::size_t>(l)] = true;
            if (std::find(used.begin(), used.end(), false) != used.end()) return;
            TilePartition t;
            t.k = k;
            t.s = s;
            t.u.resize(k, k);
            for (std::size_t i = 0; i < lab.size(); ++i) {
                auto [a, b] = tile_index[i];
                t.u(a, b) = t.u(b, a) = lab[i];
            }
            tile_partitions.push_back(std::move(t));
        });
    }

    LsqOptimum best;
    best.objective = std::numeric_limits<double>::infinity();
    std::vector<int> cur(static_cast<std::size_t>(n));
    for_each_labelling(n, k, cur, 0, [&](const std::vector<int>& lab) {
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (int l : lab) ++sizes[static_cast<std::size_t>(l)];
        const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
        if (*lo == 0 || *hi - *lo > 1) return;
        const NodePartition z = NodePartition::from_labels(lab, k);
        const BlockAverages ba = block_averages(g, z, nullptr);
        for (const auto& t : tile_partitions) {
            const double obj = lsq_objective(ba, t);
            if (obj < best.objective) {
                best.objective = obj;
                best.model = assemble_model(ba, z, t);
            }
        }
    });
    return best;
}

}  // namespace ssm

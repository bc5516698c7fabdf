#include "ssm/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ssm/errors.hpp"
#include "ssm/rng.hpp"

namespace ssm {

void SsmSpec::validate() const {
    if (k < 1) throw InvariantError("SsmSpec: k must be positive");
    if (s < 1 || s > k * (k + 1) / 2) throw InvariantError("SsmSpec: s out of range");
    if (u.rows() != k || u.cols() != k) throw InvariantError("SsmSpec: u must be k x k");
    if (static_cast<int>(q.size()) != s) throw InvariantError("SsmSpec: Q must have s entries");
    std::vector<bool> used(static_cast<std::size_t>(s), false);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            const int c = u(a, b);
            if (c != u(b, a)) throw InvariantError("SsmSpec: u is not symmetric");
            if (c < 0 || c >= s) throw InvariantError("SsmSpec: shape id out of range");
            used[static_cast<std::size_t>(c)] = true;
        }
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        throw InvariantError("SsmSpec: every shape must own at least one tile");
    }
    for (double p : q) {
        if (!(p > 0.0 && p < 1.0)) throw InvariantError("SsmSpec: probabilities must lie in (0, 1)");
    }
}

std::string SsmSpec::to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["s"] = s;
    auto tiles = nlohmann::json::array();
    for (int a = 0; a < k; ++a) {
        for (int b = a; b < k; ++b) tiles.push_back({a, b, u(a, b)});
    }
    j["u"] = std::move(tiles);
    j["Q"] = q;
    return j.dump();
}

SsmSpec SsmSpec::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SsmSpec spec;
    spec.k = j.at("k").get<int>();
    spec.s = j.at("s").get<int>();
    spec.q = j.at("Q").get<std::vector<double>>();
    if (spec.k < 1) throw InvariantError("SsmSpec: k must be positive");
    spec.u = Eigen::MatrixXi::Constant(spec.k, spec.k, -1);
    for (const auto& t : j.at("u")) {
        const int a = t.at(0).get<int>();
        const int b = t.at(1).get<int>();
        const int c = t.at(2).get<int>();
        if (a < 0 || b < 0 || a >= spec.k || b >= spec.k) {
            throw InvariantError("SsmSpec: tile index out of range");
        }
        spec.u(a, b) = c;
        spec.u(b, a) = c;
    }
    if ((spec.u.array() < 0).any()) throw InvariantError("SsmSpec: u does not cover every tile");
    spec.validate();
    return spec;
}

SsmSpec SsmSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open shape model file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

int grid_cell(double x, int k) noexcept {
    const int c = static_cast<int>(std::ceil(x * k)) - 1;
    return std::clamp(c, 0, k - 1);
}

Graphon Graphon::formula(std::string name, std::function<double(double, double)> f) {
    Graphon g;
    g.kind_ = GraphonKind::formula;
    g.name_ = std::move(name);
    g.f_ = std::move(f);
    return g;
}

Graphon Graphon::block_table(std::string name, Eigen::MatrixXd table) {
    if (table.rows() != table.cols() || table.rows() == 0) {
        throw std::invalid_argument("block table must be square and non-empty");
    }
    if (!table.isApprox(table.transpose(), 0.0) ||
        (table.array() < 0.0).any() || (table.array() > 1.0).any()) {
        throw std::invalid_argument("block table must be symmetric with entries in [0, 1]");
    }
    Graphon g;
    g.kind_ = GraphonKind::block_table;
    g.name_ = std::move(name);
    g.table_ = std::move(table);
    return g;
}

Graphon Graphon::shape_model(std::string name, SsmSpec spec) {
    spec.validate();
    Graphon g;
    g.kind_ = GraphonKind::shape_model;
    g.name_ = std::move(name);
    g.table_.resize(spec.k, spec.k);
    for (int a = 0; a < spec.k; ++a) {
        for (int b = 0; b < spec.k; ++b) g.table_(a, b) = spec.q[static_cast<std::size_t>(spec.u(a, b))];
    }
    g.spec_ = std::move(spec);
    return g;
}

int Graphon::resolution() const noexcept {
    return kind_ == GraphonKind::formula ? 0 : static_cast<int>(table_.rows());
}

double Graphon::eval(double x, double y) const {
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
        throw std::invalid_argument("graphon arguments must lie in [0, 1]");
    }
    if (kind_ == GraphonKind::formula) return f_(x, y);
    const int k = resolution();
    return table_(grid_cell(x, k), grid_cell(y, k));
}

LatentSample sample_latents(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_latents: n must be positive");
    Rng rng(seed);
    LatentSample out;
    out.seed = seed;
    out.xi.resize(static_cast<std::size_t>(n));
    for (auto& x : out.xi) x = rng.uniform();
    return out;
}

Eigen::MatrixXd theta_from_latents(const Graphon& f, const LatentSample& xi) {
    const int n = static_cast<int>(xi.xi.size());
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double p = f.eval(xi.xi[static_cast<std::size_t>(i)], xi.xi[static_cast<std::size_t>(j)]);
            theta(i, j) = theta(j, i) = p;
        }
    }
    return theta;
}

SampledGraph sample_graph(const Graphon& f, const LatentSample& xi, std::uint64_t seed) {
    Eigen::MatrixXd theta = theta_from_latents(f, xi);
    const int n = static_cast<int>(theta.rows());
    AdjMatrix adj = AdjMatrix::Zero(n, n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.bernoulli(theta(i, j))) adj(i, j) = adj(j, i) = 1;
        }
    }
    return {Graph(std::move(adj)), GroundTruth{std::move(theta), xi, f}};
}

Graphon make_latent_distance() {
    return Graphon::formula("f0", [](double x, double y) { return std::abs(x - y); });
}

Graphon make_logit_sum() {
    return Graphon::formula("f1", [](double x, double y) {
        return 1.0 / (1.0 + std::exp(-10.0 * (x * x + y * y)));
    });
}

Graphon make_log_max() {
    return Graphon::formula("f2", [](double x, double y) { return std::log(1.0 + 0.5 * std::max(x, y)); });
}

Graphon make_constant(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("constant graphon needs p in [0, 1]");
    return Graphon::block_table("const:" + std::to_string(p), Eigen::MatrixXd::Constant(1, 1, p));
}

Graphon make_assortative_sbm(int k, double p_in, double p_out) {
    if (k < 1) throw std::invalid_argument("make_assortative_sbm: k must be positive");
    if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0)) {
        throw std::invalid_argument("make_assortative_sbm: probabilities must lie in [0, 1]");
    }
    Eigen::MatrixXd table = Eigen::MatrixXd::Constant(k, k, p_out);
    table.diagonal().setConstant(p_in);
    return Graphon::block_table(p_in >= p_out ? "sbm_assort" : "sbm_disassort", std::move(table));
}

Eigen::MatrixXd hierarchical_sbm_table() {
    Eigen::MatrixXd t(4, 4);
    // clang-format off
    t << 0.70, 0.30, 0.10, 0.10,
         0.30, 0.50, 0.10, 0.10,
         0.10, 0.10, 0.45, 0.20,
         0.10, 0.10, 0.20, 0.25;
    // clang-format on
    return t;
}

Graphon make_hierarchical_sbm() {
    return Graphon::block_table("f3", hierarchical_sbm_table());
}

SsmSpec planted_ssm_spec() {
    SsmSpec spec;
    spec.k = 10;
    spec.s = 5;
    spec.q = {0.05, 0.25, 0.45, 0.65, 0.85};
    spec.u.resize(10, 10);
    for (int a = 0; a < 10; ++a) {
        for (int b = 0; b < 10; ++b) spec.u(a, b) = std::min(4, (a + b) * 5 / 19);
    }
    spec.validate();
    return spec;
}

SsmSpec ssm_from_table(const Eigen::MatrixXd& table) {
    std::map<double, int> ids;
    const int k = static_cast<int>(table.rows());
    for (int a = 0; a < k; ++a) {
        for (int b = a; b < k; ++b) ids.emplace(table(a, b), 0);
    }
    SsmSpec spec;
    spec.k = k;
    spec.s = static_cast<int>(ids.size());
    int next = 0;
    for (auto& [p, id] : ids) {
        id = next++;
        spec.q.push_back(p);
    }
    spec.u.resize(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) spec.u(a, b) = ids.at(table(a, b));
    }
    return spec;
}

std::vector<std::string> graphon_zoo() {
    return {"f0", "f1", "f2", "f3", "sbm_assort", "sbm_disassort", "ssm_planted", "const:<p>", "ssm:<file>"};
}

Graphon graphon_by_name(const std::string& name) {
    if (name == "f0") return make_latent_distance();
    if (name == "f1") return make_logit_sum();
    if (name == "f2") return make_log_max();
    if (name == "f3") return make_hierarchical_sbm();
    if (name == "sbm_assort") return make_assortative_sbm(5, 0.6, 0.1);
    if (name == "sbm_disassort") return make_assortative_sbm(5, 0.1, 0.6);
    if (name == "ssm_planted") return Graphon::shape_model("ssm_planted", planted_ssm_spec());
    if (name.rfind("const:", 0) == 0) {
        std::size_t used = 0;
        const std::string value = name.substr(6);
        double p = 0.0;
        try {
            p = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != value.size()) throw std::invalid_argument("bad constant graphon: " + name);
        Graphon g = make_constant(p);
        return Graphon::block_table(name, g.table());
    }
    if (name.rfind("ssm:", 0) == 0) return Graphon::shape_model(name, SsmSpec::load(name.substr(4)));
    std::string known;
    for (const auto& z : graphon_zoo()) known += (known.empty() ? "" : ", ") + z;
    throw std::invalid_argument("unknown graphon '" + name + "' (known: " + known + ")");
}

}  // namespace ssm

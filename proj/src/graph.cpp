#include "ssm/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ssm/errors.hpp"
#include "ssm/rng.hpp"

namespace ssm {

namespace {

std::size_t check_symmetric_binary(const AdjMatrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(std::string(what) + ": matrix must be square");
    }
    std::size_t upper = 0;
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (m(j, j) != 0) throw InvariantError(std::string(what) + ": non-zero diagonal");
        for (Eigen::Index i = 0; i < j; ++i) {
            const auto v = m(i, j);
            if (v > 1) throw InvariantError(std::string(what) + ": entries must be 0 or 1");
            if (v != m(j, i)) throw InvariantError(std::string(what) + ": matrix is not symmetric");
            upper += v;
        }
    }
    return upper;
}

bool parse_int(const std::string& s, long long& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

Graph::Graph(AdjMatrix adj, std::vector<std::string> labels)
    : adj_(std::move(adj)), labels_(std::move(labels)) {
    edge_count_ = check_symmetric_binary(adj_, "Graph");
    if (!labels_.empty() && static_cast<Eigen::Index>(labels_.size()) != adj_.rows()) {
        throw std::invalid_argument("Graph: label count does not match node count");
    }
}

Graph Graph::empty(int n) {
    if (n < 0) throw std::invalid_argument("Graph: negative node count");
    return Graph(AdjMatrix::Zero(n, n));
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                        std::vector<std::string> labels) {
    if (n < 0) throw std::invalid_argument("Graph: negative node count");
    AdjMatrix adj = AdjMatrix::Zero(n, n);
    for (auto [i, j] : edges) {
        if (i < 0 || j < 0 || i >= n || j >= n) {
            throw std::invalid_argument("Graph: edge endpoint out of range");
        }
        if (i == j) continue;
        adj(i, j) = 1;
        adj(j, i) = 1;
    }
    return Graph(std::move(adj), std::move(labels));
}

std::string Graph::label(int i) const {
    return labels_.empty() ? std::to_string(i) : labels_.at(static_cast<std::size_t>(i));
}

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edge_count_);
    for (int i = 0; i < n(); ++i) {
        for (int j = i + 1; j < n(); ++j) {
            if (adj_(i, j)) out.emplace_back(i, j);
        }
    }
    return out;
}

double Graph::density() const noexcept {
    const double pairs = 0.5 * n() * (n() - 1.0);
    return pairs > 0 ? static_cast<double>(edge_count_) / pairs : 0.0;
}

PairMask::PairMask(AdjMatrix observed) : observed_(std::move(observed)) {
    pair_count_ = check_symmetric_binary(observed_, "PairMask");
}

PairMask PairMask::full(int n) {
    AdjMatrix m = AdjMatrix::Ones(n, n);
    m.diagonal().setZero();
    return PairMask(std::move(m));
}

std::vector<int> degree_sequence(const Graph& g) {
    std::vector<int> deg(static_cast<std::size_t>(g.n()), 0);
    const auto& a = g.adjacency();
    for (int j = 0; j < g.n(); ++j) {
        int d = 0;
        for (int i = 0; i < g.n(); ++i) d += a(i, j);
        deg[static_cast<std::size_t>(j)] = d;
    }
    return deg;
}

HoldoutSplit holdout_split(const Graph& g, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("holdout_split: fraction must lie in (0, 1)");
    }
    const int n = g.n();
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    Rng rng(seed);
    rng.shuffle(std::span(pairs));
    const auto n_test = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pairs.size())));

    AdjMatrix train = AdjMatrix::Ones(n, n);
    train.diagonal().setZero();
    AdjMatrix test = AdjMatrix::Zero(n, n);
    for (std::size_t t = 0; t < n_test; ++t) {
        auto [i, j] = pairs[t];
        train(i, j) = train(j, i) = 0;
        test(i, j) = test(j, i) = 1;
    }
    return {PairMask(std::move(train)), PairMask(std::move(test))};
}

Graph parse_edge_list(std::istream& in, bool drop_isolated) {
    std::vector<std::pair<std::string, std::string>> raw;
    long long declared_nodes = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream tokens(line);
        std::string a;
        if (!(tokens >> a)) continue;
        if (a[0] == '#') {
            std::string key;
            long long count = 0;
            std::istringstream header(line.substr(line.find('#') + 1));
            if (header >> key && key == "nodes" && header >> count && count >= 0) {
                declared_nodes = count;
            }
            continue;
        }
        std::string b;
        if (!(tokens >> b)) throw ParseError("expected two node identifiers", line_no);
        raw.emplace_back(std::move(a), std::move(b));
    }

    std::vector<std::string> ids;
    {
        std::unordered_map<std::string, bool> seen;
        for (const auto& [a, b] : raw) {
            if (seen.emplace(a, true).second) ids.push_back(a);
            if (seen.emplace(b, true).second) ids.push_back(b);
        }
    }
    bool numeric = true;
    std::unordered_map<std::string, long long> as_int;
    for (const auto& id : ids) {
        long long v = 0;
        if (!parse_int(id, v)) {
            numeric = false;
            break;
        }
        as_int[id] = v;
    }
    if (numeric && declared_nodes >= 0) {
        bool in_range = std::all_of(ids.begin(), ids.end(), [&](const std::string& id) {
            return as_int[id] >= 0 && as_int[id] < declared_nodes;
        });
        if (in_range) {
            ids.clear();
            for (long long v = 0; v < declared_nodes; ++v) ids.push_back(std::to_string(v));
            as_int.clear();
            for (long long v = 0; v < declared_nodes; ++v) as_int[std::to_string(v)] = v;
        }
    }
    if (numeric) {
        std::sort(ids.begin(), ids.end(),
                  [&](const std::string& x, const std::string& y) { return as_int[x] < as_int[y]; });
    } else {
        std::sort(ids.begin(), ids.end());
    }

    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int>(i);
    const int n = static_cast<int>(ids.size());
    AdjMatrix adj = AdjMatrix::Zero(n, n);
    for (const auto& [a, b] : raw) {
        const int i = index[a];
        const int j = index[b];
        if (i == j) continue;
        adj(i, j) = adj(j, i) = 1;
    }

    if (drop_isolated) {
        std::vector<int> keep;
        for (int i = 0; i < n; ++i) {
            if (adj.col(i).cast<int>().sum() > 0) keep.push_back(i);
        }
        if (static_cast<int>(keep.size()) != n) {
            const int m = static_cast<int>(keep.size());
            AdjMatrix sub(m, m);
            std::vector<std::string> kept_ids;
            kept_ids.reserve(keep.size());
            for (int a = 0; a < m; ++a) {
                kept_ids.push_back(ids[static_cast<std::size_t>(keep[a])]);
                for (int b = 0; b < m; ++b) sub(a, b) = adj(keep[a], keep[b]);
            }
            adj = std::move(sub);
            ids = std::move(kept_ids);
        }
    }
    if (adj.rows() == 0) throw EmptyGraphError("edge list yields an empty graph");
    return Graph(std::move(adj), std::move(ids));
}

Graph load_edge_list(const std::filesystem::path& path, bool drop_isolated) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open edge list: " + path.string());
    return parse_edge_list(in, drop_isolated);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    const bool integer_labels = g.labels().empty() || [&] {
        for (int i = 0; i < g.n(); ++i) {
            if (g.labels()[static_cast<std::size_t>(i)] != std::to_string(i)) return false;
        }
        return true;
    }();
    if (integer_labels) out << "# nodes " << g.n() << '\n';
    for (auto [i, j] : g.edges()) out << g.label(i) << ' ' << g.label(j) << '\n';
}

void write_edge_list(const Graph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write edge list: " + path.string());
    write_edge_list(g, out);
}

std::string graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["n"] = g.n();
    auto edges = nlohmann::json::array();
    for (auto [a, b] : g.edges()) edges.push_back({a, b});
    j["edges"] = std::move(edges);
    j["labels"] = g.labels();
    return j.dump();
}

Graph graph_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const int n = j.at("n").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
    return Graph::from_edges(n, edges, std::move(labels));
}

}  // namespace ssm

#include "ssm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "ssm/errors.hpp"
#include "ssm/rng.hpp"

namespace ssm {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

std::string row_key(const std::string& method, const std::string& graphon, const std::string& n,
                    const std::string& seed) {
    return method + '\x1f' + graphon + '\x1f' + n + '\x1f' + seed;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

void BenchConfig::validate() const {
    if (graphons.empty()) throw std::invalid_argument("config: graphons must not be empty");
    if (methods.empty()) throw std::invalid_argument("config: methods must not be empty");
    for (int n : n_grid) {
        if (n < 10) throw std::invalid_argument("config: every n_grid entry must be >= 10");
    }
    if (n_grid.empty()) throw std::invalid_argument("config: n_grid must not be empty");
    if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
        throw std::invalid_argument("config: holdout_fraction must lie in [0, 1)");
    }
    if (kmeans_restarts < 1) throw std::invalid_argument("config: kmeans_restarts must be >= 1");
    if (histogram_restarts < -1) throw std::invalid_argument("config: histogram_restarts must be >= -1");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    for (const auto& m : methods) {
        if (std::find(method_names().begin(), method_names().end(), m) == method_names().end()) {
            throw std::invalid_argument("config: unknown method '" + m + "'");
        }
    }
    for (const auto& g : graphons) (void)graphon_by_name(g);
}

EstimatorOptions BenchConfig::estimator_options() const {
    EstimatorOptions o;
    o.k = k;
    o.bandwidth_c = bandwidth_c;
    o.max_sweeps = max_sweeps;
    o.histogram_restarts = histogram_restarts;
    o.restarts = kmeans_restarts;
    o.usvt_eta = usvt_eta;
    o.sas_h = sas_h;
    o.sas_window = sas_window;
    return o;
}

BenchConfig BenchConfig::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    BenchConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("graphons", c.graphons);
    get("n_grid", c.n_grid);
    get("replicates", c.replicates);
    get("master_seed", c.master_seed);
    get("bandwidth_c", c.bandwidth_c);
    get("k", c.k);
    get("kmeans_restarts", c.kmeans_restarts);
    get("max_sweeps", c.max_sweeps);
    get("histogram_restarts", c.histogram_restarts);
    get("holdout_fraction", c.holdout_fraction);
    get("usvt_eta", c.usvt_eta);
    get("sas_h", c.sas_h);
    get("sas_window", c.sas_window);
    get("mise_grid", c.mise_grid);
    get("methods", c.methods);
    get("threads", c.threads);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    return c;
}

BenchConfig BenchConfig::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

std::string BenchConfig::to_json() const {
    nlohmann::json j;
    j["graphons"] = graphons;
    j["n_grid"] = n_grid;
    j["replicates"] = replicates;
    j["master_seed"] = master_seed;
    j["bandwidth_c"] = bandwidth_c;
    j["k"] = k;
    j["kmeans_restarts"] = kmeans_restarts;
    j["max_sweeps"] = max_sweeps;
    j["histogram_restarts"] = histogram_restarts;
    j["holdout_fraction"] = holdout_fraction;
    j["usvt_eta"] = usvt_eta;
    j["sas_h"] = sas_h;
    j["sas_window"] = sas_window;
    j["mise_grid"] = mise_grid;
    j["methods"] = methods;
    j["output_dir"] = output_dir.string();
    j["threads"] = threads;
    return j.dump(2);
}

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& graphon, int n, int replicate) {
    std::uint64_t s = mix_seed(master_seed, graphon);
    s = mix_seed(s, static_cast<std::uint64_t>(n));
    return mix_seed(s, static_cast<std::uint64_t>(replicate));
}

SampledGraph simulate(const Graphon& f, int n, std::uint64_t seed) {
    return sample_graph(f, sample_latents(n, mix_seed(seed, "latents")), mix_seed(seed, "graph"));
}

EvalReport run_cell(const BenchConfig& config, const std::string& graphon, int n, int replicate,
                    const std::string& method) {
    const Graphon f = graphon_by_name(graphon);
    const std::uint64_t seed = cell_seed(config.master_seed, graphon, n, replicate);
    const SampledGraph sg = simulate(f, n, seed);
    const EstimatorOptions opts = config.estimator_options();

    EvalReport r;
    r.method = method;
    r.graphon = graphon;
    r.n = n;
    r.seed = seed;
    const auto t0 = Clock::now();
    const Estimate est = estimate(sg.graph, method, mix_seed(seed, "fit"), opts);
    r.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    r.mse = mse(est.theta, sg.truth);
    r.mise_aligned = mise_aligned(est.theta, f, sg.truth.latents, config.mise_grid);
    if (config.holdout_fraction > 0.0) {
        r.auc = link_prediction_auc(sg.graph, method, config.holdout_fraction, seed, opts);
    }
    r.n_params = est.n_params;
    r.s = est.s;
    r.k = est.k;
    return r;
}

std::string format_row(const EvalReport& r) {
    std::ostringstream os;
    os << r.method << ',' << r.graphon << ',' << r.n << ',' << r.seed << ',' << fmt(r.mse) << ','
       << fmt(r.mise_aligned) << ',' << fmt(r.auc) << ',' << r.n_params << ',' << r.s << ',' << r.k << ','
       << fmt(std::round(r.runtime_ms * 1000.0) / 1000.0) << ',';
    return os.str();
}

std::string format_error_row(const std::string& method, const std::string& graphon, int n, std::uint64_t seed,
                             const std::string& error) {
    std::ostringstream os;
    os << method << ',' << graphon << ',' << n << ',' << seed << ",,,,,,,," << sanitize(error);
    return os.str();
}

BenchSummary run_benchmark(const BenchConfig& config, std::ostream* log) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);
    BenchSummary summary;
    summary.csv_path = config.output_dir / "benchmark.csv";

    std::set<std::string> done;
    const bool exists = std::filesystem::exists(summary.csv_path) && std::filesystem::file_size(summary.csv_path) > 0;
    if (exists) {
        std::ifstream in(summary.csv_path);
        std::string line;
        std::getline(in, line);
        if (line != kBenchHeader) throw Error("existing benchmark CSV has an unexpected header");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv(line);
            if (f.size() >= 4) done.insert(row_key(f[0], f[1], f[2], f[3]));
        }
    }

    struct Task {
        std::string graphon;
        int n;
        int replicate;
        std::string method;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const auto& g : config.graphons) {
        for (int n : config.n_grid) {
            for (int r = 0; r < config.replicates; ++r) {
                const std::uint64_t seed = cell_seed(config.master_seed, g, n, r);
                for (const auto& m : config.methods) {
                    ++summary.cells_total;
                    if (done.count(row_key(m, g, std::to_string(n), std::to_string(seed)))) {
                        ++summary.rows_skipped;
                        continue;
                    }
                    tasks.push_back({g, n, r, m, seed});
                }
            }
        }
    }

    std::ofstream out(summary.csv_path, std::ios::app);
    if (!out) throw Error("cannot write " + summary.csv_path.string());
    if (!exists) out << kBenchHeader << '\n' << std::flush;

    std::mutex out_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const Task& task = tasks[t];
            std::string row;
            bool failed = false;
            try {
                row = format_row(run_cell(config, task.graphon, task.n, task.replicate, task.method));
            } catch (const std::exception& e) {
                row = format_error_row(task.method, task.graphon, task.n, task.seed, e.what());
                failed = true;
            }
            std::lock_guard lock(out_mutex);
            out << row << '\n' << std::flush;
            ++summary.rows_written;
            if (failed) ++summary.errors;
            if (log) {
                *log << "[" << summary.rows_written << "/" << tasks.size() << "] " << task.method << ' '
                     << task.graphon << " n=" << task.n << " rep=" << task.replicate << (failed ? " ERROR" : "")
                     << '\n';
            }
        }
    };
    const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return summary;
}

void print_aggregate(const std::filesystem::path& csv, std::ostream& out) {
    std::ifstream in(csv);
    if (!in) throw Error("cannot open " + csv.string());
    struct Acc {
        std::vector<double> mse, mise, auc;
    };
    std::map<std::tuple<std::string, int, std::string>, Acc> groups;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto f = split_csv(line);
        if (f.size() < 12 || !f[11].empty() || f[4].empty()) continue;
        auto& acc = groups[{f[1], std::stoi(f[2]), f[0]}];
        acc.mse.push_back(std::stod(f[4]));
        if (!f[5].empty()) acc.mise.push_back(std::stod(f[5]));
        if (!f[6].empty()) acc.auc.push_back(std::stod(f[6]));
    }
    auto stat = [](const std::vector<double>& v) {
        if (v.empty()) return std::string("-");
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
        std::ostringstream os;
        os << std::setprecision(4) << mean << " +- " << sd;
        return os.str();
    };
    out << std::left << std::setw(14) << "graphon" << std::setw(7) << "n" << std::setw(11) << "method"
        << std::setw(24) << "mse" << std::setw(24) << "mise_aligned" << "auc\n";
    for (const auto& [key, acc] : groups) {
        const auto& [g, n, m] = key;
        out << std::left << std::setw(14) << g << std::setw(7) << n << std::setw(11) << m << std::setw(24)
            << stat(acc.mse) << std::setw(24) << stat(acc.mise) << stat(acc.auc) << '\n';
    }
}

void write_simulation(const SampledGraph& sg, std::uint64_t seed, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_edge_list(sg.graph, out_dir / "graph.edges");

    nlohmann::json j;
    j["graphon"] = sg.truth.source.name();
    j["n"] = sg.graph.n();
    j["seed"] = seed;
    j["xi"] = sg.truth.latents.xi;
    j["latent_seed"] = sg.truth.latents.seed;
    const int n = sg.graph.n();
    auto theta = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(static_cast<std::size_t>(n));
        for (int c = 0; c < n; ++c) row[static_cast<std::size_t>(c)] = sg.truth.theta(i, c);
        theta.push_back(std::move(row));
    }
    j["theta"] = std::move(theta);
    const int k = sg.truth.source.resolution();
    if (k > 0) {
        std::vector<int> blocks;
        for (double x : sg.truth.latents.xi) blocks.push_back(grid_cell(x, k));
        j["planted_blocks"] = blocks;
    }
    std::ofstream out(out_dir / "truth.json");
    if (!out) throw Error("cannot write truth file in " + out_dir.string());
    out << j.dump() << '\n';
}

TruthFile load_truth(const std::filesystem::path& path) {
    const auto j = nlohmann::json::parse(read_file(path));
    TruthFile t;
    t.graphon = j.at("graphon").get<std::string>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.latents.xi = j.at("xi").get<std::vector<double>>();
    t.latents.seed = j.value("latent_seed", std::uint64_t{0});
    const auto& rows = j.at("theta");
    const auto n = static_cast<Eigen::Index>(rows.size());
    t.theta.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != n) throw Error("truth file: theta is not square");
        for (Eigen::Index c = 0; c < n; ++c) t.theta(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    if (j.contains("planted_blocks")) t.planted_blocks = j["planted_blocks"].get<std::vector<int>>();
    return t;
}

std::string FitSummary::line() const {
    std::ostringstream os;
    os << "method=" << method << " n=" << n << " k=" << k << " s=" << s << " n_params=" << n_params
       << " loglik=" << std::setprecision(10) << loglik << " bic=" << bic << " runtime_ms=" << std::setprecision(6)
       << runtime_ms;
    return os.str();
}

FitSummary fit_to_files(const Graph& g, const std::string& method, std::uint64_t seed, const EstimatorOptions& opts,
                        const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto t0 = Clock::now();
    const Estimate est = estimate(g, method, seed, opts);
    FitSummary summary;
    summary.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    summary.method = method;
    summary.n = g.n();
    summary.k = est.k;
    summary.s = est.s;
    summary.n_params = est.n_params;

    std::ofstream model(out_dir / "model.json");
    if (!model) throw Error("cannot write model.json in " + out_dir.string());
    if (est.fit) {
        const FittedModel& m = method == "ssm" ? est.fit->smooth.best : est.fit->smooth.histogram;
        summary.loglik = m.loglik;
        summary.bic = m.bic;
        model << m.to_json() << '\n';
        std::ofstream curve(out_dir / "bic_curve.csv");
        curve << "s,loglik,bic\n";
        for (const auto& p : est.fit->smooth.curve) curve << p.s << ',' << fmt(p.loglik) << ',' << fmt(p.bic) << '\n';
    } else {
        nlohmann::json j;
        j["method"] = method;
        j["n"] = g.n();
        j["n_params"] = est.n_params;
        if (est.k > 0) j["k"] = est.k;
        model << j.dump() << '\n';
        summary.loglik = std::nan("");
        summary.bic = std::nan("");
    }
    return summary;
}

EvalReport evaluate_against_truth(const Graph& g, const TruthFile& truth, const std::string& method,
                                  std::uint64_t seed, const EstimatorOptions& opts, double fraction, int mise_grid) {
    if (truth.theta.rows() != g.n()) throw std::invalid_argument("truth file does not match the graph size");
    EvalReport r;
    r.method = method;
    r.graphon = truth.graphon;
    r.n = g.n();
    r.seed = seed;
    const auto t0 = Clock::now();
    const Estimate est = estimate(g, method, mix_seed(seed, "fit"), opts);
    r.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    r.mse = mse(est.theta, truth.theta);
    if (!truth.latents.xi.empty()) {
        try {
            r.mise_aligned = mise_aligned(est.theta, graphon_by_name(truth.graphon), truth.latents, mise_grid);
        } catch (const std::invalid_argument&) {
            // Graphon not reconstructible from its name.
        } catch (const Error&) {
            // e.g. an ssm: spec file that has since moved.
        }
    }
    if (fraction > 0.0) r.auc = link_prediction_auc(g, method, fraction, seed, opts);
    r.n_params = est.n_params;
    r.s = est.s;
    r.k = est.k;
    return r;
}

}  // namespace ssm

// Command-line front end: simulate | fit | benchmark | eval.
//
// Exit codes: 0 success, 2 usage error, 1 runtime failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ssm/bench.hpp"
#include "ssm/errors.hpp"
#include "ssm/graph.hpp"
#include "ssm/graphon.hpp"

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EstimatorFlags {
    int k = 0;
    double bandwidth_c = 2.0;
    int restarts = 10;
    int max_sweeps = 50;
    int histogram_restarts = -1;
    double eta = 0.01;
    int sas_h = 0;
    int sas_window = 3;

    void attach(CLI::App* app) {
        app->add_option("--k", k, "Number of node groups (default: round(sqrt(n)/c))")->check(CLI::NonNegativeNumber);
        app->add_option("--bandwidth-c", bandwidth_c, "Bandwidth constant c")->check(CLI::PositiveNumber);
        app->add_option("--restarts", restarts, "k-means restarts")->check(CLI::PositiveNumber);
        app->add_option("--max-sweeps", max_sweeps, "Histogram ascent sweep limit")->check(CLI::NonNegativeNumber);
        app->add_option("--histogram-restarts", histogram_restarts,
                        "Extra random starts for the histogram ascent (-1: size-based default)")
            ->check(CLI::Range(-1, 1000000));
        app->add_option("--eta", eta, "USVT threshold slack")->check(CLI::PositiveNumber);
        app->add_option("--sas-h", sas_h, "SAS group width (default: ceil(n/k))")->check(CLI::NonNegativeNumber);
        app->add_option("--sas-window", sas_window, "SAS moving-average window")->check(CLI::PositiveNumber);
    }

    ssm::EstimatorOptions options() const {
        ssm::EstimatorOptions o;
        o.k = k;
        o.bandwidth_c = bandwidth_c;
        o.restarts = restarts;
        o.max_sweeps = max_sweeps;
        o.histogram_restarts = histogram_restarts;
        o.usvt_eta = eta;
        o.sas_h = sas_h;
        o.sas_window = sas_window;
        return o;
    }
};

void check_method(const std::string& method) {
    const auto& names = ssm::method_names();
    if (std::find(names.begin(), names.end(), method) == names.end()) {
        throw UsageError("unknown method '" + method + "' (known: ssm, histogram, usvt, sas)");
    }
}

ssm::Graphon resolve_graphon(const std::string& name) {
    try {
        return ssm::graphon_by_name(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic shape model estimation and benchmarking"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Sample a graph and its ground truth from a named graphon");
    std::string sim_graphon;
    int sim_n = 0;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "sim_out";
    sim->add_option("--graphon", sim_graphon, "Graphon name (f0..f3, sbm_assort, sbm_disassort, ssm_planted, "
                                              "const:<p>, ssm:<file>)")
        ->required();
    sim->add_option("--n", sim_n, "Node count")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "Seed");
    sim->add_option("--out", sim_out, "Output directory");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit an estimator to an edge list");
    std::string fit_input;
    std::string fit_method = "ssm";
    std::uint64_t fit_seed = 1;
    std::string fit_out = "fit_out";
    bool fit_drop = false;
    EstimatorFlags fit_flags;
    fit->add_option("input", fit_input, "Edge list file")->required();
    fit->add_option("--method", fit_method, "ssm | histogram | usvt | sas");
    fit->add_option("--seed", fit_seed, "Seed");
    fit->add_option("--out", fit_out, "Output directory");
    fit->add_flag("--drop-isolated", fit_drop, "Remove degree-zero nodes after loading");
    fit_flags.attach(fit);

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Run a Monte Carlo grid and append to benchmark.csv");
    std::string bench_config;
    std::optional<std::uint64_t> bench_seed;
    std::optional<std::string> bench_out;
    std::optional<int> bench_k, bench_restarts, bench_threads, bench_reps;
    std::optional<double> bench_c, bench_holdout;
    std::vector<std::string> bench_methods;
    bench->add_option("config", bench_config, "JSON config (omit for the desk-scale defaults)");
    bench->add_option("--seed", bench_seed, "Master seed");
    bench->add_option("--out", bench_out, "Output directory");
    bench->add_option("--method", bench_methods, "Methods to run (repeatable)");
    bench->add_option("--k", bench_k, "Fixed number of node groups");
    bench->add_option("--bandwidth-c", bench_c, "Bandwidth constant c");
    bench->add_option("--restarts", bench_restarts, "k-means restarts");
    bench->add_option("--holdout", bench_holdout, "Holdout fraction for AUC (0 disables)");
    bench->add_option("--threads", bench_threads, "Worker threads");
    bench->add_option("--replicates", bench_reps, "Replicates per cell");
    bool bench_quiet = false;
    bench->add_flag("--quiet", bench_quiet, "No per-row progress");

    // eval
    auto* ev = app.add_subcommand("eval", "Fit on a simulated graph and score it against its truth file");
    std::string ev_input, ev_truth;
    std::string ev_method = "ssm";
    std::uint64_t ev_seed = 1;
    double ev_holdout = 0.1;
    int ev_grid = 200;
    EstimatorFlags ev_flags;
    ev->add_option("input", ev_input, "Edge list written by simulate")->required();
    ev->add_option("--truth", ev_truth, "truth.json written by simulate")->required();
    ev->add_option("--method", ev_method, "ssm | histogram | usvt | sas");
    ev->add_option("--seed", ev_seed, "Seed");
    ev->add_option("--holdout", ev_holdout, "Holdout fraction for AUC (0 disables)");
    ev->add_option("--mise-grid", ev_grid, "Midpoint grid for aligned MISE")->check(CLI::PositiveNumber);
    ev_flags.attach(ev);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            const ssm::Graphon f = resolve_graphon(sim_graphon);
            const ssm::SampledGraph sg = ssm::simulate(f, sim_n, sim_seed);
            ssm::write_simulation(sg, sim_seed, sim_out);
            std::cout << "wrote " << sim_out << "/graph.edges (" << sg.graph.n() << " nodes, "
                      << sg.graph.edge_count() << " edges) and " << sim_out << "/truth.json\n";
        } else if (fit->parsed()) {
            check_method(fit_method);
            const ssm::Graph g = ssm::load_edge_list(fit_input, fit_drop);
            const ssm::FitSummary s = ssm::fit_to_files(g, fit_method, fit_seed, fit_flags.options(), fit_out);
            std::cout << s.line() << '\n';
        } else if (bench->parsed()) {
            ssm::BenchConfig config = bench_config.empty() ? ssm::BenchConfig{} : ssm::BenchConfig::load(bench_config);
            if (bench_seed) config.master_seed = *bench_seed;
            if (bench_out) config.output_dir = *bench_out;
            if (!bench_methods.empty()) config.methods = bench_methods;
            if (bench_k) config.k = *bench_k;
            if (bench_c) config.bandwidth_c = *bench_c;
            if (bench_restarts) config.kmeans_restarts = *bench_restarts;
            if (bench_holdout) config.holdout_fraction = *bench_holdout;
            if (bench_threads) config.threads = *bench_threads;
            if (bench_reps) config.replicates = *bench_reps;
            try {
                config.validate();
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const ssm::BenchSummary s = ssm::run_benchmark(config, bench_quiet ? nullptr : &std::cerr);
            std::cout << "rows written: " << s.rows_written << ", skipped: " << s.rows_skipped
                      << ", errors: " << s.errors << " -> " << s.csv_path.string() << "\n\n";
            ssm::print_aggregate(s.csv_path, std::cout);
        } else if (ev->parsed()) {
            check_method(ev_method);
            const ssm::Graph g = ssm::load_edge_list(ev_input, false);
            const ssm::TruthFile truth = ssm::load_truth(ev_truth);
            const ssm::EvalReport r =
                ssm::evaluate_against_truth(g, truth, ev_method, ev_seed, ev_flags.options(), ev_holdout, ev_grid);
            std::cout << ssm::kBenchHeader << '\n' << ssm::format_row(r) << '\n';
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

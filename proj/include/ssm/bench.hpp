#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ssm/estimators.hpp"
#include "ssm/evaluation.hpp"
#include "ssm/graphon.hpp"

namespace ssm {

/// Monte Carlo grid. Loaded from a single JSON document whose keys match
/// the field names; missing keys keep the desk-scale defaults below.
struct BenchConfig {
    std::vector<std::string> graphons{"f0", "f1", "f2", "f3"};
    std::vector<int> n_grid{100, 200, 400, 800};
    int replicates = 10;
    std::uint64_t master_seed = 1;
    double bandwidth_c = 2.0;
    int k = 0;
    int kmeans_restarts = 10;
    int max_sweeps = 50;
    int histogram_restarts = -1;
    double holdout_fraction = 0.1;  // 0 disables the AUC column
    double usvt_eta = 0.01;
    int sas_h = 0;
    int sas_window = 3;
    int mise_grid = 200;
    std::vector<std::string> methods{"ssm", "usvt", "sas"};
    std::filesystem::path output_dir = "bench_out";
    int threads = 1;

    void validate() const;
    EstimatorOptions estimator_options() const;

    static BenchConfig from_json(const std::string& text);
    static BenchConfig load(const std::filesystem::path& path);
    std::string to_json() const;
};

/// Seed of one (graphon, n, replicate) cell; every method sees the same graph.
std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& graphon, int n, int replicate);

/// Latents and graph drawn from one seed (used by simulate and benchmark).
SampledGraph simulate(const Graphon& f, int n, std::uint64_t seed);

EvalReport run_cell(const BenchConfig& config, const std::string& graphon, int n, int replicate,
                    const std::string& method);

inline constexpr const char* kBenchHeader =
    "method,graphon,n,seed,mse,mise_aligned,auc,n_params,s,k,runtime_ms,error";

std::string format_row(const EvalReport& r);
std::string format_error_row(const std::string& method, const std::string& graphon, int n, std::uint64_t seed,
                             const std::string& error);

struct BenchSummary {
    std::size_t cells_total = 0;
    std::size_t rows_written = 0;
    std::size_t rows_skipped = 0;
    std::size_t errors = 0;
    std::filesystem::path csv_path;
};

/// Runs the full grid, appending to <output_dir>/benchmark.csv. Rows whose
/// (method, graphon, n, seed) key already exists are skipped. Failures
/// become error rows and the run continues.
BenchSummary run_benchmark(const BenchConfig& config, std::ostream* log = nullptr);

/// Mean +- sd of mse, mise and auc per (graphon, n, method).
void print_aggregate(const std::filesystem::path& csv, std::ostream& out);

struct TruthFile {
    std::string graphon;
    std::uint64_t seed = 0;
    LatentSample latents;
    Eigen::MatrixXd theta;
    std::vector<int> planted_blocks;  // empty for formula graphons
};

/// Writes graph.edges and truth.json into `out_dir`.
void write_simulation(const SampledGraph& sg, std::uint64_t seed, const std::filesystem::path& out_dir);
TruthFile load_truth(const std::filesystem::path& path);

struct FitSummary {
    std::string method;
    int n = 0;
    int k = 0;
    int s = 0;
    int n_params = 0;
    double loglik = 0.0;
    double bic = 0.0;
    double runtime_ms = 0.0;
    std::string line() const;
};

/// Fits `method` and writes model.json (plus bic_curve.csv for ssm and
/// histogram) into `out_dir`.
FitSummary fit_to_files(const Graph& g, const std::string& method, std::uint64_t seed,
                        const EstimatorOptions& opts, const std::filesystem::path& out_dir);

/// Fits on the graph and reports metrics against a truth file. AUC comes
/// from a separate holdout fit when fraction > 0.
EvalReport evaluate_against_truth(const Graph& g, const TruthFile& truth, const std::string& method,
                                  std::uint64_t seed, const EstimatorOptions& opts, double fraction,
                                  int mise_grid = 200);

}  // namespace ssm

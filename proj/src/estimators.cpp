#include "ssm/estimators.hpp"

#include <algorithm>
#include <stdexcept>

#include "ssm/baselines.hpp"
#include "ssm/rng.hpp"

namespace ssm {

int resolve_k(int n, const EstimatorOptions& opts) {
    const int k = opts.k > 0 ? opts.k : default_bandwidth(n, opts.bandwidth_c);
    return std::min(k, n);
}

SsmFit fit_ssm(const Graph& g, std::uint64_t seed, const EstimatorOptions& opts, const PairMask* mask) {
    SsmFit fit;
    HistogramOptions hopts;
    hopts.max_sweeps = opts.max_sweeps;
    hopts.restarts = opts.histogram_restarts;
    fit.histogram = fit_histogram(g, resolve_k(g.n(), opts), mix_seed(seed, "histogram"), hopts, mask);
    KMeansOptions kopts;
    kopts.restarts = opts.restarts;
    fit.smooth = smooth_and_select(g, fit.histogram.averages, fit.histogram.partition, mix_seed(seed, "kmeans"),
                                   mask, kopts);
    return fit;
}

const std::vector<std::string>& method_names() {
    static const std::vector<std::string> names{"ssm", "histogram", "usvt", "sas"};
    return names;
}

Estimate estimate(const Graph& g, const std::string& method, std::uint64_t seed, const EstimatorOptions& opts,
                  const PairMask* mask) {
    Estimate out;
    out.method = method;
    if (method == "ssm" || method == "histogram") {
        SsmFit fit = fit_ssm(g, seed, opts, mask);
        const FittedModel& model = method == "ssm" ? fit.smooth.best : fit.smooth.histogram;
        out.theta = predict_theta(model);
        out.n_params = model.n_params;
        out.k = model.k;
        out.s = model.s;
        out.fit = std::move(fit);
    } else if (method == "usvt") {
        DenseEstimate est = usvt(g, opts.usvt_eta, mask);
        out.theta = std::move(est.theta_hat);
        out.n_params = est.n_params;
    } else if (method == "sas") {
        const int k = resolve_k(g.n(), opts);
        const int h = opts.sas_h > 0 ? std::min(opts.sas_h, g.n()) : (g.n() + k - 1) / k;
        DenseEstimate est = sas(g, h, opts.sas_window, mask);
        out.theta = std::move(est.theta_hat);
        out.n_params = est.n_params;
        out.k = (g.n() + h - 1) / h;
    } else {
        throw std::invalid_argument("unknown method '" + method + "' (known: ssm, histogram, usvt, sas)");
    }
    return out;
}

}  // namespace ssm

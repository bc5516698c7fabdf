#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ssm/bench.hpp"
#include "ssm/errors.hpp"
#include "ssm/estimators.hpp"
#include "ssm/evaluation.hpp"
#include "ssm/graph.hpp"
#include "ssm/graphon.hpp"
#include "ssm/histogram.hpp"
#include "ssm/shapes.hpp"

namespace py = pybind11;

namespace {

ssm::EstimatorOptions options(int k, double bandwidth_c, int restarts, int histogram_restarts) {
    ssm::EstimatorOptions o;
    o.k = k;
    o.bandwidth_c = bandwidth_c;
    o.restarts = restarts;
    o.histogram_restarts = histogram_restarts;
    return o;
}

py::dict model_dict(const ssm::FittedModel& m) {
    py::dict d;
    d["k"] = m.k;
    d["s"] = m.s;
    d["z"] = m.z.z;
    d["u"] = m.u.u;
    d["q"] = m.q;
    d["loglik"] = m.loglik;
    d["bic"] = m.bic;
    d["n_params"] = m.n_params;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stochastic shape model graphon estimation";

    // Translators run in reverse registration order, so the base goes first.
    const auto base = py::register_exception<ssm::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ssm::ParseError>(m, "ParseError", base);
    py::register_exception<ssm::EmptyGraphError>(m, "EmptyGraphError", base);
    py::register_exception<ssm::InvariantError>(m, "InvariantError", base);
    py::register_exception<ssm::UnsupportedError>(m, "UnsupportedError", base);
    py::register_exception<ssm::UndefinedMetricError>(m, "UndefinedMetricError", base);

    py::class_<ssm::Graph>(m, "Graph")
        .def(py::init([](const ssm::AdjMatrix& a) { return ssm::Graph(a); }), py::arg("adjacency"))
        .def_static("from_edges", &ssm::Graph::from_edges, py::arg("n"), py::arg("edges"),
                    py::arg("labels") = std::vector<std::string>{})
        .def_property_readonly("n", &ssm::Graph::n)
        .def_property_readonly("edge_count", &ssm::Graph::edge_count)
        .def_property_readonly("labels", &ssm::Graph::labels)
        .def("adjacency", &ssm::Graph::adjacency)
        .def("edges", &ssm::Graph::edges)
        .def("density", &ssm::Graph::density)
        .def("__repr__", [](const ssm::Graph& g) {
            return "<Graph n=" + std::to_string(g.n()) + " edges=" + std::to_string(g.edge_count()) + ">";
        });

    m.def("load_edge_list", &ssm::load_edge_list, py::arg("path"), py::arg("drop_isolated") = false);
    m.def("write_edge_list", py::overload_cast<const ssm::Graph&, const std::filesystem::path&>(&ssm::write_edge_list),
          py::arg("graph"), py::arg("path"));
    m.def("degree_sequence", &ssm::degree_sequence);

    py::class_<ssm::Graphon>(m, "Graphon")
        .def_property_readonly("name", &ssm::Graphon::name)
        .def("__call__", &ssm::Graphon::eval, py::arg("x"), py::arg("y"));
    m.def("graphon_by_name", &ssm::graphon_by_name, py::arg("name"));
    m.def("graphon_zoo", &ssm::graphon_zoo);

    m.def(
        "simulate",
        [](const std::string& graphon, int n, std::uint64_t seed) {
            const auto sg = ssm::simulate(ssm::graphon_by_name(graphon), n, seed);
            return py::make_tuple(sg.graph, sg.truth.theta, sg.truth.latents.xi);
        },
        py::arg("graphon"), py::arg("n"), py::arg("seed"),
        "Sample (graph, theta, latents) from a named graphon.");

    m.def("default_bandwidth", &ssm::default_bandwidth, py::arg("n"), py::arg("c") = 2.0);
    m.def(
        "fit_histogram",
        [](const ssm::Graph& g, int k, std::uint64_t seed, int max_sweeps, int restarts) {
            ssm::HistogramOptions o;
            o.max_sweeps = max_sweeps;
            o.restarts = restarts;
            const auto fit = ssm::fit_histogram(g, k, seed, o);
            py::dict d;
            d["z"] = fit.partition.z;
            d["means"] = fit.averages.means;
            d["loglik"] = fit.loglik;
            d["initial_loglik"] = fit.initial_loglik;
            d["sweeps"] = fit.sweeps;
            d["converged"] = fit.converged;
            return d;
        },
        py::arg("graph"), py::arg("k"), py::arg("seed"), py::arg("max_sweeps") = 50, py::arg("restarts") = -1);

    m.def(
        "fit_ssm",
        [](const ssm::Graph& g, std::uint64_t seed, int k, double bandwidth_c, int restarts, int histogram_restarts) {
            const auto fit = ssm::fit_ssm(g, seed, options(k, bandwidth_c, restarts, histogram_restarts));
            py::list curve;
            for (const auto& p : fit.smooth.curve) curve.append(py::make_tuple(p.s, p.loglik, p.bic));
            py::dict d = model_dict(fit.smooth.best);
            d["theta"] = ssm::predict_theta(fit.smooth.best);
            d["curve"] = curve;
            return d;
        },
        py::arg("graph"), py::arg("seed"), py::arg("k") = 0, py::arg("bandwidth_c") = 2.0, py::arg("restarts") = 10,
        py::arg("histogram_restarts") = -1, "Histogram fit, shape smoothing and BIC selection.");

    m.def(
        "estimate",
        [](const ssm::Graph& g, const std::string& method, std::uint64_t seed, int k, double bandwidth_c) {
            const auto est = ssm::estimate(g, method, seed, options(k, bandwidth_c, 10, -1));
            py::dict d;
            d["method"] = est.method;
            d["theta"] = est.theta;
            d["n_params"] = est.n_params;
            d["k"] = est.k;
            d["s"] = est.s;
            return d;
        },
        py::arg("graph"), py::arg("method"), py::arg("seed"), py::arg("k") = 0, py::arg("bandwidth_c") = 2.0);
    m.def("method_names", &ssm::method_names);

    m.def("mse", py::overload_cast<const Eigen::MatrixXd&, const Eigen::MatrixXd&>(&ssm::mse), py::arg("theta_hat"),
          py::arg("theta"));
    m.def(
        "auc",
        [](const std::vector<double>& scores, const std::vector<int>& labels) {
            if (scores.size() != labels.size()) throw std::invalid_argument("auc: scores and labels differ in length");
            std::vector<ssm::ScoredPair> pairs(scores.size());
            for (std::size_t i = 0; i < scores.size(); ++i) pairs[i] = {scores[i], labels[i]};
            return ssm::auc(pairs);
        },
        py::arg("scores"), py::arg("labels"));
    m.def(
        "link_prediction_auc",
        [](const ssm::Graph& g, const std::string& method, double fraction, std::uint64_t seed) {
            return ssm::link_prediction_auc(g, method, fraction, seed);
        },
        py::arg("graph"), py::arg("method"), py::arg("fraction"), py::arg("seed"));
}

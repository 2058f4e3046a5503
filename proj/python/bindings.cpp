#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "covsel/experiments.hpp"

namespace py = pybind11;
using namespace covsel;

namespace {

BasisFamily basis_from_name(const std::string& name, int p_scale) {
    if (name == "fourier") return BasisFamily::fourier_scaled(p_scale);
    if (name == "cosine") return BasisFamily::cosine();
    if (name == "brownian-bridge") return BasisFamily::brownian_bridge_kl();
    throw std::invalid_argument("unknown basis: " + name);
}

SampleSet make_samples(const Mat& data, std::vector<double> points) {
    return SampleSet(data, DesignPoints(std::move(points)));
}

py::dict score_dict(const ModelScore& sc) {
    py::dict d;
    d["m"] = sc.model.size();
    d["model"] = sc.model;
    d["ure"] = sc.ure;
    d["gamma_sq"] = sc.gamma_sq;
    d["residual_sq"] = sc.residual_sq;
    return d;
}

ExperimentConfig example_config(const std::string& example, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.example = example;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Covariance-function estimation by projection with URE model selection";

    // matrix primitives
    m.def("vec", &covsel::vec, py::arg("a"), "Column-major stacking of a matrix.");
    m.def("unvec", &covsel::unvec, py::arg("v"), py::arg("rows"), py::arg("cols"));
    m.def("kron", &covsel::kron, py::arg("a"), py::arg("b"));
    m.def("frobenius_inner", &covsel::frobenius_inner, py::arg("a"), py::arg("b"));
    m.def("pseudo_inverse", &covsel::pseudo_inverse, py::arg("a"), py::arg("rtol") = -1.0);
    m.def(
        "projector",
        [](const Mat& g, double rtol) {
            const Projector p = covsel::projector(g, rtol);
            return py::make_tuple(p.mat(), p.rank());
        },
        py::arg("g"), py::arg("rtol") = -1.0,
        "Orthogonal projector onto the column space of G; returns (matrix, rank).");
    m.def(
        "project_to_model_space",
        [](const Mat& a, const Mat& g) {
            return project_to_model_space(a, covsel::projector(g)).mat();
        },
        py::arg("a"), py::arg("g"));

    // basis / design
    m.def(
        "equispaced_points",
        [](int p, const std::string& grid) {
            return DesignPoints::equispaced(p, grid_convention_from_string(grid)).values();
        },
        py::arg("p"), py::arg("grid") = "endpoint");
    m.def(
        "eval_basis",
        [](const std::string& basis, int lambda, double t, int p_scale) {
            return basis_from_name(basis, p_scale).eval(lambda, t);
        },
        py::arg("basis"), py::arg("lambda_"), py::arg("t"), py::arg("p_scale") = 1);
    m.def(
        "design_matrix",
        [](const std::string& basis, int m, std::vector<double> points, int p_scale) {
            DesignPoints pts(std::move(points));
            if (p_scale <= 0) p_scale = pts.size();
            return covsel::design_matrix(basis_from_name(basis, p_scale), m, pts).G;
        },
        py::arg("basis"), py::arg("m"), py::arg("points"), py::arg("p_scale") = 0);

    // estimation
    m.def(
        "empirical_covariance",
        [](const Mat& x, std::vector<double> points) {
            return empirical_covariance(make_samples(x, std::move(points))).mat();
        },
        py::arg("x"), py::arg("points"));
    m.def(
        "gamma_hat_sq",
        [](const Mat& x, std::vector<double> points, const std::string& basis, int m,
           int p_scale) {
            DesignPoints pts(std::move(points));
            if (p_scale <= 0) p_scale = pts.size();
            const DesignMatrix d = covsel::design_matrix(basis_from_name(basis, p_scale), m, pts);
            return gamma_hat_sq(SampleSet(x, pts), d);
        },
        py::arg("x"), py::arg("points"), py::arg("basis"), py::arg("m"), py::arg("p_scale") = 0);
    m.def(
        "select_model",
        [](const Mat& x, std::vector<double> points, const std::string& basis, int big_m,
           int p_scale) {
            DesignPoints pts(std::move(points));
            if (p_scale <= 0) p_scale = pts.size();
            const auto collection =
                nested_collection(basis_from_name(basis, p_scale), big_m, pts);
            const SelectionResult sel = select_model(SampleSet(x, pts), collection);
            py::dict out;
            out["m_hat"] = sel.scores[sel.selected].model.size();
            out["selected_index"] = sel.selected;
            py::list scores;
            for (const auto& sc : sel.scores) scores.append(score_dict(sc));
            out["scores"] = scores;
            out["sigma_hat"] = sel.estimate.sigma_hat.mat();
            return out;
        },
        py::arg("x"), py::arg("points"), py::arg("basis"), py::arg("M"), py::arg("p_scale") = 0,
        "URE model selection over the nested collection {1}, ..., {1..M}.");

    // built-in experiments
    m.def(
        "simulate_example",
        [](const std::string& example, std::uint64_t seed, int n) {
            ExperimentConfig cfg = example_config(example, seed);
            if (n > 0) cfg.n = n;
            const Experiment e = resolve(cfg);
            const ProcessSpec spec = e.make_spec();
            const SampleSet samples = simulate(spec, e.n);
            py::dict out;
            out["data"] = samples.data();
            out["points"] = samples.points().values();
            out["sigma_true"] = true_sigma(spec).mat();
            return out;
        },
        py::arg("example"), py::arg("seed") = 42, py::arg("n") = 0,
        "Simulate one of the built-in experiments (ex1, ex1b, ex2, ex3).");
    m.def(
        "risk_curve_example",
        [](const std::string& example, std::uint64_t seed, int reps, int threads) {
            ExperimentConfig cfg = example_config(example, seed);
            if (reps > 0) cfg.reps = reps;
            if (threads > 0) cfg.threads = threads;
            const Experiment e = resolve(cfg);
            const ProcessSpec spec = e.make_spec();
            const RiskCurve curve =
                mc_risk_curve(spec, e.make_collection(spec.points), e.n, e.reps, e.threads);
            py::dict out;
            out["models"] = curve.models;
            out["risk"] = curve.risk;
            out["std_err"] = curve.std_err;
            out["bias_sq"] = curve.bias_sq;
            out["variance_term"] = curve.variance_term;
            out["m0"] = oracle_model(curve);
            return out;
        },
        py::arg("example"), py::arg("seed") = 42, py::arg("reps") = 0, py::arg("threads") = 1,
        "Monte Carlo risk curve of a built-in experiment.");
}

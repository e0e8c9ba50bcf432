// Python bindings: the experiment commands plus the small numeric surface
// that is useful interactively (flow, analytic law, closed moments).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "burstpdmp/config.hpp"
#include "burstpdmp/density.hpp"
#include "burstpdmp/errors.hpp"
#include "burstpdmp/experiments.hpp"
#include "burstpdmp/moments.hpp"
#include "burstpdmp/reduced.hpp"
#include "burstpdmp/simulator.hpp"
#include "burstpdmp/version.hpp"

namespace py = pybind11;
using namespace burstpdmp;

namespace {

RunResult run_command(const std::string& command, const std::string& config_json) {
    const ExperimentConfig cfg = parse_config(config_json);
    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "reduce") return cmd_reduce(cfg);
    if (command == "moments") return cmd_moments(cfg);
    if (command == "density") return cmd_density(cfg);
    if (command == "reproduce-fig1") return cmd_reproduce_fig1(cfg);
    if (command == "reproduce-fig2") return cmd_reproduce_fig2(cfg);
    throw config_error("unknown command: " + command);
}

} // namespace

PYBIND11_MODULE(_burstpdmp, m) {
    m.doc() = "Bursting gene expression: exact jump-process simulation and "
              "adiabatic-reduction verification";

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);

    m.def("version", [] { return std::string(kVersion); });

    m.def("default_config", [] { return render_config(default_config()); },
          "Default experiment config as a JSON string");

    m.def(
        "run",
        [](const std::string& command, const std::string& config_json) {
            const RunResult res = run_command(command, config_json);
            py::dict d;
            d["out_dir"] = res.out_dir;
            d["outputs"] = res.outputs;
            d["manifest_path"] = res.manifest_path;
            d["summary"] = res.summary;
            return d;
        },
        py::arg("command"), py::arg("config_json"),
        "Run an experiment command (simulate, reduce, moments, density, "
        "reproduce-fig1, reproduce-fig2) from a config JSON string");

    m.def(
        "selfcheck",
        [](double flow_tol) {
            SelfCheckOptions opt;
            opt.flow_tol = flow_tol;
            const SelfCheckReport rep = run_selfcheck(opt);
            py::dict d;
            d["passed"] = rep.passed;
            d["text"] = rep.text;
            return d;
        },
        py::arg("flow_tol") = 1e-10, "Fast invariant checks; returns {passed, text}");

    m.def(
        "flow",
        [](double x0, double y0, double dt, double gamma1, double gamma2, double lambda2) {
            ModelParams p;
            p.gamma1 = gamma1;
            p.gamma2 = gamma2;
            p.lambda2 = lambda2;
            const State2D s = flow(State2D{x0, y0, 0.0}, dt, p);
            return py::make_tuple(s.x, s.y);
        },
        py::arg("x0"), py::arg("y0"), py::arg("dt"), py::arg("gamma1"), py::arg("gamma2"),
        py::arg("lambda2"), "Exact inter-jump drift of (X, Y) over dt");

    m.def(
        "law_pdf",
        [](const std::string& config_json, const std::vector<double>& ys) {
            const ExperimentConfig cfg = parse_config(config_json);
            const StationaryLaw law =
                analytic_stationary(make_reduced_jump_model(build_model(cfg.model)));
            std::vector<double> out;
            out.reserve(ys.size());
            for (double y : ys) out.push_back(law.pdf(y));
            return out;
        },
        py::arg("config_json"), py::arg("ys"),
        "Analytic stationary density of the reduced process at the given points");

    m.def(
        "stationary_moments",
        [](const std::string& config_json, int order) {
            const ExperimentConfig cfg = parse_config(config_json);
            const MomentVector mv = stationary_moments(build_model(cfg.model), order);
            py::dict d;
            d["mu"] = mv.mu;
            d["nu"] = mv.nu;
            return d;
        },
        py::arg("config_json"), py::arg("order") = 2,
        "Closed-form stationary moments (constant burst rate only)");
}

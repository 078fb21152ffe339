#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prewet/airy.hpp"
#include "prewet/cli_io.hpp"
#include "prewet/core_model.hpp"
#include "prewet/error.hpp"
#include "prewet/ferrari_spohn.hpp"
#include "prewet/walk.hpp"

namespace py = pybind11;
using namespace prewet;

namespace {

RunConfig config_from(const std::string& command, const py::dict& kw) {
    // Keyword arguments use the config-file keys; parse_config does the
    // type checking and rejects unknown names.
    std::string text = "[run]\ncommand = " + command + "\n";
    const char* sections[][2] = {{"format_version", "run"}, {"seed", "run"},   {"replicas", "run"},
                                 {"out", "run"},            {"in", "run"},     {"samples", "run"},
                                 {"beta", "model"},         {"lambda", "model"}, {"n", "model"},
                                 {"chi", "model"},          {"burnin", "ising"}, {"thin", "ising"},
                                 {"sweeps", "ising"},       {"law", "walk"}};
    for (const auto& [k, v] : kw) {
        const auto key = py::str(k).cast<std::string>();
        const char* section = nullptr;
        for (const auto& s : sections)
            if (key == s[0]) section = s[1];
        if (section == nullptr) throw ValidationError("unknown option '" + key + "'");
        text += std::string("[") + section + "]\n" + key + " = " + py::str(v).cast<std::string>() + "\n";
    }
    return parse_config(text);
}

py::dict manifest_dict(const RunManifest& m) {
    py::dict d;
    d["command"] = m.config.command;
    d["tool_version"] = m.tool_version;
    d["replica_seeds"] = m.replica_seeds;
    d["outputs"] = m.outputs;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Critical prewetting in the 2d Ising model";

    auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<RuntimeFailure>(m, "RuntimeFailure", PyExc_RuntimeError);
    (void)validation;

    m.attr("__version__") = kToolVersion;
    m.def("critical_beta", &critical_beta);
    m.def("spontaneous_magnetization", &spontaneous_magnetization, py::arg("beta"));
    m.def("airy", [](double x) {
        const auto a = airy(x);
        return py::make_tuple(a.value, a.derivative);
    }, py::arg("x"), "(Ai(x), Ai'(x))");
    m.def("airy_zero", &airy_zero, py::arg("k"), "k-th zero of Ai as a positive number");

    py::class_<FSReference>(m, "FSReference")
        .def(py::init<double>(), py::arg("c"))
        .def_property_readonly("c", [](const FSReference& f) { return f.params().c; })
        .def("eigenvalue", [](const FSReference& f, int k) { return f.params().eigenvalue(k); })
        .def("phi", &FSReference::phi, py::arg("k"), py::arg("r"))
        .def("density", &FSReference::density, py::arg("r"))
        .def("cdf", &FSReference::cdf, py::arg("r"))
        .def("quantile", &FSReference::quantile, py::arg("p"))
        .def("drift", &FSReference::drift, py::arg("r"))
        .def("kernel", [](const FSReference& f, double t, double r, double y) {
            return f.transition_kernel(t, r, y).value;
        }, py::arg("t"), py::arg("r"), py::arg("y"));

    m.def("default_law_chi", [] { return StepLaw::default_law().chi(); });
    m.def("sample_bridges", [](int n, double lambda, double beta, int samples, std::uint64_t seed) {
        const auto law = StepLaw::default_law();
        const BridgeSampler s(law, TiltParams::from_model(lambda, spontaneous_magnetization(beta), n),
                              {-n, 0}, {n, 0});
        std::vector<std::vector<std::pair<int, int>>> out;
        for (int i = 0; i < samples; ++i) {
            CounterRng rng(derive_key(seed, static_cast<std::uint64_t>(i)));
            std::vector<std::pair<int, int>> pts;
            for (const auto& p : s.sample(rng).points) pts.emplace_back(p.x, p.y);
            out.push_back(std::move(pts));
        }
        return out;
    }, py::arg("n"), py::arg("lambda_"), py::arg("beta"), py::arg("samples"), py::arg("seed"),
       "Exact area-tilted bridges from (-n, 0) to (n, 0) as lists of (T, Z)");

    m.def("run", [](const std::string& command, py::kwargs kw) {
        const auto cfg = config_from(command, kw);
        py::gil_scoped_release release;
        RunManifest man;
        if (command == "simulate-ising") man = run_simulate_ising(cfg);
        else if (command == "simulate-walk") man = run_simulate_walk(cfg);
        else if (command == "fs-reference") man = run_fs_reference(cfg);
        else if (command == "analyze") man = run_analyze(cfg);
        else throw ValidationError("unknown command '" + command + "'");
        py::gil_scoped_acquire acquire;
        return manifest_dict(man);
    }, py::arg("command"), "Runs a subcommand; keywords are config keys (beta=1.0, n=64, out='dir', ...)");
    m.def("report", [](const std::string& dir) {
        RunConfig cfg;
        cfg.out = dir;
        return run_report(cfg);
    }, py::arg("dir"));
}

#include "csl/app.hpp"
#include "csl/error.hpp"
#include "csl/forensics.hpp"
#include "csl/garch.hpp"
#include "csl/macro.hpp"
#include "csl/netgame.hpp"
#include "csl/report.hpp"
#include "csl/security.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <sstream>

namespace py = pybind11;
using namespace csl;

namespace {

app::Request make_request(const std::string& command, const std::string& scenario_json,
                          const std::vector<std::string>& data, std::optional<std::uint64_t> seed) {
    app::Request r;
    r.command = command;
    if (!scenario_json.empty()) r.scenario = app::parse_scenario(app::json::parse(scenario_json));
    r.data_paths = data;
    r.seed = seed;
    return r;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of the csl toolkit";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result([&]() { return py::exception<Error>(m, "CslError", PyExc_RuntimeError); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string msg = std::string(to_string(e.kind())) + ": " + e.what();
            PyErr_SetString(error_type.get_stored().ptr(), msg.c_str());
        }
    });

    m.def("commands", &app::commands);

    // Returns (report_json, {artifact name: contents}).
    m.def(
        "execute",
        [](const std::string& command, const std::string& scenario_json, const std::vector<std::string>& data,
           std::optional<std::uint64_t> seed) {
            const auto out = app::execute(make_request(command, scenario_json, data, seed));
            std::map<std::string, py::bytes> files;
            for (const auto& a : out.artifacts) files[a.name] = py::bytes(a.contents);
            return std::make_pair(report::dump_json(out.report), files);
        },
        py::arg("command"), py::arg("scenario_json") = "", py::arg("data") = std::vector<std::string>{},
        py::arg("seed") = py::none());

    // Same as the CLI: writes into out_dir, returns (exit code, stdout, stderr).
    m.def(
        "run",
        [](const std::string& command, const std::string& scenario_json, const std::vector<std::string>& data,
           std::optional<std::uint64_t> seed, const std::string& out_dir, const std::string& format) {
            const auto& known = app::commands();
            if (std::find(known.begin(), known.end(), command) == known.end())
                return std::make_tuple(static_cast<int>(app::kUsage), std::string(), "unknown command: " + command);
            app::Request r;
            try {
                r = make_request(command, scenario_json, data, seed);
            } catch (const Error& e) {
                return std::make_tuple(static_cast<int>(app::kScenario), std::string(), std::string(e.what()));
            }
            r.out_dir = out_dir;
            r.format = format;
            std::ostringstream out, err;
            const int rc = app::run(r, out, err);
            return std::make_tuple(rc, out.str(), err.str());
        },
        py::arg("command"), py::arg("scenario_json") = "", py::arg("data") = std::vector<std::string>{},
        py::arg("seed") = py::none(), py::arg("out_dir") = ".", py::arg("format") = "json");

    m.def(
        "attacker_success_probability", [](double q, int z) { return security::attacker_success_probability({q, z}); },
        py::arg("q"), py::arg("z"));
    m.def(
        "catch_up_probability", [](double q, int z) { return security::catch_up_probability({q, z}); }, py::arg("q"),
        py::arg("z"));
    m.def("min_confirmations", &security::min_confirmations, py::arg("q"), py::arg("target") = 0.001);
    m.def(
        "simulate_attack_alpha",
        [](double A, int e, std::size_t replicas, std::uint64_t seed) {
            const auto r = security::simulate_attack_alpha(A, e, replicas, seed);
            return py::dict(py::arg("alpha") = r.alpha_hat, py::arg("stderr") = r.stderr_,
                            py::arg("mean_duration") = r.mean_duration);
        },
        py::arg("A"), py::arg("e"), py::arg("replicas") = 100000, py::arg("seed") = 1);

    m.def("half_life", &garch::half_life, py::arg("persistence"));
    m.def(
        "simulate_garch",
        [](double omega, const std::vector<double>& alpha, const std::vector<double>& beta, std::size_t n,
           std::uint64_t seed) {
            return garch::simulate({0.0, omega, alpha, beta}, n, seed);
        },
        py::arg("omega"), py::arg("alpha"), py::arg("beta"), py::arg("n"), py::arg("seed"));
    m.def(
        "fit_garch",
        [](const std::vector<double>& returns, int p, int q) {
            const auto f = garch::fit(marketdata::ReturnSeries::from_values("X", returns), {p, q});
            return py::dict(py::arg("mu") = f.params.mu, py::arg("omega") = f.params.omega,
                            py::arg("alpha") = f.params.alpha, py::arg("beta") = f.params.beta,
                            py::arg("loglik") = f.loglik, py::arg("aic") = f.criteria.aic, py::arg("bic") = f.criteria.bic,
                            py::arg("persistence") = f.persistence, py::arg("half_life") = f.half_life);
        },
        py::arg("returns"), py::arg("p") = 1, py::arg("q") = 1);

    m.def("gini", &netgame::gini, py::arg("values"));

    m.def(
        "benford_chi2", [](const std::vector<double>& v) { return forensics::benford_test(v).chi2; }, py::arg("values"));
    m.def(
        "hill_exponent",
        [](const std::vector<double>& v, std::size_t k) { return forensics::hill_tail_index(v, k).exponent; },
        py::arg("sizes"), py::arg("k"));
    m.def(
        "suspicious_volume_fraction",
        [](double reported, double predicted) { return forensics::suspicious_volume_fraction(reported, predicted); },
        py::arg("reported"), py::arg("predicted_real"));

    m.def("diff_in_diff", &macro::diff_in_diff, py::arg("treat_pre"), py::arg("treat_post"), py::arg("control_pre"),
          py::arg("control_post"));
    m.def(
        "real_payment_burden",
        [](double rate, int years) {
            std::vector<double> out;
            for (const auto& p : macro::real_payment_burden({1.0, rate, years})) out.push_back(p.value);
            return out;
        },
        py::arg("deflation_rate"), py::arg("years"));
}

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spiked/config.hpp"
#include "spiked/detect.hpp"
#include "spiked/error.hpp"
#include "spiked/harness.hpp"
#include "spiked/lss.hpp"
#include "spiked/models.hpp"
#include "spiked/noise.hpp"
#include "spiked/spectral.hpp"
#include "spiked/transforms.hpp"

namespace py = pybind11;
using namespace spiked;

namespace {

ModelSpec make_spec(const std::string& model, std::size_t N, std::size_t M, const NoiseModel& noise,
                    std::vector<double> snr, const std::string& prior) {
    const ModelKind kind = parse_model_kind(model);
    const PriorKind pk = parse_prior_kind(prior);
    if (kind == ModelKind::wigner) return ModelSpec::wigner(N, noise, SnrSpec(std::move(snr)), pk);
    return ModelSpec::rect(kind, M, N, noise, SnrSpec(std::move(snr)), pk);
}

LssCase parse_case(const std::string& s) {
    for (LssCase c : {LssCase::wigner, LssCase::rect, LssCase::wigner_transformed, LssCase::rect_transformed})
        if (to_string(c) == s) return c;
    throw ValidationError("unknown statistic case '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spiked random matrix detection";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    auto domain = py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<SupercriticalError>(m, "SupercriticalError", domain.ptr());

    py::class_<NoiseFunctionals>(m, "NoiseFunctionals")
        .def_readonly("F_g", &NoiseFunctionals::F_g)
        .def_readonly("F_gd", &NoiseFunctionals::F_gd)
        .def_readonly("G_H", &NoiseFunctionals::G_H)
        .def_readonly("w4_tilde", &NoiseFunctionals::w4_tilde);

    py::class_<NoiseModel>(m, "NoiseModel")
        .def_static("gaussian", &NoiseModel::gaussian, py::arg("w2") = 1.0)
        .def_static("bimodal", &NoiseModel::bimodal, py::arg("a"), py::arg("w2") = 1.0)
        .def_static("sech", &NoiseModel::sech, py::arg("w2") = 1.0)
        .def_static("parse", [](const std::string& s) { return parse_noise_spec(s); })
        .def_property_readonly("functionals", &NoiseModel::functionals)
        .def_property_readonly("label", &NoiseModel::label)
        .def("score", [](const NoiseModel& n, double x) { return score(n, x, false); })
        .def("moments", [](const NoiseModel& n) {
            const NoiseMoments mo = moments(n);
            return py::dict(py::arg("w2") = mo.w2, py::arg("w3") = mo.w3, py::arg("w4") = mo.w4);
        });

    m.def("synthesize",
          [](const std::string& model, std::size_t N, std::size_t M, const NoiseModel& noise,
             std::vector<double> snr, std::uint64_t seed, const std::string& prior) {
              return synthesize(make_spec(model, N, M, noise, std::move(snr), prior), seed).values;
          },
          py::arg("model"), py::arg("N"), py::arg("M") = 0, py::arg("noise") = NoiseModel::gaussian(),
          py::arg("snr") = std::vector<double>{}, py::arg("seed") = 0, py::arg("prior") = "rademacher",
          "Sample a spiked data matrix.");

    m.def("eigenvalues_sym", [](const Eigen::MatrixXd& X) { return eigenvalues_sym(X).eigenvalues; });
    m.def("gram_spectrum", [](const Eigen::MatrixXd& Y) { return gram_spectrum(Y).eigenvalues; });
    m.def("count_outliers",
          [](std::vector<double> ev, double edge, double tol) {
              return count_outliers(Spectrum::from_values(std::move(ev)), edge, tol);
          },
          py::arg("eigenvalues"), py::arg("edge"), py::arg("tol") = 0.05);
    m.def("mp_edges", [](double d0) {
        const MpLaw law(d0);
        return py::make_tuple(law.d_minus(), law.d_plus());
    });

    m.def("transform_wigner", py::overload_cast<const Eigen::MatrixXd&, const NoiseModel&>(&transform_wigner));
    m.def("transform_rect",
          py::overload_cast<const Eigen::MatrixXd&, const NoiseModel&, double>(&transform_rect),
          py::arg("Y"), py::arg("noise"), py::arg("alpha"));
    m.def("optimal_alpha", &optimal_alpha, py::arg("gamma"), py::arg("F_g"));
    m.def("lambda_g", &lambda_g, py::arg("gamma"), py::arg("F_g"));

    py::class_<CltParams>(m, "CltParams")
        .def_readonly("omega", &CltParams::omega)
        .def_readonly("m0", &CltParams::m0)
        .def_readonly("V0", &CltParams::V0)
        .def_readonly("shift", &CltParams::shift)
        .def("mk", &CltParams::mk)
        .def_property_readonly("case", [](const CltParams& p) { return to_string(p.kase); });

    m.def("clt_params",
          [](const std::string& kase, double omega, const NoiseModel& noise, double d0) {
              return clt_params(parse_case(kase), omega, LssMoments::from(noise, d0));
          },
          py::arg("case"), py::arg("omega"), py::arg("noise") = NoiseModel::gaussian(), py::arg("d0") = 1.0);

    m.def("statistic",
          [](const std::string& kase, std::vector<double> ev, double omega, const NoiseModel& noise, double d0) {
              return statistic(parse_case(kase), Spectrum::from_values(std::move(ev)), omega,
                               LssMoments::from(noise, d0));
          },
          py::arg("case"), py::arg("eigenvalues"), py::arg("omega"), py::arg("noise") = NoiseModel::gaussian(),
          py::arg("d0") = 1.0);

    m.def("run_test",
          [](const std::string& model, std::size_t N, std::size_t M, const NoiseModel& noise, double omega,
             int k1, int k2, int true_k, bool transformed, std::uint64_t seed) {
              const HypothesisPair pair{k1, k2, omega};
              const ModelSpec spec = make_spec(model, N, M, noise,
                                               std::vector<double>(static_cast<std::size_t>(true_k), omega),
                                               "rademacher");
              const DataMatrix data = synthesize(spec, seed);
              const StatisticEvaluation ev = evaluate_statistic(data, omega, transformed);
              const Decision d = decide(ev.statistic, ev.params, pair);
              return py::dict(py::arg("statistic") = d.statistic, py::arg("threshold") = d.threshold,
                              py::arg("accepted") = d.accepted,
                              py::arg("theory_error") = theoretical_error(pair, ev.params.V0));
          },
          py::arg("model"), py::arg("N"), py::arg("M") = 0, py::arg("noise") = NoiseModel::gaussian(),
          py::arg("omega") = 0.5, py::arg("k1") = 0, py::arg("k2") = 1, py::arg("true_k") = 0,
          py::arg("transformed") = false, py::arg("seed") = 0);

    m.def("theoretical_error",
          [](int k1, int k2, double V0) { return theoretical_error(HypothesisPair{k1, k2, 1.0}, V0); },
          py::arg("k1"), py::arg("k2"), py::arg("V0"));

    m.def("simulate",
          [](const std::string& config_json, std::optional<std::uint64_t> seed, bool extended) {
              SimConfig c = parse_config(config_json);
              if (seed) c.master_seed = *seed;
              SimSummary s;
              {
                  py::gil_scoped_release release;
                  s = run_trials(c);
              }
              std::ostringstream os;
              write_csv(s, os, extended);
              return os.str();
          },
          py::arg("config_json"), py::arg("seed") = py::none(), py::arg("extended") = false,
          "Run a Monte Carlo experiment and return its CSV text.");
}

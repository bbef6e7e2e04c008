// spiked-detect: command line front end for the spiked detection library.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spiked/config.hpp"
#include "spiked/detect.hpp"
#include "spiked/error.hpp"
#include "spiked/harness.hpp"
#include "spiked/lss.hpp"
#include "spiked/models.hpp"
#include "spiked/spectral.hpp"
#include "spiked/transforms.hpp"

namespace {

using namespace spiked;

constexpr int kExitValidation = 1;
constexpr int kExitDomain = 2;
constexpr int kExitOther = 3;

std::string fmt(double v, const char* f = "%.9g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

struct ModelArgs {
    std::string model = "wigner";
    std::string noise = "gaussian";
    std::string prior = "rademacher";
    std::size_t N = 256;
    double d0 = 0.5;
    std::uint64_t seed = 1;
    bool transformed = false;

    void attach(CLI::App* sub) {
        sub->add_option("--model", model, "wigner, additive or multiplicative")->capture_default_str();
        sub->add_option("--noise", noise,
                        "gaussian[:w2], sech, bimodal:<a> or a JSON noise object")
            ->capture_default_str();
        sub->add_option("--prior", prior, "spike prior: rademacher or spherical")->capture_default_str();
        sub->add_option("--N", N, "column dimension (matrix size for wigner)")->capture_default_str();
        sub->add_option("--d0", d0, "aspect ratio M/N for rectangular models")->capture_default_str();
        sub->add_option("--seed", seed, "random seed")->capture_default_str();
        sub->add_flag("--transformed", transformed, "apply the entrywise score transform");
    }

    ModelSpec spec(std::vector<double> lambdas) const {
        const ModelKind kind = parse_model_kind(model);
        const NoiseModel nm = parse_noise_spec(noise);
        const PriorKind pk = parse_prior_kind(prior);
        if (kind == ModelKind::wigner) return ModelSpec::wigner(N, nm, SnrSpec(std::move(lambdas)), pk);
        const double Mf = d0 * static_cast<double>(N);
        const double Mr = std::round(Mf);
        if (!(d0 > 0.0 && d0 <= 1.0) || std::abs(Mf - Mr) > 1e-9) {
            throw ValidationError("d0 * N must be an integer M with 0 < M <= N");
        }
        return ModelSpec::rect(kind, static_cast<std::size_t>(Mr), N, nm, SnrSpec(std::move(lambdas)), pk);
    }
};

void check_domain(LssCase kase, double omega, const LssMoments& m) {
    const double eff = is_transformed(kase) ? omega * m.fun.F_g : omega;
    const double limit = is_rect(kase) ? std::sqrt(m.d0) : 1.0;
    if (!(omega > 0.0) || !(eff < limit)) {
        std::ostringstream os;
        os << "omega = " << omega << " is outside the subcritical domain of the " << to_string(kase)
           << " statistic";
        throw ValidationError(os.str());
    }
}

int cmd_fisher(const std::string& noise) {
    const NoiseModel nm = parse_noise_spec(noise);
    const NoiseFunctionals& f = nm.functionals();
    const NoiseMoments mo = moments(nm);
    std::cout << "noise=" << nm.label() << '\n'
              << "F_g=" << fmt(f.F_g, "%.9f") << '\n'
              << "F_gd=" << fmt(f.F_gd, "%.9f") << '\n'
              << "G_H=" << fmt(f.G_H, "%.9f") << '\n'
              << "w4_tilde=" << fmt(f.w4_tilde, "%.9f") << '\n'
              << "w2=" << fmt(mo.w2, "%.9f") << '\n'
              << "w4=" << fmt(mo.w4, "%.9f") << '\n';
    return 0;
}

int cmd_spectrum(const ModelArgs& a, const std::vector<double>& snr, std::optional<double> alpha,
                 double tol) {
    std::vector<double> lambdas = snr;
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    const ModelSpec spec = a.spec(lambdas);
    const DataMatrix data = synthesize(spec, a.seed);
    const bool rect = spec.is_rect();
    Eigen::MatrixXd X = data.values;
    if (a.transformed) {
        const double al = alpha.value_or(std::sqrt(spec.noise.functionals().F_g));
        X = rect ? transform_rect(data.values, spec.noise, al) : transform_wigner(data.values, spec.noise);
    }
    const Spectrum s = rect ? gram_spectrum(X) : eigenvalues_sym(X);
    const double edge = rect ? MpLaw(spec.d0()).d_plus() : 2.0;
    std::cout << "index,value\n";
    for (std::size_t i = 0; i < s.size(); ++i) std::cout << i << ',' << fmt(s.eigenvalues[i]) << '\n';
    std::cout << "edge," << fmt(edge) << '\n';
    std::cout << "outliers," << count_outliers(s, edge, tol) << '\n';
    return 0;
}

struct TestArgs {
    double snr = 0.5;
    std::optional<double> true_snr;
    int k1 = 0;
    int k2 = 1;
    std::optional<int> true_k;
    int kmax = 4;
};

DataMatrix test_data(const ModelArgs& a, const TestArgs& t, int truth) {
    if (truth < 0) throw ValidationError("true rank must be nonnegative");
    const double lam = t.true_snr.value_or(t.snr);
    return synthesize(a.spec(std::vector<double>(static_cast<std::size_t>(truth), lam)), a.seed);
}

int cmd_test(const ModelArgs& a, const TestArgs& t) {
    const HypothesisPair pair{t.k1, t.k2, t.snr};
    pair.validate();
    const ModelSpec probe = a.spec({});
    const LssCase kase = statistic_case(probe.kind, a.transformed);
    check_domain(kase, t.snr, LssMoments::from(probe.noise, probe.d0()));
    const int truth = t.true_k.value_or(t.k1);
    const DataMatrix data = test_data(a, t, truth);
    const StatisticEvaluation ev = evaluate_statistic(data, t.snr, a.transformed);
    const Decision d = decide(ev.statistic, ev.params, pair);
    std::cout << "case=" << to_string(kase) << '\n'
              << "true_k=" << truth << '\n'
              << "statistic=" << fmt(ev.statistic) << '\n'
              << "threshold=" << fmt(d.threshold) << '\n'
              << "decision=k" << d.accepted << '\n'
              << "theory_error=" << fmt(theoretical_error(pair, ev.params.V0)) << '\n';
    return 0;
}

int cmd_rank(const ModelArgs& a, const TestArgs& t) {
    if (t.kmax < 1) throw ValidationError("kmax must be at least 1");
    const ModelSpec probe = a.spec({});
    const LssCase kase = statistic_case(probe.kind, a.transformed);
    check_domain(kase, t.snr, LssMoments::from(probe.noise, probe.d0()));
    const int truth = t.true_k.value_or(0);
    const DataMatrix data = test_data(a, t, truth);
    const StatisticEvaluation ev = evaluate_statistic(data, t.snr, a.transformed);
    const RankEstimate r = estimate_rank(ev.statistic, ev.params, t.kmax);
    const std::vector<double> prior(static_cast<std::size_t>(t.kmax + 1), 1.0 / (t.kmax + 1));
    std::cout << "case=" << to_string(kase) << '\n'
              << "true_k=" << truth << '\n'
              << "statistic=" << fmt(ev.statistic) << '\n'
              << "kappa_prime=" << fmt(r.kappa_prime) << '\n'
              << "kappa=" << r.kappa << '\n'
              << "theory_error=" << fmt(theoretical_rank_error(prior, ev.params.V0, true)) << '\n';
    return 0;
}

int cmd_simulate(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed,
                 std::optional<unsigned> threads, bool extended) {
    SimConfig c = load_config(config);
    if (seed) c.master_seed = *seed;
    if (threads) c.threads = *threads;
    const SimSummary s = run_trials(c);
    if (out.empty() || out == "-") {
        write_csv(s, std::cout, extended);
    } else {
        emit_csv(s, out, extended);
    }
    return 0;
}

LssCase parse_case(const std::string& s) {
    for (LssCase c : {LssCase::wigner, LssCase::rect, LssCase::wigner_transformed, LssCase::rect_transformed})
        if (to_string(c) == s) return c;
    throw ValidationError("unknown statistic case '" + s + "'");
}

int cmd_clt_check(const std::vector<std::string>& cases, const std::string& noise,
                  const std::vector<double>& omegas, double d0, int lmax) {
    const NoiseModel nm = parse_noise_spec(noise);
    std::vector<LssCase> list;
    if (cases.empty() || (cases.size() == 1 && cases[0] == "all")) {
        list = {LssCase::wigner, LssCase::rect, LssCase::wigner_transformed, LssCase::rect_transformed};
    } else {
        for (const auto& c : cases) list.push_back(parse_case(c));
    }
    std::cout << "case,omega,m0,m1,V0,series_m,series_V\n";
    for (LssCase kase : list) {
        const LssMoments m = LssMoments::from(nm, is_rect(kase) ? d0 : 1.0);
        for (double w : omegas) {
            check_domain(kase, w, m);
            const CltParams p = clt_params(kase, w, m);
            const SpectralFunction phi = optimal_phi(kase, w, m);
            const double one[] = {w};
            const SeriesValue sm = clt_mean_series(phi, kase, one, m, lmax);
            const SeriesValue sv = clt_variance_series(phi, kase, m, lmax);
            std::cout << to_string(kase) << ',' << fmt(w) << ',' << fmt(p.m0) << ',' << fmt(p.mk(1)) << ','
                      << fmt(p.V0) << ',' << fmt(sm.value) << ',' << fmt(sv.value) << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Signal detection in spiked random matrix models"};
    app.require_subcommand(1);

    std::string noise_f = "gaussian";
    auto* fisher = app.add_subcommand("fisher", "Fisher information and related noise functionals");
    fisher->add_option("--noise", noise_f, "noise specification")->capture_default_str();

    ModelArgs spec_args;
    std::vector<double> spec_snr;
    std::optional<double> spec_alpha;
    double spec_tol = 0.05;
    auto* spectrum = app.add_subcommand("spectrum", "Sample a spiked matrix and print its spectrum as CSV");
    spec_args.attach(spectrum);
    spectrum->add_option("--snr", spec_snr, "spike SNRs (repeatable or space separated)");
    spectrum->add_option("--alpha", spec_alpha, "rectangular transform alpha (default sqrt(F_g))");
    spectrum->add_option("--tol", spec_tol, "outlier tolerance above the bulk edge")->capture_default_str();

    ModelArgs test_args;
    TestArgs test_t;
    auto* test = app.add_subcommand("test", "Weak detection test between k1 and k2 spikes");
    test_args.attach(test);
    test->add_option("--snr", test_t.snr, "hypothesis SNR omega")->capture_default_str();
    test->add_option("--k1", test_t.k1, "rank under the first hypothesis")->capture_default_str();
    test->add_option("--k2", test_t.k2, "rank under the second hypothesis")->capture_default_str();
    test->add_option("--true-k", test_t.true_k, "rank used to generate the data (default k1)");
    test->add_option("--true-snr", test_t.true_snr, "SNR used to generate the data (default --snr)");

    ModelArgs rank_args;
    TestArgs rank_t;
    auto* rank = app.add_subcommand("rank", "Estimate the number of spikes of a known SNR");
    rank_args.attach(rank);
    rank->add_option("--snr", rank_t.snr, "spike SNR omega")->capture_default_str();
    rank->add_option("--kmax", rank_t.kmax, "largest admissible rank")->capture_default_str();
    rank->add_option("--true-k", rank_t.true_k, "rank used to generate the data (default 0)");
    rank->add_option("--true-snr", rank_t.true_snr, "SNR used to generate the data (default --snr)");

    std::string sim_config, sim_out;
    std::optional<std::uint64_t> sim_seed;
    std::optional<unsigned> sim_threads;
    bool sim_extended = false;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a JSON config");
    simulate->add_option("--config", sim_config, "experiment config (JSON)")->required();
    simulate->add_option("--out", sim_out, "output CSV path (stdout if omitted)");
    simulate->add_option("--seed", sim_seed, "override the config's master seed");
    simulate->add_option("--threads", sim_threads,
                         "worker threads, 0 for all cores; SPIKED_DETECT_THREADS takes precedence");
    simulate->add_flag("--extended", sim_extended,
                       "append supercritical count and statistic moment columns");

    std::vector<std::string> clt_cases;
    std::string clt_noise = "gaussian";
    std::vector<double> clt_omegas{0.25, 0.5};
    double clt_d0 = 0.5;
    int clt_lmax = 200;
    auto* clt = app.add_subcommand("clt-check", "Closed-form CLT parameters against their Chebyshev series");
    clt->add_option("--case", clt_cases,
                    "wigner, rect, wigner_transformed, rect_transformed or all (default all)");
    clt->add_option("--noise", clt_noise, "noise specification")->capture_default_str();
    clt->add_option("--omega", clt_omegas, "hypothesis SNRs")->capture_default_str();
    clt->add_option("--d0", clt_d0, "aspect ratio for rectangular cases")->capture_default_str();
    clt->add_option("--lmax", clt_lmax, "series truncation order")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (*fisher) return cmd_fisher(noise_f);
        if (*spectrum) return cmd_spectrum(spec_args, spec_snr, spec_alpha, spec_tol);
        if (*test) return cmd_test(test_args, test_t);
        if (*rank) return cmd_rank(rank_args, rank_t);
        if (*simulate) return cmd_simulate(sim_config, sim_out, sim_seed, sim_threads, sim_extended);
        if (*clt) return cmd_clt_check(clt_cases, clt_noise, clt_omegas, clt_d0, clt_lmax);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
    return kExitOther;
}

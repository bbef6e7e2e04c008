#include "spiked/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "spiked/detect.hpp"
#include "spiked/error.hpp"
#include "spiked/lss.hpp"
#include "spiked/spectral.hpp"
#include "spiked/transforms.hpp"

namespace spiked {

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::bbp_outliers: return "bbp_outliers";
        case ExperimentKind::weak_detection: return "weak_detection";
        case ExperimentKind::rank_estimation: return "rank_estimation";
        case ExperimentKind::clt_null: return "clt_null";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
    if (s == "bbp_outliers") return ExperimentKind::bbp_outliers;
    if (s == "weak_detection") return ExperimentKind::weak_detection;
    if (s == "rank_estimation") return ExperimentKind::rank_estimation;
    if (s == "clt_null") return ExperimentKind::clt_null;
    throw ValidationError("unknown experiment '" + s + "'");
}

double AlphaChoice::resolve(double F_g) const {
    switch (mode) {
        case Mode::sqrt_Fg: return std::sqrt(F_g);
        case Mode::zero: return 0.0;
        case Mode::value: return value;
    }
    return 0.0;
}

std::string AlphaChoice::label() const {
    switch (mode) {
        case Mode::sqrt_Fg: return "sqrt_Fg";
        case Mode::zero: return "zero";
        case Mode::value: {
            std::ostringstream os;
            os << value;
            return os.str();
        }
    }
    return "?";
}

namespace {

std::vector<double> descending(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

void check_count(int count) {
    if (count < 0) throw ValidationError("spike count must be nonnegative");
}

}  // namespace

std::vector<double> preset_lam(double F_g, int count) {
    check_count(count);
    std::vector<double> v;
    for (int l = 1; l <= count; ++l) v.push_back((l + 1.0 / F_g) / (l + 1.0));
    return descending(std::move(v));
}

std::vector<double> preset_lam_sim(double d0, double F_g, int count) {
    check_count(count);
    const double r = std::sqrt(d0);
    std::vector<double> v;
    for (int l = 1; l <= count; ++l) v.push_back((l * r + r / F_g) / (l + 1.0));
    return descending(std::move(v));
}

std::vector<double> preset_lam_sim_mult(double d0, double F_g, int count) {
    check_count(count);
    const double r = std::sqrt(d0);
    std::vector<double> v;
    for (int l = 1; l <= count; ++l) v.push_back((l * r + 2.0 * r / (1.0 + std::sqrt(F_g))) / (l + 1.0));
    return descending(std::move(v));
}

void SimConfig::validate() const {
    ModelSpec m = model;
    m.snr = SnrSpec();
    m.validate();
    if (trials < 1) throw ValidationError("trials must be at least 1");
    if (!(outlier_tol >= 0.0) || !(raw_outlier_tol >= 0.0)) {
        throw ValidationError("outlier tolerances must be nonnegative");
    }
    if (experiment == ExperimentKind::bbp_outliers) {
        SnrSpec check(snr_grid);  // positivity and ordering
        (void)check;
        if (snr_grid.size() > model.M) throw ValidationError("more spikes than rows");
        return;
    }
    if (experiment == ExperimentKind::weak_detection) {
        HypothesisPair{k1, k2, 1.0}.validate();
        if (static_cast<std::size_t>(k2) > model.M) throw ValidationError("k2 exceeds the row dimension");
    }
    if (experiment == ExperimentKind::rank_estimation) {
        if (kmax < 1) throw ValidationError("kmax must be at least 1");
        if (static_cast<std::size_t>(kmax) > model.M) throw ValidationError("kmax exceeds the row dimension");
    }
    const LssCase kase = statistic_case(model.kind, transformed);
    const double F = model.noise.functionals().F_g;
    for (double w : snr_grid) {
        const double eff = is_transformed(kase) ? w * F : w;
        const double limit = is_rect(kase) ? std::sqrt(model.d0()) : 1.0;
        if (!(w > 0.0) || !(eff < limit)) {
            std::ostringstream os;
            os << "snr value " << w << " is outside the subcritical domain of the "
               << to_string(kase) << " statistic";
            throw ValidationError(os.str());
        }
    }
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t grid, std::uint64_t trial) {
    // SplitMix64 finalizer applied along the index path.
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(master);
    h = mix(h ^ mix(grid + 0x632be59bd9b4e019ULL));
    h = mix(h ^ mix(trial + 0x85157af5b0a1d3c7ULL));
    return h;
}

unsigned effective_threads(unsigned requested) {
    if (const char* env = std::getenv("SPIKED_DETECT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    if (requested == 0) return std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

namespace {

struct TrialOutcome {
    double value = std::numeric_limits<double>::quiet_NaN();
    int truth = 0;
    int error = 0;
    bool supercritical = false;
    bool excluded = false;
    std::size_t count_raw = 0;
    std::size_t count_transformed = 0;
};

template <class Fn>
std::vector<TrialOutcome> run_parallel(std::size_t trials, unsigned threads, Fn&& fn) {
    std::vector<TrialOutcome> out(trials);
    std::vector<std::exception_ptr> errors(trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= trials) return;
            try {
                out[t] = fn(t);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments_of(const std::vector<double>& v) {
    Moments m;
    if (v.empty()) return m;
    double s = 0.0;
    for (double x : v) s += x;
    m.mean = s / static_cast<double>(v.size());
    if (v.size() < 2) return m;
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.var = ss / static_cast<double>(v.size() - 1);
    return m;
}

double binomial_stderr(double e, std::size_t n) {
    if (n == 0) return 0.0;
    const double p = std::clamp(e, 0.0, 1.0);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

ModelSpec with_spikes(const ModelSpec& tmpl, std::vector<double> lambdas) {
    ModelSpec s = tmpl;
    s.snr = SnrSpec(std::move(lambdas));
    return s;
}

std::vector<GridPointSummary> run_weak(const SimConfig& c, unsigned threads) {
    std::vector<GridPointSummary> rows;
    const std::size_t n1 = c.trials / 2;
    for (std::size_t g = 0; g < c.snr_grid.size(); ++g) {
        const double w = c.snr_grid[g];
        const HypothesisPair pair{c.k1, c.k2, w};
        const ModelSpec spec1 = with_spikes(c.model, std::vector<double>(static_cast<std::size_t>(c.k1), w));
        const ModelSpec spec2 = with_spikes(c.model, std::vector<double>(static_cast<std::size_t>(c.k2), w));
        const auto outcomes = run_parallel(c.trials, threads, [&](std::size_t t) {
            TrialOutcome o;
            o.truth = t < n1 ? pair.k1 : pair.k2;
            Rng rng(trial_seed(c.master_seed, g, t));
            const DataMatrix data = build(t < n1 ? spec1 : spec2, rng);
            int accepted;
            try {
                const StatisticEvaluation ev = evaluate_statistic(data, w, c.transformed);
                o.value = ev.statistic;
                accepted = decide(ev.statistic, ev.params, pair).accepted;
            } catch (const SupercriticalError&) {
                o.supercritical = true;
                if (c.supercritical == SupercriticalPolicy::exclude) {
                    o.excluded = true;
                    return o;
                }
                accepted = pair.k2;
            }
            o.error = accepted != o.truth;
            return o;
        });

        GridPointSummary r;
        r.transformed = c.transformed;
        r.snr = w;
        r.k1 = c.k1;
        r.k2 = c.k2;
        std::size_t cnt[2] = {0, 0}, err[2] = {0, 0};
        std::vector<double> stats;
        for (std::size_t t = 0; t < outcomes.size(); ++t) {
            const TrialOutcome& o = outcomes[t];
            const int h = t < n1 ? 0 : 1;
            if (o.supercritical) ++r.supercritical;
            if (o.excluded) continue;
            ++cnt[h];
            err[h] += static_cast<std::size_t>(o.error);
            if (h == 0 && !o.supercritical) stats.push_back(o.value);
        }
        r.trials = cnt[0] + cnt[1];
        const double e1 = cnt[0] ? static_cast<double>(err[0]) / static_cast<double>(cnt[0]) : 0.0;
        const double e2 = cnt[1] ? static_cast<double>(err[1]) / static_cast<double>(cnt[1]) : 0.0;
        r.empirical_error = e1 + e2;
        r.stderr_ = binomial_stderr(r.empirical_error, r.trials);
        const LssCase kase = statistic_case(c.model.kind, c.transformed);
        const CltParams p = clt_params(kase, w, LssMoments::from(c.model.noise, c.model.d0()));
        r.theory_error = theoretical_error(pair, p.V0);
        const Moments m = moments_of(stats);
        r.stat_mean = m.mean;
        r.stat_var = m.var;
        r.theory_mean = p.mk(c.k1);
        r.theory_var = p.V0;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<GridPointSummary> run_rank(const SimConfig& c, unsigned threads) {
    std::vector<GridPointSummary> rows;
    const int K = c.kmax;
    std::vector<ModelSpec> specs;
    for (std::size_t g = 0; g < c.snr_grid.size(); ++g) {
        const double w = c.snr_grid[g];
        specs.clear();
        for (int k = 0; k <= K; ++k)
            specs.push_back(with_spikes(c.model, std::vector<double>(static_cast<std::size_t>(k), w)));
        const auto outcomes = run_parallel(c.trials, threads, [&](std::size_t t) {
            TrialOutcome o;
            o.truth = static_cast<int>(t % static_cast<std::size_t>(K + 1));
            Rng rng(trial_seed(c.master_seed, g, t));
            const DataMatrix data = build(specs[static_cast<std::size_t>(o.truth)], rng);
            int kappa;
            try {
                const StatisticEvaluation ev = evaluate_statistic(data, w, c.transformed);
                o.value = ev.statistic;
                kappa = estimate_rank(ev.statistic, ev.params, K).kappa;
            } catch (const SupercriticalError&) {
                o.supercritical = true;
                if (c.supercritical == SupercriticalPolicy::exclude) {
                    o.excluded = true;
                    return o;
                }
                kappa = K;
            }
            o.error = kappa != o.truth;
            return o;
        });

        GridPointSummary r;
        r.transformed = c.transformed;
        r.snr = w;
        r.k1 = 0;
        r.k2 = K;
        std::size_t errors = 0;
        std::vector<double> stats;
        for (const TrialOutcome& o : outcomes) {
            if (o.supercritical) ++r.supercritical;
            if (o.excluded) continue;
            ++r.trials;
            errors += static_cast<std::size_t>(o.error);
            if (o.truth == 0 && !o.supercritical) stats.push_back(o.value);
        }
        r.empirical_error = r.trials ? static_cast<double>(errors) / static_cast<double>(r.trials) : 0.0;
        r.stderr_ = binomial_stderr(r.empirical_error, r.trials);
        const LssCase kase = statistic_case(c.model.kind, c.transformed);
        const CltParams p = clt_params(kase, w, LssMoments::from(c.model.noise, c.model.d0()));
        const std::vector<double> prior(static_cast<std::size_t>(K + 1), 1.0 / (K + 1));
        r.theory_error = theoretical_rank_error(prior, p.V0, true);
        const Moments m = moments_of(stats);
        r.stat_mean = m.mean;
        r.stat_var = m.var;
        r.theory_mean = p.m0;
        r.theory_var = p.V0;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<GridPointSummary> run_clt_null(const SimConfig& c, unsigned threads) {
    std::vector<GridPointSummary> rows;
    const ModelSpec spec = with_spikes(c.model, {});
    for (std::size_t g = 0; g < c.snr_grid.size(); ++g) {
        const double w = c.snr_grid[g];
        const LssCase kase = statistic_case(c.model.kind, c.transformed);
        const CltParams p = clt_params(kase, w, LssMoments::from(c.model.noise, c.model.d0()));
        const double threshold = p.m_mid(0, 1);
        const auto outcomes = run_parallel(c.trials, threads, [&](std::size_t t) {
            TrialOutcome o;
            Rng rng(trial_seed(c.master_seed, g, t));
            const DataMatrix data = build(spec, rng);
            try {
                o.value = evaluate_statistic(data, w, c.transformed).statistic;
                o.error = o.value > threshold;
            } catch (const SupercriticalError&) {
                o.supercritical = true;
                o.excluded = c.supercritical == SupercriticalPolicy::exclude;
                o.error = 1;
            }
            return o;
        });

        GridPointSummary r;
        r.transformed = c.transformed;
        r.snr = w;
        r.k1 = 0;
        r.k2 = 1;
        std::size_t errors = 0;
        std::vector<double> stats;
        for (const TrialOutcome& o : outcomes) {
            if (o.supercritical) ++r.supercritical;
            if (o.excluded) continue;
            ++r.trials;
            errors += static_cast<std::size_t>(o.error);
            if (!o.supercritical) stats.push_back(o.value);
        }
        r.empirical_error = r.trials ? static_cast<double>(errors) / static_cast<double>(r.trials) : 0.0;
        r.stderr_ = binomial_stderr(r.empirical_error, r.trials);
        // One-sided: P(N(m0, V0) > m0 + V0/4).
        r.theory_error = 0.5 * erfc_std(0.25 * std::sqrt(0.5 * p.V0));
        const Moments m = moments_of(stats);
        r.stat_mean = m.mean;
        r.stat_var = m.var;
        r.theory_mean = p.m0;
        r.theory_var = p.V0;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<GridPointSummary> run_bbp(const SimConfig& c, unsigned threads) {
    const ModelSpec spec = with_spikes(c.model, c.snr_grid);
    const double F = c.model.noise.functionals().F_g;
    const bool rect = c.model.is_rect();
    const double d0 = c.model.d0();
    const double edge = rect ? MpLaw(d0).d_plus() : 2.0;
    const double alpha = c.alpha.resolve(F);

    // Predicted outlier counts from the BBP thresholds.
    std::size_t expect_raw = 0, expect_t = 0;
    const std::vector<double> gammas = spec.snr.gammas();
    for (std::size_t l = 0; l < c.snr_grid.size(); ++l) {
        const double lam = c.snr_grid[l];
        double eff = 0.0;
        switch (c.model.kind) {
            case ModelKind::wigner:
                expect_raw += bbp_wigner(lam).supercritical;
                eff = lam * F;
                expect_t += bbp_wigner(eff).supercritical;
                break;
            case ModelKind::rect_additive:
                expect_raw += bbp_rect(lam, MpLaw(d0)).supercritical;
                eff = effective_snr(RectKind::additive, lam, F, alpha);
                expect_t += bbp_rect(eff, MpLaw(d0)).supercritical;
                break;
            case ModelKind::rect_multiplicative:
                expect_raw += bbp_rect(lam, MpLaw(d0)).supercritical;
                eff = effective_snr(RectKind::multiplicative, gammas[l], F, alpha);
                expect_t += bbp_rect(eff, MpLaw(d0)).supercritical;
                break;
        }
    }

    const auto outcomes = run_parallel(c.trials, threads, [&](std::size_t t) {
        TrialOutcome o;
        Rng rng(trial_seed(c.master_seed, 0, t));
        const DataMatrix data = build(spec, rng);
        const Spectrum raw = rect ? gram_spectrum(data.values) : eigenvalues_sym(data.values);
        o.count_raw = count_outliers(raw, edge, c.raw_outlier_tol);
        if (c.transformed) {
            const Spectrum tr = rect ? gram_spectrum(transform_rect(data.values, c.model.noise, alpha))
                                     : eigenvalues_sym(transform_wigner(data.values, c.model.noise));
            o.count_transformed = count_outliers(tr, edge, c.outlier_tol);
        }
        return o;
    });

    auto summarize = [&](bool transformed, std::size_t expected) {
        GridPointSummary r;
        r.transformed = transformed;
        r.snr = c.snr_grid.empty() ? 0.0 : c.snr_grid.back();
        r.k1 = static_cast<int>(expected);
        r.k2 = static_cast<int>(c.snr_grid.size());
        r.trials = outcomes.size();
        std::size_t mismatches = 0;
        std::vector<double> counts;
        for (const TrialOutcome& o : outcomes) {
            const std::size_t n = transformed ? o.count_transformed : o.count_raw;
            if (r.outlier_histogram.size() <= n) r.outlier_histogram.resize(n + 1, 0);
            ++r.outlier_histogram[n];
            mismatches += n != expected;
            counts.push_back(static_cast<double>(n));
        }
        r.empirical_error = static_cast<double>(mismatches) / static_cast<double>(r.trials);
        r.stderr_ = binomial_stderr(r.empirical_error, r.trials);
        r.theory_error = 0.0;
        const Moments m = moments_of(counts);
        r.stat_mean = m.mean;
        r.stat_var = m.var;
        r.theory_mean = static_cast<double>(expected);
        r.theory_var = 0.0;
        return r;
    };

    std::vector<GridPointSummary> rows;
    rows.push_back(summarize(false, expect_raw));
    if (c.transformed) rows.push_back(summarize(true, expect_t));
    return rows;
}

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

SimSummary run_trials(const SimConfig& config) {
    config.validate();
    const unsigned threads = effective_threads(config.threads);
    SimSummary s;
    s.config = config;
    switch (config.experiment) {
        case ExperimentKind::weak_detection: s.points = run_weak(config, threads); break;
        case ExperimentKind::rank_estimation: s.points = run_rank(config, threads); break;
        case ExperimentKind::clt_null: s.points = run_clt_null(config, threads); break;
        case ExperimentKind::bbp_outliers: s.points = run_bbp(config, threads); break;
    }
    return s;
}

void write_csv(const SimSummary& summary, std::ostream& os, bool extended) {
    os << "experiment,model,noise,transformed,snr,k1,k2,trials,empirical_error,stderr,theory_error,seed";
    if (extended) os << ",supercritical,stat_mean,stat_var,theory_mean,theory_var";
    os << '\n';
    const SimConfig& c = summary.config;
    for (const GridPointSummary& r : summary.points) {
        os << to_string(c.experiment) << ',' << to_string(c.model.kind) << ',' << c.model.noise.label()
           << ',' << (r.transformed ? 1 : 0) << ',' << fmt9(r.snr) << ',' << r.k1 << ',' << r.k2 << ','
           << r.trials << ',' << fmt9(r.empirical_error) << ',' << fmt9(r.stderr_) << ','
           << fmt9(r.theory_error) << ',' << c.master_seed;
        if (extended) {
            os << ',' << r.supercritical << ',' << fmt9(r.stat_mean) << ',' << fmt9(r.stat_var) << ','
               << fmt9(r.theory_mean) << ',' << fmt9(r.theory_var);
        }
        os << '\n';
    }
}

void emit_csv(const SimSummary& summary, const std::filesystem::path& path, bool extended) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_csv(summary, out, extended);
    out.flush();
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace spiked

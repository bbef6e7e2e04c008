#include "spiked/detect.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "spiked/error.hpp"
#include "spiked/transforms.hpp"

namespace spiked {

double erfc_std(double x) { return std::erfc(x); }

void HypothesisPair::validate() const {
    if (k1 < 0 || k2 < 0 || !(k1 < k2)) {
        std::ostringstream os;
        os << "hypothesis ranks must satisfy 0 <= k1 < k2 (got k1=" << k1 << ", k2=" << k2 << ")";
        throw ValidationError(os.str());
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw ValidationError("hypothesis SNR omega must be positive");
    }
}

Decision decide(double L, const CltParams& params, const HypothesisPair& pair) {
    pair.validate();
    Decision d;
    d.statistic = L;
    d.threshold = params.m_mid(pair.k1, pair.k2);
    d.accepted = (L <= d.threshold) ? pair.k1 : pair.k2;
    return d;
}

LssCase statistic_case(ModelKind kind, bool transformed) {
    switch (kind) {
        case ModelKind::wigner:
            return transformed ? LssCase::wigner_transformed : LssCase::wigner;
        case ModelKind::rect_additive:
            return transformed ? LssCase::rect_transformed : LssCase::rect;
        case ModelKind::rect_multiplicative:
            if (transformed) {
                throw ValidationError("no transformed test statistic exists for the multiplicative model");
            }
            return LssCase::rect;
    }
    throw ValidationError("unknown model kind");
}

StatisticEvaluation evaluate_statistic(const DataMatrix& data, double omega, bool transformed) {
    const ModelSpec& spec = data.spec;
    StatisticEvaluation ev;
    ev.kase = statistic_case(spec.kind, transformed);
    const LssMoments m = LssMoments::from(spec.noise, spec.is_rect() ? spec.d0() : 1.0);
    ev.params = clt_params(ev.kase, omega, m);
    switch (ev.kase) {
        case LssCase::wigner:
            ev.spectrum = eigenvalues_sym(data.values);
            break;
        case LssCase::wigner_transformed:
            ev.spectrum = eigenvalues_sym(transform_wigner(data.values, spec.noise));
            break;
        case LssCase::rect:
            ev.spectrum = gram_spectrum(data.values);
            break;
        case LssCase::rect_transformed:
            // The rectangular transformed test uses h_0.
            ev.spectrum = gram_spectrum(transform_rect(data.values, spec.noise, 0.0));
            break;
    }
    ev.statistic = statistic(ev.kase, ev.spectrum, omega, m);
    return ev;
}

Decision run_test(const DataMatrix& data, const HypothesisPair& pair, TestOptions options) {
    pair.validate();
    const StatisticEvaluation ev = evaluate_statistic(data, pair.omega, options.transformed);
    return decide(ev.statistic, ev.params, pair);
}

double theoretical_error(const HypothesisPair& pair, double V0) {
    pair.validate();
    if (!(V0 >= 0.0)) throw DomainError("V0 must be nonnegative");
    return erfc_std(0.25 * (pair.k2 - pair.k1) * std::sqrt(0.5 * V0));
}

RankEstimate estimate_rank(double L, const CltParams& params, std::optional<int> K_max) {
    if (!(params.V0 > 0.0)) throw DomainError("rank estimation needs V0 > 0");
    RankEstimate r;
    r.kappa_prime = 2.0 * (L - params.m0) / params.V0;
    if (L <= params.m_mid(0, 1)) {
        r.kappa = 0;
    } else {
        const double c = std::ceil(r.kappa_prime - 0.5);
        r.kappa = c > 1e9 ? 1000000000 : static_cast<int>(c);
    }
    if (K_max) {
        if (*K_max < 0) throw ValidationError("K_max must be nonnegative");
        if (r.kappa > *K_max) {
            r.kappa = *K_max;
            r.clamped = true;
        }
    }
    return r;
}

double theoretical_rank_error(std::span<const double> prior, double V0, bool bounded) {
    if (prior.empty()) throw ValidationError("rank prior must not be empty");
    for (double p : prior) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("rank prior entries must be nonnegative");
    }
    const double total = std::accumulate(prior.begin(), prior.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "rank prior must sum to 1 (sums to " << total << ")";
        throw ValidationError(os.str());
    }
    if (!(V0 >= 0.0)) throw DomainError("V0 must be nonnegative");
    const double e = erfc_std(0.25 * std::sqrt(0.5 * V0));
    const double p0 = prior.front();
    if (!bounded) return (1.0 - 0.5 * p0) * e;
    const double pK = prior.back();
    return (1.0 - 0.5 * (p0 + pK)) * e;
}

}  // namespace spiked

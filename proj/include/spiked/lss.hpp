#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spiked/noise.hpp"
#include "spiked/spectral.hpp"

namespace spiked {

enum class LssCase { wigner, rect, wigner_transformed, rect_transformed };

std::string to_string(LssCase c);
inline bool is_rect(LssCase c) { return c == LssCase::rect || c == LssCase::rect_transformed; }
inline bool is_transformed(LssCase c) {
    return c == LssCase::wigner_transformed || c == LssCase::rect_transformed;
}

// Every moment or functional a CLT formula can consume.
struct LssMoments {
    double w2 = 1.0;
    double w4 = 3.0;
    double d0 = 1.0;
    NoiseFunctionals fun;

    static LssMoments from(const NoiseModel& noise, double d0 = 1.0);
};

// Limiting Gaussian N(m_k, V0) of a test statistic under a rank-k spike.
struct CltParams {
    LssCase kase = LssCase::wigner;
    double omega = 0.0;
    LssMoments moments;
    double m0 = 0.0;
    double V0 = 0.0;
    // Mean increment per unit of rank, evaluated from its own closed form;
    // equals V0/2 algebraically.
    double shift = 0.0;

    double mk(double k) const { return m0 + k * shift; }
    double m_mid(int k1, int k2) const { return 0.5 * (mk(k1) + mk(k2)); }
};

// Test statistics. N (or M) is the spectrum length.
double stat_wigner(const Spectrum& spectrum, double omega, double w2, double w4);
double stat_rect(const Spectrum& spectrum, double omega, double d0, double w4);
double stat_wigner_transformed(const Spectrum& spectrum, double omega,
                               const NoiseFunctionals& fun, double w2);
double stat_rect_transformed(const Spectrum& spectrum, double omega, double d0,
                             const NoiseFunctionals& fun);
double statistic(LssCase kase, const Spectrum& spectrum, double omega, const LssMoments& m);

CltParams clt_wigner(double omega, double w2, double w4);
CltParams clt_rect(double omega, double d0, double w4);
CltParams clt_wigner_transformed(double omega, const NoiseFunctionals& fun, double w2);
CltParams clt_rect_transformed(double omega, double d0, const NoiseFunctionals& fun);
CltParams clt_params(LssCase kase, double omega, const LssMoments& m);

// Rank-one rectangular test: limiting mean when the true SNR is lambda
// (0 under the null, omega under the alternative), and its critical value.
double rank1_rect_mean(double omega, double lambda, double d0, double w4);
double rank1_rect_critical(double omega, double d0, double w4);

using SpectralFunction = std::function<double(double)>;

// tau_0 .. tau_{L_max} of f against the arcsine weight on [-2, 2], by
// Gauss-Chebyshev quadrature with at least 4 L_max nodes.
std::vector<double> chebyshev_coefficients(const SpectralFunction& f, int L_max);
double chebyshev_tau(const SpectralFunction& f, int ell, int L_max);

struct SeriesValue {
    double value = 0.0;
    double tail = 0.0;  // estimated truncation error
    bool converged = false;
};

// Limiting mean of sum f(mu_i) - n * integral(f) under spikes omegas (any
// length, distinct values allowed).
SeriesValue clt_mean_series(const SpectralFunction& f, LssCase kase,
                            std::span<const double> omegas, const LssMoments& m,
                            int L_max = 200);
SeriesValue clt_variance_series(const SpectralFunction& f, LssCase kase, const LssMoments& m,
                                int L_max = 200);

// The test function whose centered linear statistic is the case's statistic.
SpectralFunction optimal_phi(LssCase kase, double omega, const LssMoments& m);
// Sum over several SNRs.
SpectralFunction optimal_phi(LssCase kase, std::span<const double> omegas, const LssMoments& m);

// sum f(mu_i) - n * integral of f against the semicircle (rect = false) or
// Marchenko-Pastur law with ratio d0.
double centered_lss(const SpectralFunction& f, const Spectrum& spectrum, bool rect, double d0);

}  // namespace spiked

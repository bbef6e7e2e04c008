#include "spiked/lss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spiked/error.hpp"

namespace spiked {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void domain(const std::string& what, double value) {
    std::ostringstream os;
    os.precision(10);
    os << what << " (got " << value << ")";
    throw DomainError(os.str());
}

// -sum log(a - b mu_i); pole at a/b.
double neg_log_det(const Spectrum& s, double a, double b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double arg = a - b * s.eigenvalues[i];
        if (!(arg > 0.0)) throw SupercriticalError(s.eigenvalues[i], a / b, i);
        acc -= std::log(arg);
    }
    return acc;
}

void check_d0(double d0) {
    if (!(d0 > 0.0 && d0 <= 1.0)) domain("d0 must lie in (0,1]", d0);
}

void check_w4(double w4, const char* name) {
    if (!(w4 > 1.0)) domain(std::string(name) + " must exceed 1", w4);
}

// Shared constant-and-log part of both rectangular statistics at SNR t.
double rect_core(const Spectrum& s, double t, double d0, double trace_coef) {
    const double M = static_cast<double>(s.size());
    const double z = (1.0 + d0 / t) * (1.0 + t);
    double L = neg_log_det(s, z, 1.0);
    L += trace_coef * (s.sum() - M);
    L += M * (t / d0 - std::log(t / d0) - (1.0 - d0) / d0 * std::log1p(t));
    return L;
}

}  // namespace

std::string to_string(LssCase c) {
    switch (c) {
        case LssCase::wigner: return "wigner";
        case LssCase::rect: return "rect";
        case LssCase::wigner_transformed: return "wigner_transformed";
        case LssCase::rect_transformed: return "rect_transformed";
    }
    return "?";
}

LssMoments LssMoments::from(const NoiseModel& noise, double d0) {
    LssMoments m;
    m.w2 = noise.w2();
    m.w4 = noise.moment_values().w4;
    m.d0 = d0;
    m.fun = noise.functionals();
    return m;
}

double stat_wigner(const Spectrum& s, double omega, double w2, double w4) {
    if (!(omega >= 0.0 && omega < 1.0)) domain("wigner statistic needs 0 <= omega < 1", omega);
    check_w4(w4, "w4");
    const double N = static_cast<double>(s.size());
    const double r = std::sqrt(omega);
    double L = neg_log_det(s, 1.0 + omega, r);
    L += 0.5 * omega * N;
    L += r * (2.0 / w2 - 1.0) * s.sum();
    L += omega * (1.0 / (w4 - 1.0) - 0.5) * (s.sum_squares() - N);
    return L;
}

double stat_wigner_transformed(const Spectrum& s, double omega, const NoiseFunctionals& fun,
                               double w2) {
    const double F = fun.F_g;
    const double t = omega * F;
    if (!(omega >= 0.0 && t < 1.0)) domain("transformed wigner statistic needs 0 <= omega F_g < 1", t);
    check_w4(fun.w4_tilde, "w4_tilde");
    const double N = static_cast<double>(s.size());
    double L = neg_log_det(s, 1.0 + t, std::sqrt(t));
    L += 0.5 * t * N;
    L += std::sqrt(omega) * (2.0 * std::sqrt(fun.F_gd) / w2 - std::sqrt(F)) * s.sum();
    L += omega * (fun.G_H / (fun.w4_tilde - 1.0) - 0.5 * F) * (s.sum_squares() - N);
    return L;
}

double stat_rect(const Spectrum& s, double omega, double d0, double w4) {
    check_d0(d0);
    check_w4(w4, "w4");
    if (!(omega > 0.0 && omega < std::sqrt(d0))) domain("rect statistic needs 0 < omega < sqrt(d0)", omega);
    return rect_core(s, omega, d0, omega / d0 * (2.0 / (w4 - 1.0) - 1.0));
}

double stat_rect_transformed(const Spectrum& s, double omega, double d0,
                             const NoiseFunctionals& fun) {
    check_d0(d0);
    check_w4(fun.w4_tilde, "w4_tilde");
    const double F = fun.F_g;
    const double t = omega * F;
    if (!(omega > 0.0 && t < std::sqrt(d0))) {
        domain("transformed rect statistic needs 0 < omega F_g < sqrt(d0)", t);
    }
    const double coef = 2.0 * omega / d0 * (fun.G_H / (fun.w4_tilde - 1.0) - 0.5 * F);
    return rect_core(s, t, d0, coef);
}

double statistic(LssCase kase, const Spectrum& s, double omega, const LssMoments& m) {
    switch (kase) {
        case LssCase::wigner: return stat_wigner(s, omega, m.w2, m.w4);
        case LssCase::rect: return stat_rect(s, omega, m.d0, m.w4);
        case LssCase::wigner_transformed: return stat_wigner_transformed(s, omega, m.fun, m.w2);
        case LssCase::rect_transformed: return stat_rect_transformed(s, omega, m.d0, m.fun);
    }
    throw ValidationError("unknown statistic case");
}

CltParams clt_wigner(double omega, double w2, double w4) {
    if (!(omega > 0.0 && omega < 1.0)) domain("wigner CLT needs 0 < omega < 1", omega);
    if (!(w2 > 0.0)) domain("w2 must be positive", w2);
    check_w4(w4, "w4");
    CltParams p;
    p.kase = LssCase::wigner;
    p.omega = omega;
    p.moments.w2 = w2;
    p.moments.w4 = w4;
    const double lg = -std::log1p(-omega);
    const double w = omega, w_sq = omega * omega;
    p.m0 = 0.5 * lg + ((w2 - 1.0) / (w4 - 1.0) - 0.5) * w + 0.25 * (w4 - 3.0) * w_sq;
    p.V0 = 2.0 * lg + (4.0 / w2 - 2.0) * w + (2.0 / (w4 - 1.0) - 1.0) * w_sq;
    p.shift = lg + (2.0 / w2 - 1.0) * w + (1.0 / (w4 - 1.0) - 0.5) * w_sq;
    return p;
}

CltParams clt_rect(double omega, double d0, double w4) {
    check_d0(d0);
    check_w4(w4, "w4");
    if (!(omega > 0.0 && omega < std::sqrt(d0))) domain("rect CLT needs 0 < omega < sqrt(d0)", omega);
    CltParams p;
    p.kase = LssCase::rect;
    p.omega = omega;
    p.moments.w4 = w4;
    p.moments.d0 = d0;
    const double q = omega * omega / d0;
    const double lg = -std::log1p(-q);
    p.m0 = 0.5 * lg + 0.5 * q * (w4 - 3.0);
    p.V0 = 2.0 * lg + 2.0 * q * (2.0 / (w4 - 1.0) - 1.0);
    p.shift = lg + q * (2.0 / (w4 - 1.0) - 1.0);
    return p;
}

CltParams clt_wigner_transformed(double omega, const NoiseFunctionals& fun, double w2) {
    const double F = fun.F_g, Fd = fun.F_gd, G = fun.G_H, w4t = fun.w4_tilde;
    const double t = omega * F;
    if (!(omega > 0.0 && t < 1.0)) domain("transformed wigner CLT needs 0 < omega F_g < 1", t);
    if (!(w2 > 0.0)) domain("w2 must be positive", w2);
    check_w4(w4t, "w4_tilde");
    CltParams p;
    p.kase = LssCase::wigner_transformed;
    p.omega = omega;
    p.moments.w2 = w2;
    p.moments.fun = fun;
    const double lg = -std::log1p(-t);
    const double w = omega, w_sq = omega * omega;
    p.m0 = 0.5 * lg + ((w2 - 1.0) * G / (w4t - 1.0) - 0.5 * F) * w + 0.25 * (w4t - 3.0) * t * t;
    p.V0 = 2.0 * lg + (4.0 * Fd / w2 - 2.0 * F) * w + (2.0 * G * G / (w4t - 1.0) - F * F) * w_sq;
    p.shift = lg + (2.0 * Fd / w2 - F) * w + (G * G / (w4t - 1.0) - 0.5 * F * F) * w_sq;
    return p;
}

CltParams clt_rect_transformed(double omega, double d0, const NoiseFunctionals& fun) {
    check_d0(d0);
    const double F = fun.F_g, G = fun.G_H, w4t = fun.w4_tilde;
    check_w4(w4t, "w4_tilde");
    const double t = omega * F;
    if (!(omega > 0.0 && t < std::sqrt(d0))) {
        domain("transformed rect CLT needs 0 < omega F_g < sqrt(d0)", t);
    }
    CltParams p;
    p.kase = LssCase::rect_transformed;
    p.omega = omega;
    p.moments.d0 = d0;
    p.moments.fun = fun;
    const double q = t * t / d0;
    const double lg = -std::log1p(-q);
    const double c = G * G / (w4t - 1.0) - 0.5 * F * F;
    p.m0 = 0.5 * lg + 0.5 * q * (w4t - 3.0);
    p.V0 = 4.0 * omega * omega / d0 * c + 2.0 * lg;
    p.shift = lg + 2.0 * omega * omega / d0 * c;
    return p;
}

CltParams clt_params(LssCase kase, double omega, const LssMoments& m) {
    CltParams p;
    switch (kase) {
        case LssCase::wigner: p = clt_wigner(omega, m.w2, m.w4); break;
        case LssCase::rect: p = clt_rect(omega, m.d0, m.w4); break;
        case LssCase::wigner_transformed: p = clt_wigner_transformed(omega, m.fun, m.w2); break;
        case LssCase::rect_transformed: p = clt_rect_transformed(omega, m.d0, m.fun); break;
    }
    p.moments = m;
    return p;
}

double rank1_rect_mean(double omega, double lambda, double d0, double w4) {
    check_d0(d0);
    check_w4(w4, "w4");
    if (!(omega > 0.0 && omega < std::sqrt(d0))) domain("rank-one rect mean needs 0 < omega < sqrt(d0)", omega);
    if (!(lambda >= 0.0 && lambda < std::sqrt(d0))) domain("rank-one rect mean needs 0 <= lambda < sqrt(d0)", lambda);
    const double q = omega * omega / d0;
    const double r = lambda * lambda / d0;
    return -0.5 * std::log1p(-q) + 0.5 * q * (w4 - 3.0) - std::log1p(-r) +
           r * (2.0 / (w4 - 1.0) - 1.0);
}

double rank1_rect_critical(double omega, double d0, double w4) {
    check_d0(d0);
    check_w4(w4, "w4");
    if (!(omega > 0.0 && omega < std::sqrt(d0))) domain("rank-one rect critical value needs 0 < omega < sqrt(d0)", omega);
    const double q = omega * omega / d0;
    return -std::log1p(-q) + 0.5 * q * (2.0 / (w4 - 1.0) + w4 - 4.0);
}

std::vector<double> chebyshev_coefficients(const SpectralFunction& f, int L_max) {
    if (L_max < 0) throw ValidationError("L_max must be nonnegative");
    const int n = std::max(4 * L_max, 64);
    std::vector<double> theta(static_cast<std::size_t>(n)), fx(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        theta[static_cast<std::size_t>(j)] = (j + 0.5) * kPi / n;
        fx[static_cast<std::size_t>(j)] = f(2.0 * std::cos(theta[static_cast<std::size_t>(j)]));
    }
    std::vector<double> tau(static_cast<std::size_t>(L_max) + 1, 0.0);
    for (int l = 0; l <= L_max; ++l) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += std::cos(l * theta[static_cast<std::size_t>(j)]) * fx[static_cast<std::size_t>(j)];
        tau[static_cast<std::size_t>(l)] = acc / n;
    }
    return tau;
}

double chebyshev_tau(const SpectralFunction& f, int ell, int L_max) {
    if (ell < 0 || ell > L_max) throw ValidationError("ell must lie in [0, L_max]");
    return chebyshev_coefficients(f, L_max)[static_cast<std::size_t>(ell)];
}

namespace {

SpectralFunction scaled_for_case(const SpectralFunction& f, LssCase kase, double d0) {
    if (!is_rect(kase)) return f;
    check_d0(d0);
    const double r = std::sqrt(d0);
    return [f, r, d0](double x) { return f(r * x + 1.0 + d0); };
}

// Tail estimate of a series whose last two terms are a and b.
double geometric_tail(double prev, double last) {
    const double al = std::abs(last), ap = std::abs(prev);
    if (al == 0.0) return 0.0;
    const double q = ap > 0.0 ? std::min(al / ap, 0.999) : 0.999;
    return al * q / (1.0 - q);
}

}  // namespace

SeriesValue clt_mean_series(const SpectralFunction& f, LssCase kase,
                            std::span<const double> omegas, const LssMoments& m, int L_max) {
    if (L_max < 20) throw ValidationError("L_max must be at least 20");
    const SpectralFunction ft = scaled_for_case(f, kase, m.d0);
    const std::vector<double> tau = chebyshev_coefficients(ft, L_max);
    const double F = m.fun.F_g, Fd = m.fun.F_gd, G = m.fun.G_H;
    const double w4 = is_transformed(kase) ? m.fun.w4_tilde : m.w4;

    double value = 0.25 * (ft(2.0) + ft(-2.0)) - 0.5 * tau[0];
    if (is_rect(kase)) {
        value += (w4 - 3.0) * tau[2];
    } else {
        value += (m.w2 - 2.0) * tau[2] + (w4 - 3.0) * tau[4];
    }

    double tail = 0.0;
    for (double w : omegas) {
        double ratio = 0.0;  // geometric factor per unit of ell
        int first = 1;
        switch (kase) {
            case LssCase::wigner:
                ratio = std::sqrt(w);
                break;
            case LssCase::rect:
                ratio = w / std::sqrt(m.d0);
                break;
            case LssCase::wigner_transformed:
                value += std::sqrt(w * Fd) * tau[1] + w * G * tau[2];
                ratio = std::sqrt(w * F);
                first = 3;
                break;
            case LssCase::rect_transformed:
                value += w / std::sqrt(m.d0) * (G - F) * tau[1];
                ratio = w * F / std::sqrt(m.d0);
                break;
        }
        double p = std::pow(ratio, first);
        double prev = 0.0, last = 0.0;
        for (int l = first; l <= L_max; ++l) {
            const double term = p * tau[static_cast<std::size_t>(l)];
            value += term;
            prev = last;
            last = term;
            p *= ratio;
        }
        tail += geometric_tail(prev, last);
    }
    SeriesValue out;
    out.value = value;
    out.tail = tail;
    out.converged = tail <= 1e-10 * std::max(1.0, std::abs(value));
    return out;
}

SeriesValue clt_variance_series(const SpectralFunction& f, LssCase kase, const LssMoments& m,
                                int L_max) {
    if (L_max < 20) throw ValidationError("L_max must be at least 20");
    const SpectralFunction ft = scaled_for_case(f, kase, m.d0);
    const std::vector<double> tau = chebyshev_coefficients(ft, L_max);
    const double w4 = is_transformed(kase) ? m.fun.w4_tilde : m.w4;

    double value = 0.0;
    if (is_rect(kase)) {
        value += (w4 - 3.0) * tau[1] * tau[1];
    } else {
        value += (m.w2 - 2.0) * tau[1] * tau[1] + 2.0 * (w4 - 3.0) * tau[2] * tau[2];
    }
    double prev = 0.0, last = 0.0;
    for (int l = 1; l <= L_max; ++l) {
        const double t = tau[static_cast<std::size_t>(l)];
        const double term = 2.0 * l * t * t;
        value += term;
        prev = last;
        last = term;
    }
    SeriesValue out;
    out.value = value;
    out.tail = geometric_tail(prev, last);
    out.converged = out.tail <= 1e-10 * std::max(1.0, std::abs(value));
    return out;
}

SpectralFunction optimal_phi(LssCase kase, double omega, const LssMoments& m) {
    const double F = m.fun.F_g, Fd = m.fun.F_gd, G = m.fun.G_H, w4t = m.fun.w4_tilde;
    const double w2 = m.w2, w4 = m.w4, d0 = m.d0;
    auto neg_log = [](double arg, double x) {
        if (!(arg > 0.0)) {
            std::ostringstream os;
            os << "optimal function log argument is nonpositive at x=" << x;
            throw DomainError(os.str());
        }
        return -std::log(arg);
    };
    switch (kase) {
        case LssCase::wigner: {
            const double r = std::sqrt(omega);
            const double c1 = r * (2.0 / w2 - 1.0);
            const double c2 = omega * (1.0 / (w4 - 1.0) - 0.5);
            return [=](double x) { return neg_log(1.0 - r * x + omega, x) + c1 * x + c2 * x * x; };
        }
        case LssCase::wigner_transformed: {
            const double t = omega * F;
            const double r = std::sqrt(t);
            const double c1 = std::sqrt(omega) * (2.0 * std::sqrt(Fd) / w2 - std::sqrt(F));
            const double c2 = omega * (G / (w4t - 1.0) - 0.5 * F);
            return [=](double x) { return neg_log(1.0 - r * x + t, x) + c1 * x + c2 * x * x; };
        }
        case LssCase::rect: {
            check_d0(d0);
            const double z = (1.0 + d0 / omega) * (1.0 + omega);
            const double c1 = omega / d0 * (2.0 / (w4 - 1.0) - 1.0);
            return [=](double x) { return c1 * x + neg_log(z - x, x); };
        }
        case LssCase::rect_transformed: {
            check_d0(d0);
            const double t = omega * F;
            const double z = (1.0 + d0 / t) * (1.0 + t);
            const double c1 = 2.0 * omega / d0 * (G / (w4t - 1.0) - 0.5 * F);
            return [=](double x) { return c1 * x + neg_log(z - x, x); };
        }
    }
    throw ValidationError("unknown statistic case");
}

SpectralFunction optimal_phi(LssCase kase, std::span<const double> omegas, const LssMoments& m) {
    std::vector<SpectralFunction> parts;
    for (double w : omegas) parts.push_back(optimal_phi(kase, w, m));
    return [parts = std::move(parts)](double x) {
        double s = 0.0;
        for (const auto& p : parts) s += p(x);
        return s;
    };
}

double centered_lss(const SpectralFunction& f, const Spectrum& s, bool rect, double d0) {
    double acc = 0.0;
    for (double v : s.eigenvalues) acc += f(v);
    const double n = static_cast<double>(s.size());
    const double mean = rect ? mp_integral(f, MpLaw(d0)) : semicircle_integral(f);
    return acc - n * mean;
}

}  // namespace spiked

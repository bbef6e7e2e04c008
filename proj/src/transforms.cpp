#include "spiked/transforms.hpp"

#include <cmath>
#include <sstream>

#include "spiked/error.hpp"

namespace spiked {

Eigen::MatrixXd transform_wigner(const Eigen::MatrixXd& M, const NoiseModel& noise) {
    if (M.rows() != M.cols()) throw ValidationError("transform_wigner requires a square matrix");
    const Eigen::Index n = M.rows();
    const double N = static_cast<double>(n);
    const double F = noise.functionals().F_g;
    const double Fd = noise.functionals().F_gd;
    const double w2 = noise.w2();
    const Density& off = noise.offdiag();
    const Density& dg = noise.diag();

    const double in_off = std::sqrt(N);
    const double out_off = 1.0 / std::sqrt(F * N);
    const double in_diag = std::sqrt(N / w2);
    const double out_diag = std::sqrt(w2 / (Fd * N));

    Eigen::MatrixXd T(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double v = off.score(in_off * M(i, j)) * out_off;
            T(i, j) = v;
            T(j, i) = v;
        }
        T(j, j) = out_diag * dg.score(in_diag * M(j, j));
    }
    return T;
}

Eigen::MatrixXd transform_wigner(const DataMatrix& data, const NoiseModel& noise) {
    if (data.spec.kind != ModelKind::wigner) {
        throw ValidationError("transform_wigner applied to a rectangular model");
    }
    return transform_wigner(data.values, noise);
}

Eigen::MatrixXd transform_rect(const Eigen::MatrixXd& Y, const NoiseModel& noise, double alpha) {
    const double N = static_cast<double>(Y.cols());
    const double F = noise.functionals().F_g;
    const double norm = alpha * alpha + 2.0 * alpha + F;
    if (!(norm > 0.0)) {
        std::ostringstream os;
        os << "transform normalization alpha^2 + 2 alpha + F_g = " << norm << " is not positive";
        throw DomainError(os.str());
    }
    const Density& d = noise.offdiag();
    const double in = std::sqrt(N);
    const double out = 1.0 / std::sqrt(norm * N);
    return Y.unaryExpr([&](double y) {
        const double x = in * y;
        return (d.score(x) + alpha * x) * out;
    });
}

Eigen::MatrixXd transform_rect(const DataMatrix& data, const NoiseModel& noise, double alpha) {
    if (!data.spec.is_rect()) throw ValidationError("transform_rect applied to a wigner model");
    return transform_rect(data.values, noise, alpha);
}

double optimal_alpha(double gamma, double F_g) {
    if (!(gamma > 0.0)) throw DomainError("optimal_alpha requires gamma > 0");
    const double rad = 4.0 * F_g + 4.0 * gamma * F_g + gamma * gamma * F_g * F_g;
    return (-gamma * F_g + std::sqrt(rad)) / (2.0 * (1.0 + gamma));
}

double lambda_g(double gamma, double F_g) {
    if (!(gamma > 0.0)) throw DomainError("lambda_g requires gamma > 0");
    const double rad = 4.0 * F_g + 4.0 * gamma * F_g + gamma * gamma * F_g * F_g;
    return gamma + 0.5 * gamma * gamma * F_g + 0.5 * gamma * std::sqrt(rad);
}

double effective_snr(RectKind kind, double snr, double F_g, double alpha) {
    const double V = alpha * alpha + 2.0 * alpha + F_g;
    if (!(V > 0.0)) throw DomainError("transform normalization is not positive");
    const double M = F_g + alpha;
    if (kind == RectKind::additive) return snr * M * M / V;
    const double g = snr;
    return (2.0 * g * (1.0 + alpha) * M + g * g * M * M) / V;
}

double effective_snr(RectKind kind, double snr, const NoiseModel& noise, double alpha) {
    return effective_snr(kind, snr, noise.functionals().F_g, alpha);
}

double effective_snr_from_functionals(RectKind kind, double snr, const TransformFunctionals& t) {
    if (!(t.V_q > 0.0)) throw DomainError("V_q must be positive");
    if (kind == RectKind::additive) return snr * t.M_q * t.M_q / t.V_q;
    const double g = snr;
    return (2.0 * g * t.M_q * t.E_q + g * g * t.M_q * t.M_q) / t.V_q;
}

TransformOptimum transform_optimum(double gamma, double F_g) {
    TransformOptimum o;
    o.gamma = gamma;
    o.F_g = F_g;
    o.alpha_g = optimal_alpha(gamma, F_g);
    o.lambda_g = lambda_g(gamma, F_g);
    return o;
}

}  // namespace spiked

#include "spiked/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spiked/error.hpp"
#include "spiked/quadrature.hpp"

namespace spiked {

namespace {
constexpr double kPi = std::numbers::pi;
}

double Spectrum::sum() const {
    double s = 0.0;
    for (double v : eigenvalues) s += v;
    return s;
}

double Spectrum::sum_squares() const {
    double s = 0.0;
    for (double v : eigenvalues) s += v * v;
    return s;
}

Spectrum Spectrum::from_values(std::vector<double> values) {
    std::sort(values.begin(), values.end(), std::greater<>());
    return Spectrum{std::move(values)};
}

Spectrum eigenvalues_sym(const Eigen::MatrixXd& matrix) {
    if (matrix.rows() != matrix.cols()) {
        throw ValidationError("eigenvalues_sym requires a square matrix");
    }
    const Eigen::Index n = matrix.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i)
            if (matrix(i, j) != matrix(j, i)) {
                std::ostringstream os;
                os << "matrix is not symmetric at (" << i << "," << j << ")";
                throw ValidationError(os.str());
            }
    Spectrum s;
    if (n == 0) return s;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw DomainError("symmetric eigensolver failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    s.eigenvalues.assign(ev.data(), ev.data() + n);
    std::reverse(s.eigenvalues.begin(), s.eigenvalues.end());
    return s;
}

Spectrum gram_spectrum(const Eigen::MatrixXd& Y) {
    if (Y.rows() > Y.cols()) {
        throw ValidationError("gram_spectrum requires M <= N; transpose the data");
    }
    Spectrum s;
    if (Y.rows() == 0) return s;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Y);
    if (svd.info() != Eigen::Success) throw DomainError("singular value decomposition failed");
    const Eigen::VectorXd& sv = svd.singularValues();
    s.eigenvalues.resize(static_cast<std::size_t>(sv.size()));
    for (Eigen::Index i = 0; i < sv.size(); ++i) s.eigenvalues[static_cast<std::size_t>(i)] = sv(i) * sv(i);
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), std::greater<>());
    return s;
}

double semicircle_density(double x) {
    if (std::abs(x) >= 2.0) return 0.0;
    return std::sqrt(4.0 - x * x) / (2.0 * kPi);
}

double semicircle_stieltjes(double z) {
    if (!(std::abs(z) > 2.0)) {
        std::ostringstream os;
        os << "semicircle Stieltjes transform needs |z| > 2, got " << z;
        throw DomainError(os.str());
    }
    // Root of s^2 + z s + 1 with |s| < 1, written without cancellation.
    const double r = std::sqrt(z * z - 4.0);
    return -2.0 / (z + std::copysign(r, z));
}

double semicircle_integral(const std::function<double(double)>& f) {
    const auto integrand = [&](double t) {
        const double st = std::sin(t);
        return f(2.0 * std::cos(t)) * st * st;
    };
    return (2.0 / kPi) * integrate(integrand, 0.0, kPi, 1e-12).value;
}

MpLaw::MpLaw(double d0) : d0_(d0) {
    if (!(d0 > 0.0 && d0 <= 1.0)) {
        std::ostringstream os;
        os << "d0 must lie in (0,1], got " << d0;
        throw ValidationError(os.str());
    }
    const double r = std::sqrt(d0);
    dm_ = (1.0 - r) * (1.0 - r);
    dp_ = (1.0 + r) * (1.0 + r);
}

double MpLaw::density(double x) const {
    if (x <= dm_ || x >= dp_ || x <= 0.0) return 0.0;
    return std::sqrt((dp_ - x) * (x - dm_)) / (2.0 * kPi * d0_ * x);
}

double mp_stieltjes(double z, const MpLaw& law) {
    if (z == 0.0 || (z >= law.d_minus() && z <= law.d_plus())) {
        std::ostringstream os;
        os << "MP Stieltjes transform undefined at z=" << z << " (support [" << law.d_minus()
           << ", " << law.d_plus() << "])";
        throw DomainError(os.str());
    }
    // d0 z s^2 + b s + 1 = 0 with b = z - 1 + d0; take the root that is
    // analytic off the support (smaller magnitude for z > 0, positive for z < 0).
    const double d0 = law.d0();
    const double b = z - 1.0 + d0;
    const double disc = b * b - 4.0 * d0 * z;
    const double r = std::sqrt(std::max(disc, 0.0));
    return -2.0 / (b + std::copysign(r, b));
}

double mp_companion_stieltjes(double z, const MpLaw& law) {
    return law.d0() * mp_stieltjes(z, law) + (law.d0() - 1.0) / z;
}

double mp_integral(const std::function<double(double)>& f, const MpLaw& law) {
    const double d0 = law.d0();
    const double r = std::sqrt(d0);
    const auto integrand = [&](double t) {
        const double x = 1.0 + d0 + 2.0 * r * std::cos(t);
        const double st = std::sin(t);
        return f(x) * 2.0 * st * st / (kPi * x);
    };
    return integrate(integrand, 0.0, kPi, 1e-12).value;
}

BbpPrediction bbp_wigner(double lambda_eff) {
    if (!(lambda_eff > 0.0)) throw DomainError("effective SNR must be positive");
    BbpPrediction p;
    if (lambda_eff > 1.0) {
        const double r = std::sqrt(lambda_eff);
        p.outlier_location = r + 1.0 / r;
        p.overlap = 1.0 - 1.0 / lambda_eff;
        p.supercritical = true;
    } else {
        p.outlier_location = 2.0;
    }
    return p;
}

BbpPrediction bbp_rect(double lambda_eff, const MpLaw& law) {
    if (!(lambda_eff > 0.0)) throw DomainError("effective SNR must be positive");
    const double d0 = law.d0();
    BbpPrediction p;
    if (lambda_eff > std::sqrt(d0)) {
        const double l = lambda_eff;
        p.outlier_location = (1.0 + l) * (1.0 + d0 / l);
        p.overlap = 1.0 - d0 * (1.0 + l) / (l * (l + d0));
        p.supercritical = true;
    } else {
        p.outlier_location = law.d_plus();
    }
    return p;
}

std::size_t count_outliers(const Spectrum& spectrum, double edge, double tol) {
    const double cut = edge + tol;
    return static_cast<std::size_t>(std::count_if(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(),
                                                  [cut](double v) { return v > cut; }));
}

}  // namespace spiked

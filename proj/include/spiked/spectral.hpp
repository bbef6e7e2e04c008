#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace spiked {

// Eigenvalues sorted non-increasing.
struct Spectrum {
    std::vector<double> eigenvalues;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    bool empty() const noexcept { return eigenvalues.empty(); }
    double max() const { return eigenvalues.front(); }
    double sum() const;
    double sum_squares() const;

    static Spectrum from_values(std::vector<double> values);  // sorts
};

// Full spectrum of an exactly symmetric matrix.
Spectrum eigenvalues_sym(const Eigen::MatrixXd& matrix);
// Eigenvalues of Y Y^T as squared singular values of Y (M <= N).
Spectrum gram_spectrum(const Eigen::MatrixXd& Y);

double semicircle_density(double x);
// Branch with s^2 + z s + 1 = 0 and |s| < 1, for |z| > 2.
double semicircle_stieltjes(double z);
// Integral of f against the semicircle law on [-2, 2].
double semicircle_integral(const std::function<double(double)>& f);

class MpLaw {
public:
    explicit MpLaw(double d0);

    double d0() const noexcept { return d0_; }
    double d_minus() const noexcept { return dm_; }
    double d_plus() const noexcept { return dp_; }
    double density(double x) const;

private:
    double d0_;
    double dm_;
    double dp_;
};

// s(z) with z s(z) -> -1 at infinity; z outside [d_-, d_+] and z != 0.
double mp_stieltjes(double z, const MpLaw& law);
// Companion transform d0 s(z) + (d0 - 1)/z.
double mp_companion_stieltjes(double z, const MpLaw& law);
double mp_integral(const std::function<double(double)>& f, const MpLaw& law);

struct BbpPrediction {
    double outlier_location = 0.0;
    double overlap = 0.0;
    bool supercritical = false;
};

// The threshold value itself is classified subcritical.
BbpPrediction bbp_wigner(double lambda_eff);
BbpPrediction bbp_rect(double lambda_eff, const MpLaw& law);

// Eigenvalues strictly above edge + tol.
std::size_t count_outliers(const Spectrum& spectrum, double edge, double tol = 0.05);

}  // namespace spiked

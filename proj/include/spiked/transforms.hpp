#pragma once

#include <Eigen/Dense>

#include "spiked/models.hpp"
#include "spiked/noise.hpp"

namespace spiked {

enum class RectKind { additive, multiplicative };

// Entrywise score transform of a Wigner matrix; output is symmetric.
Eigen::MatrixXd transform_wigner(const Eigen::MatrixXd& M, const NoiseModel& noise);
Eigen::MatrixXd transform_wigner(const DataMatrix& data, const NoiseModel& noise);

// Entrywise h_alpha transform of a rectangular matrix, normalized to entry
// variance 1/N under the null.
Eigen::MatrixXd transform_rect(const Eigen::MatrixXd& Y, const NoiseModel& noise, double alpha);
Eigen::MatrixXd transform_rect(const DataMatrix& data, const NoiseModel& noise, double alpha);

double optimal_alpha(double gamma, double F_g);
double lambda_g(double gamma, double F_g);

// Effective SNR after transforming with h_alpha. snr is lambda for the
// additive model and gamma for the multiplicative one.
double effective_snr(RectKind kind, double snr, double F_g, double alpha);
double effective_snr(RectKind kind, double snr, const NoiseModel& noise, double alpha);
// Same quantity from (M_q, V_q, E_q).
double effective_snr_from_functionals(RectKind kind, double snr, const TransformFunctionals& t);

struct TransformOptimum {
    double gamma = 0.0;
    double F_g = 1.0;
    double alpha_g = 0.0;
    double lambda_g = 0.0;

    double lambda_eff_at(double alpha) const {
        return effective_snr(RectKind::multiplicative, gamma, F_g, alpha);
    }
};

TransformOptimum transform_optimum(double gamma, double F_g);

}  // namespace spiked

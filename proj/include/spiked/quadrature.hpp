#pragma once

#include <functional>

namespace spiked {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    double l1 = 0.0;     // integral of |f|
};

// Adaptive 61-point Gauss-Kronrod on [a, b]. Throws QuadratureError when the
// error estimate exceeds rel_tol * L1 after refinement.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-10);

}  // namespace spiked

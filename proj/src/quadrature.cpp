#include "spiked/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

#include "spiked/error.hpp"

namespace spiked {

SupercriticalError::SupercriticalError(double eigenvalue, double pole, std::size_t index)
    : DomainError([&] {
          std::ostringstream os;
          os.precision(10);
          os << "supercritical spectrum: eigenvalue " << eigenvalue << " (index " << index
             << ") is at or beyond the statistic pole " << pole;
          return os.str();
      }()),
      eigenvalue_(eigenvalue),
      pole_(pole),
      index_(index) {}

QuadratureError::QuadratureError(const std::string& what, double achieved_rel_error)
    : DomainError(what), achieved_(achieved_rel_error) {}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol) {
    using boost::math::quadrature::gauss_kronrod;
    QuadResult r;
    r.value = gauss_kronrod<double, 61>::integrate(f, a, b, 25, rel_tol, &r.error, &r.l1);
    if (!std::isfinite(r.value)) {
        throw QuadratureError("quadrature produced a non-finite value", INFINITY);
    }
    // Floor so integrands that vanish identically are accepted.
    const double allowed = rel_tol * r.l1 + 1e-300;
    if (r.error > allowed) {
        const double achieved = r.l1 > 0 ? r.error / r.l1 : r.error;
        std::ostringstream os;
        os << "quadrature did not converge on [" << a << ", " << b
           << "]: achieved relative error " << achieved << ", requested " << rel_tol;
        throw QuadratureError(os.str(), achieved);
    }
    return r;
}

}  // namespace spiked

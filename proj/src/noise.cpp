#include "spiked/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spiked/error.hpp"
#include "spiked/quadrature.hpp"

namespace spiked {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadTol = 1e-10;

double sech2(double t) {
    const double c = std::cosh(t);
    return std::isfinite(c) ? 1.0 / (c * c) : 0.0;
}

std::string format_param(double a) {
    std::ostringstream os;
    os.precision(9);
    os << a;
    return os.str();
}

double integrate_density(const Density& d, const std::function<double(double)>& f) {
    const double T = d.truncation();
    return integrate(f, -T, T, kQuadTol).value;
}

}  // namespace

struct Density::InverseCdf {
    std::vector<double> x;
    std::vector<double> cdf;

    double operator()(double u) const {
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.begin()) return x.front();
        if (it == cdf.end()) return x.back();
        const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
        const double c0 = cdf[i - 1], c1 = cdf[i];
        const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
        return x[i - 1] + t * (x[i] - x[i - 1]);
    }
};

Density Density::gaussian() {
    Density d;
    d.kind_ = NoiseKind::gaussian;
    d.label_ = "gaussian";
    d.finish();
    return d;
}

Density Density::bimodal(double a) {
    if (!(a > 0.0 && a < 1.0)) {
        throw ValidationError("bimodal amplitude a must lie in (0,1), got " + format_param(a));
    }
    Density d;
    d.kind_ = NoiseKind::bimodal;
    d.a_ = a;
    d.s2_ = 1.0 - a * a;
    d.label_ = "bimodal(" + format_param(a) + ")";
    d.finish();
    return d;
}

Density Density::sech() {
    Density d;
    d.kind_ = NoiseKind::sech;
    d.label_ = "sech";
    d.finish();
    return d;
}

Density Density::custom(std::string name, DensityEvaluators ev) {
    if (!ev.g || !ev.dg || !ev.d2g) {
        throw ValidationError("custom noise '" + name + "' must supply g, g' and g''");
    }
    Density d;
    d.kind_ = NoiseKind::custom;
    d.label_ = name.empty() ? "custom" : std::move(name);
    d.ev_ = std::make_shared<const DensityEvaluators>(std::move(ev));
    d.finish();

    const double T = d.T_;
    for (int i = 0; i <= 64; ++i) {
        const double x = T * i / 64.0;
        const double gp = d.pdf(x), gm = d.pdf(-x);
        if (!(gp > 0.0) || !(gm > 0.0)) {
            throw ValidationError("custom noise '" + d.label_ + "' is not positive at x=" +
                                  format_param(x));
        }
        if (std::abs(gp - gm) > 1e-12 * gp) {
            throw ValidationError("custom noise '" + d.label_ + "' is not symmetric at x=" +
                                  format_param(x));
        }
    }
    const double mass = integrate_density(d, [&](double x) { return d.pdf(x); });
    const double var = integrate_density(d, [&](double x) { return x * x * d.pdf(x); });
    if (std::abs(mass - 1.0) > 1e-6 || std::abs(var - 1.0) > 1e-6) {
        throw ValidationError("custom noise '" + d.label_ + "' must have unit mass and variance"
                              " (got mass " + format_param(mass) + ", variance " +
                              format_param(var) + ")");
    }

    // Tabulated inverse CDF for sampling, cumulative Simpson on a fine grid.
    constexpr std::size_t cells = 1 << 14;
    auto inv = std::make_shared<InverseCdf>();
    inv->x.resize(cells + 1);
    inv->cdf.resize(cells + 1);
    const double h = 2.0 * T / cells;
    double acc = 0.0;
    for (std::size_t i = 0; i <= cells; ++i) {
        const double x = -T + h * static_cast<double>(i);
        if (i > 0) {
            const double x0 = x - h;
            acc += h / 6.0 * (d.pdf(x0) + 4.0 * d.pdf(x0 + 0.5 * h) + d.pdf(x));
        }
        inv->x[i] = x;
        inv->cdf[i] = acc;
    }
    for (double& c : inv->cdf) c /= acc;
    d.inv_ = std::move(inv);
    return d;
}

void Density::finish() {
    const double g0 = pdf(0.0);
    double T = 1.0;
    while (pdf(T) >= 1e-16 * g0) {
        T += 0.5;
        if (T > 1e3) {
            throw ValidationError("density '" + label_ + "' has tails too heavy to truncate");
        }
    }
    T_ = T;
}

double Density::pdf(double x) const {
    switch (kind_) {
        case NoiseKind::gaussian:
            return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
        case NoiseKind::bimodal: {
            const double s = std::sqrt(s2_);
            const double e1 = std::exp(-0.5 * (x - a_) * (x - a_) / s2_);
            const double e2 = std::exp(-0.5 * (x + a_) * (x + a_) / s2_);
            return (e1 + e2) / (2.0 * s * std::sqrt(2.0 * kPi));
        }
        case NoiseKind::sech: {
            // 1/(2 cosh(pi x/2)) without overflow in the tails.
            const double e = std::exp(-0.5 * kPi * std::abs(x));
            return e / (1.0 + e * e);
        }
        case NoiseKind::custom:
            return ev_->g(x);
    }
    return 0.0;
}

double Density::dpdf(double x) const {
    if (kind_ == NoiseKind::custom) return ev_->dg(x);
    return -score(x) * pdf(x);
}

double Density::d2pdf(double x) const {
    if (kind_ == NoiseKind::custom) return ev_->d2g(x);
    const double h = score(x);
    return (h * h - score_derivative(x)) * pdf(x);
}

double Density::score(double x) const {
    switch (kind_) {
        case NoiseKind::gaussian:
            return x;
        case NoiseKind::bimodal:
            return (x - a_ * std::tanh(a_ * x / s2_)) / s2_;
        case NoiseKind::sech:
            return 0.5 * kPi * std::tanh(0.5 * kPi * x);
        case NoiseKind::custom:
            return -ev_->dg(x) / ev_->g(x);
    }
    return 0.0;
}

double Density::score_derivative(double x) const {
    switch (kind_) {
        case NoiseKind::gaussian:
            return 1.0;
        case NoiseKind::bimodal:
            return (1.0 - a_ * a_ / s2_ * sech2(a_ * x / s2_)) / s2_;
        case NoiseKind::sech:
            return 0.25 * kPi * kPi * sech2(0.5 * kPi * x);
        case NoiseKind::custom: {
            const double g = ev_->g(x);
            const double h = -ev_->dg(x) / g;
            return h * h - ev_->d2g(x) / g;
        }
    }
    return 0.0;
}

void Density::fill(std::span<double> out, Rng& rng) const {
    switch (kind_) {
        case NoiseKind::gaussian: {
            std::normal_distribution<double> normal;
            for (double& v : out) v = normal(rng);
            return;
        }
        case NoiseKind::bimodal: {
            std::normal_distribution<double> normal;
            std::bernoulli_distribution coin(0.5);
            const double s = std::sqrt(s2_);
            for (double& v : out) {
                const double r = coin(rng) ? a_ : -a_;
                v = r + s * normal(rng);
            }
            return;
        }
        case NoiseKind::sech: {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (double& v : out) {
                double u = unif(rng);
                while (u <= 0.0) u = unif(rng);
                v = (2.0 / kPi) * std::log(std::tan(0.5 * kPi * u));
            }
            return;
        }
        case NoiseKind::custom: {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (double& v : out) v = (*inv_)(unif(rng));
            return;
        }
    }
}

std::vector<double> Density::draw(Rng& rng, std::size_t n) const {
    std::vector<double> out(n);
    fill(out, rng);
    return out;
}

double fisher(const Density& d) {
    return integrate_density(d, [&](double x) {
        const double h = d.score(x);
        return h * h * d.pdf(x);
    });
}

namespace {

NoiseFunctionals compute_functionals(const Density& off, const Density& diag) {
    NoiseFunctionals f;
    f.F_g = fisher(off);
    f.F_gd = fisher(diag);
    // g'^2 g''/g^2 = h^2 (h^2 - h') g
    const double gh = integrate_density(off, [&](double x) {
        const double h = off.score(x);
        return h * h * (h * h - off.score_derivative(x)) * off.pdf(x);
    });
    f.G_H = gh / (2.0 * f.F_g);
    const double h4 = integrate_density(off, [&](double x) {
        const double h = off.score(x);
        return h * h * h * h * off.pdf(x);
    });
    f.w4_tilde = h4 / (f.F_g * f.F_g);
    return f;
}

NoiseMoments compute_moments(const Density& off, double w2) {
    NoiseMoments m;
    m.w2 = w2;
    m.w3 = integrate_density(off, [&](double x) { return x * x * x * off.pdf(x); });
    m.w4 = integrate_density(off, [&](double x) { return x * x * x * x * off.pdf(x); });
    return m;
}

}  // namespace

NoiseModel::NoiseModel(Density off, double w2) : NoiseModel(off, off, w2) {}

NoiseModel::NoiseModel(Density off, Density diag, double w2)
    : off_(std::move(off)), diag_(std::move(diag)), w2_(w2) {
    if (!(w2 > 0.0) || !std::isfinite(w2)) {
        throw ValidationError("w2 must be positive and finite, got " + format_param(w2));
    }
    fun_ = compute_functionals(off_, diag_);
    mom_ = compute_moments(off_, w2_);
}

NoiseModel NoiseModel::gaussian(double w2) { return NoiseModel(Density::gaussian(), w2); }
NoiseModel NoiseModel::bimodal(double a, double w2) { return NoiseModel(Density::bimodal(a), w2); }
NoiseModel NoiseModel::sech(double w2) { return NoiseModel(Density::sech(), w2); }

std::string NoiseModel::label() const {
    if (diag_.label() == off_.label()) return off_.label();
    return off_.label() + "|" + diag_.label();
}

double density(const NoiseModel& model, double x) { return model.offdiag().pdf(x); }

double score(const NoiseModel& model, double x, bool diagonal) {
    return diagonal ? model.diag().score(x) : model.offdiag().score(x);
}

double fisher(const NoiseModel& model, bool diagonal) {
    return fisher(diagonal ? model.diag() : model.offdiag());
}

double gh_functional(const NoiseModel& model) {
    return compute_functionals(model.offdiag(), model.offdiag()).G_H;
}

double transformed_fourth_moment(const NoiseModel& model) {
    return compute_functionals(model.offdiag(), model.offdiag()).w4_tilde;
}

TransformFunctionals transform_functionals_quadrature(const NoiseModel& model, double alpha) {
    const Density& d = model.offdiag();
    TransformFunctionals t;
    t.alpha = alpha;
    t.M_q = integrate_density(d, [&](double x) {
        return (d.score_derivative(x) + alpha) * d.pdf(x);
    });
    t.V_q = integrate_density(d, [&](double x) {
        const double q = d.score(x) + alpha * x;
        return q * q * d.pdf(x);
    });
    t.E_q = integrate_density(d, [&](double x) {
        return x * (d.score(x) + alpha * x) * d.pdf(x);
    });
    return t;
}

TransformFunctionals transform_functionals(const NoiseModel& model, double alpha) {
    const double F = model.functionals().F_g;
    TransformFunctionals closed;
    closed.alpha = alpha;
    closed.M_q = F + alpha;
    closed.V_q = F + 2.0 * alpha + alpha * alpha;
    closed.E_q = 1.0 + alpha;

    const TransformFunctionals quad = transform_functionals_quadrature(model, alpha);
    auto check = [&](const char* name, double c, double q) {
        if (std::abs(c - q) > 1e-6 * std::max(1.0, std::abs(c))) {
            std::ostringstream os;
            os.precision(12);
            os << "transform functional " << name << " closed form " << c
               << " disagrees with quadrature " << q << " at alpha=" << alpha;
            throw ConsistencyError(os.str());
        }
    };
    check("M_q", closed.M_q, quad.M_q);
    check("V_q", closed.V_q, quad.V_q);
    check("E_q", closed.E_q, quad.E_q);
    return closed;
}

NoiseMoments moments(const NoiseModel& model) {
    return compute_moments(model.offdiag(), model.w2());
}

std::vector<double> sample(const NoiseModel& model, Rng& rng, std::size_t n, bool diagonal) {
    return (diagonal ? model.diag() : model.offdiag()).draw(rng, n);
}

}  // namespace spiked

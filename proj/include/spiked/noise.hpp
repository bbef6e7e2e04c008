#pragma once

#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace spiked {

using Rng = std::mt19937_64;

enum class NoiseKind { gaussian, bimodal, sech, custom };

// Closed-form evaluators for a user supplied density and its first two
// derivatives. Tabulated densities are not accepted.
struct DensityEvaluators {
    std::function<double(double)> g;
    std::function<double(double)> dg;
    std::function<double(double)> d2g;
};

// A symmetric, unit-variance, everywhere-positive density on the real line.
class Density {
public:
    static Density gaussian();
    static Density bimodal(double a);
    static Density sech();
    static Density custom(std::string name, DensityEvaluators ev);

    NoiseKind kind() const noexcept { return kind_; }
    double a() const noexcept { return a_; }
    const std::string& label() const noexcept { return label_; }

    double pdf(double x) const;
    double dpdf(double x) const;
    double d2pdf(double x) const;
    // h = -g'/g and its derivative.
    double score(double x) const;
    double score_derivative(double x) const;

    // Half-width T of the quadrature domain, g(T) < 1e-16 g(0).
    double truncation() const noexcept { return T_; }

    void fill(std::span<double> out, Rng& rng) const;
    std::vector<double> draw(Rng& rng, std::size_t n) const;

private:
    struct InverseCdf;

    Density() = default;
    void finish();

    NoiseKind kind_ = NoiseKind::gaussian;
    double a_ = 0.0;
    double s2_ = 1.0;
    std::string label_;
    std::shared_ptr<const DensityEvaluators> ev_;
    std::shared_ptr<const InverseCdf> inv_;
    double T_ = 0.0;
};

struct NoiseFunctionals {
    double F_g = 1.0;
    double F_gd = 1.0;
    double G_H = 1.0;
    double w4_tilde = 3.0;
};

struct NoiseMoments {
    double w2 = 1.0;
    double w3 = 0.0;
    double w4 = 3.0;
};

// Moments of q = h + alpha x under g.
struct TransformFunctionals {
    double alpha = 0.0;
    double M_q = 1.0;  // E[q']
    double V_q = 1.0;  // E[q^2]
    double E_q = 1.0;  // E[x q]
};

// Off-diagonal density, diagonal density (defaults to the same) and the
// diagonal second moment scale w2. All functionals are computed once at
// construction; instances are immutable afterwards.
class NoiseModel {
public:
    explicit NoiseModel(Density off, double w2 = 1.0);
    NoiseModel(Density off, Density diag, double w2);

    static NoiseModel gaussian(double w2 = 1.0);
    static NoiseModel bimodal(double a, double w2 = 1.0);
    static NoiseModel sech(double w2 = 1.0);

    NoiseKind kind() const noexcept { return off_.kind(); }
    const Density& offdiag() const noexcept { return off_; }
    const Density& diag() const noexcept { return diag_; }
    double w2() const noexcept { return w2_; }
    const NoiseFunctionals& functionals() const noexcept { return fun_; }
    const NoiseMoments& moment_values() const noexcept { return mom_; }
    std::string label() const;

private:
    Density off_;
    Density diag_;
    double w2_;
    NoiseFunctionals fun_;
    NoiseMoments mom_;
};

double density(const NoiseModel& model, double x);
double score(const NoiseModel& model, double x, bool diagonal = false);

// Fisher information of g (or g_d), by quadrature.
double fisher(const NoiseModel& model, bool diagonal = false);
double fisher(const Density& d);
double gh_functional(const NoiseModel& model);
double transformed_fourth_moment(const NoiseModel& model);

// Closed forms checked against quadrature; ConsistencyError beyond 1e-6.
TransformFunctionals transform_functionals(const NoiseModel& model, double alpha);
TransformFunctionals transform_functionals_quadrature(const NoiseModel& model, double alpha);

NoiseMoments moments(const NoiseModel& model);

std::vector<double> sample(const NoiseModel& model, Rng& rng, std::size_t n,
                           bool diagonal = false);

}  // namespace spiked

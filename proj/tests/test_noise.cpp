#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spiked/error.hpp"
#include "spiked/noise.hpp"
#include "spiked/quadrature.hpp"

using namespace spiked;
using std::numbers::pi;

namespace {

const double kA1 = std::sqrt(3.0) / 2.0;
const double kA2 = std::sqrt(21.0) / 5.0;

// Reference values from tests/oracles/oracle_values.py (mpmath, 40 digits).
constexpr double kBimodal1F = 2.5081851713543041;
constexpr double kBimodal1GH = 3.3004536377635885;
constexpr double kBimodal1W4t = 3.9476195882078707;
constexpr double kBimodal2F = 5.1558318531521982;
constexpr double kBimodal2GH = 4.8390289041494887;
constexpr double kBimodal2W4t = 2.8156633354078328;

std::vector<NoiseModel> builtins() {
    return {NoiseModel::gaussian(), NoiseModel::sech(), NoiseModel::bimodal(kA1), NoiseModel::bimodal(kA2)};
}

}  // namespace

TEST(Density, Values) {
    EXPECT_NEAR(density(NoiseModel::gaussian(), 0.0), 1.0 / std::sqrt(2.0 * pi), 1e-15);
    EXPECT_NEAR(density(NoiseModel::sech(), 0.0), 0.5, 1e-15);
    const NoiseModel b = NoiseModel::bimodal(kA1);
    for (double x : {0.3, 1.7}) EXPECT_DOUBLE_EQ(density(b, x), density(b, -x));
}

TEST(Density, BimodalMixture) {
    const double a = 0.6, s2 = 1.0 - a * a;
    const auto nd = [&](double x, double mu) {
        return std::exp(-(x - mu) * (x - mu) / (2.0 * s2)) / std::sqrt(2.0 * pi * s2);
    };
    const NoiseModel b = NoiseModel::bimodal(a);
    for (double x : {-2.0, -0.4, 0.0, 0.9, 3.1}) EXPECT_NEAR(density(b, x), 0.5 * (nd(x, a) + nd(x, -a)), 1e-14);
}

TEST(Density, SechTailStable) {
    const Density s = Density::sech();
    EXPECT_GT(s.pdf(400.0), 0.0);
    EXPECT_TRUE(std::isfinite(s.score(800.0)));
    EXPECT_NEAR(s.score(800.0), pi / 2.0, 1e-12);
}

TEST(Density, NormalizationAndVariance) {
    for (const auto& m : builtins()) {
        const Density& d = m.offdiag();
        const double T = d.truncation();
        const double mass = integrate([&](double x) { return d.pdf(x); }, -T, T).value;
        const double var = integrate([&](double x) { return x * x * d.pdf(x); }, -T, T).value;
        EXPECT_NEAR(mass, 1.0, 1e-9) << m.label();
        EXPECT_NEAR(var, 1.0, 1e-9) << m.label();
    }
}

TEST(Density, DerivativesMatchFiniteDifferences) {
    for (const auto& m : builtins()) {
        const Density& d = m.offdiag();
        for (double x : {-1.3, 0.2, 0.9, 2.4}) {
            const double h = 1e-5;
            EXPECT_NEAR(d.dpdf(x), (d.pdf(x + h) - d.pdf(x - h)) / (2 * h), 1e-8) << m.label();
            EXPECT_NEAR(d.d2pdf(x), (d.dpdf(x + h) - d.dpdf(x - h)) / (2 * h), 1e-7) << m.label();
        }
    }
}

TEST(Score, Examples) {
    EXPECT_NEAR(score(NoiseModel::gaussian(), 0.7), 0.7, 1e-15);
    EXPECT_NEAR(score(NoiseModel::sech(), 1.0), (pi / 2.0) * std::tanh(pi / 2.0), 1e-14);
    EXPECT_NEAR(score(NoiseModel::sech(), 1.0), 1.4403, 5e-4);  // four-digit rounding
    for (const auto& m : builtins()) EXPECT_EQ(score(m, 0.0), 0.0) << m.label();
}

TEST(Score, Odd) {
    for (const auto& m : builtins())
        for (double x = -6.0; x <= 6.0; x += 0.25) EXPECT_NEAR(score(m, x), -score(m, -x), 1e-12);
}

TEST(Score, BimodalClosedForm) {
    const double a = kA1, s2 = 1.0 - a * a;
    const NoiseModel b = NoiseModel::bimodal(a);
    for (double x : {-2.0, 0.3, 1.1}) EXPECT_NEAR(score(b, x), (x - a * std::tanh(a * x / s2)) / s2, 1e-12);
}

TEST(Fisher, ReferenceConstants) {
    EXPECT_NEAR(fisher(NoiseModel::gaussian()), 1.0, 1e-10);
    EXPECT_NEAR(fisher(NoiseModel::sech()), pi * pi / 8.0, 1e-8);
    EXPECT_NEAR(fisher(NoiseModel::bimodal(kA1)), 2.50810, 5e-4);
    EXPECT_NEAR(fisher(NoiseModel::bimodal(kA2)), 5.15583, 5e-4);
}

TEST(Fisher, OracleValues) {
    EXPECT_NEAR(fisher(NoiseModel::bimodal(kA1)), kBimodal1F, 1e-9);
    EXPECT_NEAR(fisher(NoiseModel::bimodal(kA2)), kBimodal2F, 1e-9);
}

TEST(Fisher, StrictlyAboveOneForNonGaussian) {
    for (const auto& m : builtins()) {
        if (m.kind() == NoiseKind::gaussian) continue;
        EXPECT_GT(m.functionals().F_g, 1.0 + 1e-6) << m.label();
    }
}

TEST(Fisher, DiagonalDensity) {
    const NoiseModel m(Density::sech(), Density::gaussian(), 2.0);
    EXPECT_NEAR(m.functionals().F_g, pi * pi / 8.0, 1e-8);
    EXPECT_NEAR(m.functionals().F_gd, 1.0, 1e-10);
    EXPECT_NEAR(fisher(m, true), 1.0, 1e-10);
    EXPECT_NEAR(score(m, 0.7, true), 0.7, 1e-15);
}

TEST(GhFunctional, Values) {
    EXPECT_NEAR(gh_functional(NoiseModel::sech()), pi * pi / 16.0, 1e-8);
    EXPECT_NEAR(gh_functional(NoiseModel::gaussian()), 1.0, 1e-8);
    EXPECT_NEAR(gh_functional(NoiseModel::bimodal(kA1)), kBimodal1GH, 1e-8);
    EXPECT_NEAR(gh_functional(NoiseModel::bimodal(kA2)), kBimodal2GH, 1e-8);
}

TEST(TransformedFourthMoment, Values) {
    EXPECT_NEAR(transformed_fourth_moment(NoiseModel::sech()), 1.5, 1e-8);
    EXPECT_NEAR(transformed_fourth_moment(NoiseModel::gaussian()), 3.0, 1e-8);
    EXPECT_NEAR(transformed_fourth_moment(NoiseModel::bimodal(kA1)), kBimodal1W4t, 1e-8);
    EXPECT_NEAR(transformed_fourth_moment(NoiseModel::bimodal(kA2)), kBimodal2W4t, 1e-8);
}

TEST(TransformFunctionals, Examples) {
    auto g = transform_functionals(NoiseModel::gaussian(), 0.0);
    EXPECT_NEAR(g.M_q, 1.0, 1e-12);
    EXPECT_NEAR(g.V_q, 1.0, 1e-12);
    EXPECT_NEAR(g.E_q, 1.0, 1e-12);
    const double F = pi * pi / 8.0;
    auto s0 = transform_functionals(NoiseModel::sech(), 0.0);
    EXPECT_NEAR(s0.M_q, F, 1e-8);
    EXPECT_NEAR(s0.V_q, F, 1e-8);
    EXPECT_NEAR(s0.E_q, 1.0, 1e-8);
    auto q1 = transform_functionals_quadrature(NoiseModel::sech(), 1.0);
    EXPECT_NEAR(q1.M_q, F + 1.0, 1e-8);
    EXPECT_NEAR(q1.V_q, F + 3.0, 1e-8);
    EXPECT_NEAR(q1.E_q, 2.0, 1e-8);
}

TEST(TransformFunctionals, ClosedFormMatchesQuadrature) {
    for (const auto& m : builtins()) {
        const double F = m.functionals().F_g;
        for (double alpha : {-1.0, 0.0, 0.5, std::sqrt(F), 2.0}) {
            const auto c = transform_functionals(m, alpha);
            const auto q = transform_functionals_quadrature(m, alpha);
            EXPECT_NEAR(c.M_q, q.M_q, 1e-6) << m.label() << " alpha " << alpha;
            EXPECT_NEAR(c.V_q, q.V_q, 1e-6) << m.label() << " alpha " << alpha;
            EXPECT_NEAR(c.E_q, q.E_q, 1e-6) << m.label() << " alpha " << alpha;
        }
    }
}

TEST(Moments, Values) {
    const auto s = moments(NoiseModel::sech());
    EXPECT_EQ(s.w2, 1.0);
    EXPECT_NEAR(s.w3, 0.0, 1e-10);
    EXPECT_NEAR(s.w4, 5.0, 1e-8);
    const auto g = moments(NoiseModel::gaussian(2.0));
    EXPECT_EQ(g.w2, 2.0);
    EXPECT_NEAR(g.w4, 3.0, 1e-8);
    for (double a : {0.3, kA1, kA2}) {
        const auto b = moments(NoiseModel::bimodal(a));
        EXPECT_NEAR(b.w4, 3.0 - 2.0 * std::pow(a, 4), 1e-8);
        EXPECT_NEAR(b.w3, 0.0, 1e-10);
    }
}

TEST(NoiseModel, Validation) {
    EXPECT_THROW(NoiseModel::bimodal(0.0), ValidationError);
    EXPECT_THROW(NoiseModel::bimodal(1.0), ValidationError);
    EXPECT_THROW(NoiseModel::gaussian(0.0), ValidationError);
    EXPECT_THROW(NoiseModel::gaussian(-1.0), ValidationError);
}

TEST(NoiseModel, CustomDensity) {
    // Logistic density rescaled to unit variance.
    const double s = std::sqrt(3.0) / pi;
    DensityEvaluators ev;
    ev.g = [s](double x) {
        const double e = std::exp(-std::abs(x) / s);
        return e / (s * (1 + e) * (1 + e));
    };
    ev.dg = [ev, s](double x) { return -ev.g(x) * std::tanh(x / (2 * s)) / s; };
    ev.d2g = [ev, s](double x) {
        const double t = std::tanh(x / (2 * s));
        return ev.g(x) * (t * t / (s * s) - (1 - t * t) / (2 * s * s));
    };
    const NoiseModel m(Density::custom("logistic", ev));
    // Fisher information of the standard logistic is 1/3, scaled by 1/s^2.
    EXPECT_NEAR(m.functionals().F_g, 1.0 / (3.0 * s * s), 1e-8);
    Rng rng(3);
    const auto x = m.offdiag().draw(rng, 200000);
    double v = 0;
    for (double y : x) v += y * y;
    EXPECT_NEAR(v / x.size(), 1.0, 0.02);
}

TEST(NoiseModel, CustomRejectsBadDensity) {
    DensityEvaluators ev;
    ev.g = [](double x) { return std::exp(-x * x / 8.0) / std::sqrt(8.0 * pi); };  // variance 4
    ev.dg = [ev](double x) { return -x / 4.0 * ev.g(x); };
    ev.d2g = [ev](double x) { return (x * x / 16.0 - 0.25) * ev.g(x); };
    EXPECT_THROW(Density::custom("wide", ev), ValidationError);
}

TEST(Sample, SechMoments) {
    Rng rng(11);
    const auto x = sample(NoiseModel::sech(), rng, 1000000);
    double mean = 0, var = 0;
    for (double y : x) mean += y;
    mean /= x.size();
    for (double y : x) var += (y - mean) * (y - mean);
    var /= x.size() - 1;
    EXPECT_NEAR(mean, 0.0, 0.005);
    EXPECT_NEAR(var, 1.0, 0.01);
}

TEST(Sample, BimodalVariance) {
    Rng rng(12);
    const auto x = sample(NoiseModel::bimodal(kA1), rng, 1000000);
    double var = 0;
    for (double y : x) var += y * y;
    EXPECT_NEAR(var / x.size(), 1.0, 0.01);
}

TEST(Sample, SechKolmogorovSmirnov) {
    Rng rng(13);
    auto x = sample(NoiseModel::sech(), rng, 100000);
    std::sort(x.begin(), x.end());
    double ks = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = (2.0 / pi) * std::atan(std::exp(pi * x[i] / 2.0));
        ks = std::max({ks, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
    }
    EXPECT_LT(ks, 0.01);
}

TEST(Sample, SechCdfMatchesDensityIntegral) {
    // Numeric-integration oracle for the closed-form CDF used above.
    const Density d = Density::sech();
    for (double x : {-2.0, 0.0, 0.7, 3.0}) {
        const double num = integrate([&](double t) { return d.pdf(t); }, -d.truncation(), x).value;
        EXPECT_NEAR(num, (2.0 / pi) * std::atan(std::exp(pi * x / 2.0)), 1e-10);
    }
}

TEST(Sample, Deterministic) {
    Rng a(5), b(5);
    EXPECT_EQ(sample(NoiseModel::bimodal(0.5), a, 1000), sample(NoiseModel::bimodal(0.5), b, 1000));
}

#include <gtest/gtest.h>

#include <cmath>

#include "spiked/error.hpp"
#include "spiked/models.hpp"
#include "spiked/spectral.hpp"

using namespace spiked;

TEST(SnrSpec, GammasSolveQuadratic) {
    const SnrSpec s({2.0, 1.0, 0.25});
    const auto g = s.gammas();
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(2 * g[i] + g[i] * g[i], s.lambdas()[i], 1e-12);
}

TEST(SnrSpec, Validation) {
    EXPECT_THROW(SnrSpec({0.5, 1.0}), ValidationError);
    EXPECT_THROW(SnrSpec({1.0, 0.0}), ValidationError);
    EXPECT_THROW(SnrSpec({-1.0}), ValidationError);
    EXPECT_NO_THROW(SnrSpec({1.0, 1.0}));
    EXPECT_EQ(SnrSpec().rank(), 0u);
}

TEST(ModelSpec, Validation) {
    EXPECT_THROW(ModelSpec::rect(ModelKind::rect_additive, 300, 200, NoiseModel::gaussian(), SnrSpec()).validate(),
                 ValidationError);
    ModelSpec w = ModelSpec::wigner(100, NoiseModel::gaussian(), SnrSpec());
    w.M = 50;
    EXPECT_THROW(w.validate(), ValidationError);
    EXPECT_THROW(ModelSpec::wigner(4, NoiseModel::gaussian(), SnrSpec({1, 1, 1, 1, 1})).validate(), ValidationError);
}

TEST(ModelKind, Parsing) {
    EXPECT_EQ(parse_model_kind("wigner"), ModelKind::wigner);
    EXPECT_EQ(parse_model_kind("additive"), ModelKind::rect_additive);
    EXPECT_EQ(parse_model_kind("rect_multiplicative"), ModelKind::rect_multiplicative);
    EXPECT_THROW(parse_model_kind("hermitian"), ValidationError);
    EXPECT_EQ(parse_prior_kind("spherical"), PriorKind::spherical);
}

TEST(SampleSpike, SphericalOrthonormal) {
    Rng rng(1);
    const Eigen::MatrixXd U = sample_spike(PriorKind::spherical, 8, 3, rng);
    EXPECT_LT((U.transpose() * U - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);
}

TEST(SampleSpike, RademacherEntries) {
    Rng rng(2);
    const Eigen::MatrixXd U = sample_spike(PriorKind::rademacher_iid, 256, 1, rng);
    for (Eigen::Index i = 0; i < U.rows(); ++i) EXPECT_EQ(std::abs(U(i, 0)), 1.0 / 16.0);
}

TEST(SampleSpike, RademacherNearOrthonormal) {
    int good = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const Eigen::MatrixXd U = sample_spike(PriorKind::rademacher_iid, 4096, 2, rng);
        good += (U.transpose() * U - Eigen::MatrixXd::Identity(2, 2)).norm() < 0.1;
    }
    EXPECT_GE(good, 99);
}

TEST(SampleSpike, TooManyColumns) {
    Rng rng(1);
    EXPECT_THROW(sample_spike(PriorKind::spherical, 3, 4, rng), ValidationError);
}

TEST(Wigner, Symmetric) {
    const DataMatrix d = synthesize(ModelSpec::wigner(64, NoiseModel::sech(), SnrSpec({0.5})), 7);
    EXPECT_TRUE(d.values == d.values.transpose());
    EXPECT_EQ(d.seed, 7u);
}

TEST(Wigner, OffDiagonalMeanZero) {
    const std::size_t N = 200;
    double total = 0.0;
    for (int seed = 0; seed < 50; ++seed) {
        const DataMatrix d = synthesize(ModelSpec::wigner(N, NoiseModel::gaussian(), SnrSpec()), seed);
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j) s += d.values(i, j);
        total += s / (N * (N - 1) / 2.0);
    }
    EXPECT_NEAR(total / 50.0, 0.0, 3.0 / N);
}

TEST(Wigner, DiagonalScale) {
    const std::size_t N = 400;
    const DataMatrix d = synthesize(ModelSpec::wigner(N, NoiseModel::gaussian(2.0), SnrSpec()), 3);
    const double v = d.values.diagonal().squaredNorm() / N;
    EXPECT_NEAR(v * N, 2.0, 0.4);
}

TEST(Wigner, NullEdge) {
    const DataMatrix d = synthesize(ModelSpec::wigner(512, NoiseModel::gaussian(2.0), SnrSpec()), 4);
    EXPECT_NEAR(eigenvalues_sym(d.values).max(), 2.0, 0.15);
}

TEST(Wigner, SupercriticalOutlier) {
    const DataMatrix d = synthesize(ModelSpec::wigner(512, NoiseModel::gaussian(), SnrSpec({4.0})), 5);
    EXPECT_NEAR(eigenvalues_sym(d.values).max(), 2.5, 0.15);
}

TEST(Additive, NullSupport) {
    const DataMatrix d =
        synthesize(ModelSpec::rect(ModelKind::rect_additive, 256, 256, NoiseModel::gaussian(), SnrSpec()), 6);
    const Spectrum s = gram_spectrum(d.values);
    const MpLaw law(1.0);
    for (double e : s.eigenvalues) {
        EXPECT_GE(e, law.d_minus() - 0.3);
        EXPECT_LE(e, law.d_plus() + 0.3);
    }
}

TEST(Additive, Outlier) {
    const DataMatrix d =
        synthesize(ModelSpec::rect(ModelKind::rect_additive, 512, 1024, NoiseModel::gaussian(), SnrSpec({1.0})), 7);
    EXPECT_NEAR(gram_spectrum(d.values).max(), 3.0, 0.2);
}

TEST(Additive, SpikeEnergy) {
    const ModelSpec spec = ModelSpec::rect(ModelKind::rect_additive, 128, 256, NoiseModel::gaussian(),
                                           SnrSpec({2.0, 0.5}), PriorKind::spherical);
    Rng rng(8);
    const DataMatrix d = build(spec, rng);
    const Eigen::MatrixXd P = d.U * Eigen::Vector2d(std::sqrt(2.0), std::sqrt(0.5)).asDiagonal() * d.V.transpose();
    EXPECT_NEAR(P.squaredNorm(), 2.5, 0.5);
}

TEST(Multiplicative, NoSpikeIsNoise) {
    const ModelSpec spec =
        ModelSpec::rect(ModelKind::rect_multiplicative, 32, 64, NoiseModel::bimodal(0.5), SnrSpec());
    const ModelSpec add = ModelSpec::rect(ModelKind::rect_additive, 32, 64, NoiseModel::bimodal(0.5), SnrSpec());
    EXPECT_TRUE(synthesize(spec, 9).values == synthesize(add, 9).values);
}

TEST(Multiplicative, SphericalSquareRoot) {
    const ModelSpec spec = ModelSpec::rect(ModelKind::rect_multiplicative, 50, 100, NoiseModel::gaussian(),
                                           SnrSpec({3.0, 1.0}), PriorKind::spherical);
    Rng rng(10);
    const DataMatrix d = build(spec, rng);
    const auto g = spec.snr.gammas();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(50, 50);
    const Eigen::MatrixXd A = I + d.U * Eigen::Vector2d(g[0], g[1]).asDiagonal() * d.U.transpose();
    const Eigen::MatrixXd B = I + d.U * Eigen::Vector2d(3.0, 1.0).asDiagonal() * d.U.transpose();
    EXPECT_LT((A * A - B).norm(), 1e-10);
}

TEST(Multiplicative, Outlier) {
    const DataMatrix d = synthesize(
        ModelSpec::rect(ModelKind::rect_multiplicative, 512, 1024, NoiseModel::gaussian(), SnrSpec({1.0})), 11);
    EXPECT_NEAR(gram_spectrum(d.values).max(), 3.0, 0.2);
}

TEST(Build, Deterministic) {
    for (ModelKind k : {ModelKind::wigner, ModelKind::rect_additive, ModelKind::rect_multiplicative}) {
        const ModelSpec spec = k == ModelKind::wigner ? ModelSpec::wigner(40, NoiseModel::sech(), SnrSpec({0.7}))
                                                      : ModelSpec::rect(k, 20, 40, NoiseModel::sech(), SnrSpec({0.7}));
        EXPECT_TRUE(synthesize(spec, 99).values == synthesize(spec, 99).values);
        EXPECT_FALSE(synthesize(spec, 99).values == synthesize(spec, 100).values);
    }
}

// Slow statistical checks. Sizes are reduced; tolerances are in binomial
// standard errors.

#include <gtest/gtest.h>

#include <cmath>

#include "spiked/detect.hpp"
#include "spiked/harness.hpp"
#include "spiked/models.hpp"
#include "spiked/spectral.hpp"

using namespace spiked;

namespace {

TEST(MonteCarlo, WignerNullEdgeConcentrates) {
    int close = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const DataMatrix d = synthesize(ModelSpec::wigner(512, NoiseModel::gaussian(), SnrSpec()), seed);
        close += std::abs(eigenvalues_sym(d.values).max() - 2.0) < 0.3;
    }
    EXPECT_GE(close, 48);
}

TEST(MonteCarlo, RectNullEdgeConcentrates) {
    const double edge = MpLaw(0.5).d_plus();
    int close = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const DataMatrix d =
            synthesize(ModelSpec::rect(ModelKind::rect_additive, 256, 512, NoiseModel::sech(), SnrSpec()), seed);
        close += std::abs(gram_spectrum(d.values).max() - edge) < 0.3;
    }
    EXPECT_GE(close, 48);
}

struct NullCase {
    const char* name;
    ModelSpec model;
    bool transformed;
    double omega;
};

class TypeOneRate : public ::testing::TestWithParam<int> {};

TEST_P(TypeOneRate, MatchesHalfTheoreticalError) {
    const NullCase cases[] = {
        {"wigner", ModelSpec::wigner(128, NoiseModel::gaussian(2.0), SnrSpec()), false, 0.5},
        {"wigner_transformed", ModelSpec::wigner(128, NoiseModel::sech(), SnrSpec()), true, 0.5},
        {"rect", ModelSpec::rect(ModelKind::rect_additive, 64, 128, NoiseModel::gaussian(), SnrSpec()), false, 0.3},
        {"rect_transformed", ModelSpec::rect(ModelKind::rect_additive, 64, 128, NoiseModel::sech(), SnrSpec()), true,
         0.3},
    };
    const NullCase& k = cases[GetParam()];
    SimConfig c;
    c.experiment = ExperimentKind::clt_null;
    c.model = k.model;
    c.snr_grid = {k.omega};
    c.trials = 2000;
    c.transformed = k.transformed;
    c.alpha.mode = AlphaChoice::Mode::zero;
    c.master_seed = 77;
    c.threads = effective_threads(0);
    const GridPointSummary p = run_trials(c).points.at(0);
    const double expected = 0.5 * theoretical_error({0, 1, k.omega}, p.theory_var);
    const double se = std::sqrt(expected * (1 - expected) / static_cast<double>(p.trials));
    EXPECT_NEAR(p.theory_error, expected, 1e-12) << k.name;
    EXPECT_NEAR(p.empirical_error, expected, 3 * se) << k.name;
}

INSTANTIATE_TEST_SUITE_P(FourStatistics, TypeOneRate, ::testing::Range(0, 4));

}  // namespace

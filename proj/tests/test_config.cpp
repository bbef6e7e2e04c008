#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "spiked/config.hpp"
#include "spiked/error.hpp"
#include "spiked/harness.hpp"

using namespace spiked;

namespace {

std::string message_of(const std::string& json) {
    try {
        parse_config(json);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(NoiseSpec, ShortForms) {
    EXPECT_NEAR(parse_noise_spec("sech").functionals().F_g, std::numbers::pi * std::numbers::pi / 8, 1e-8);
    EXPECT_EQ(parse_noise_spec("gaussian:2").w2(), 2.0);
    EXPECT_EQ(parse_noise_spec("bimodal:0.5").offdiag().a(), 0.5);
    EXPECT_THROW(parse_noise_spec("bimodal"), ValidationError);
    EXPECT_THROW(parse_noise_spec("cauchy"), ValidationError);
    EXPECT_THROW(parse_noise_spec("gaussian:x"), ValidationError);
    EXPECT_THROW(parse_noise_spec("bimodal:1.2"), ValidationError);
}

TEST(NoiseSpec, Json) {
    EXPECT_EQ(parse_noise_spec(R"({"kind": "gaussian", "w2": 2.0})").w2(), 2.0);
    const NoiseModel m = parse_noise_spec(R"({"kind": "bimodal", "a": 0.8660254, "diag": {"kind": "gaussian"}})");
    EXPECT_EQ(m.diag().kind(), NoiseKind::gaussian);
    EXPECT_NEAR(m.functionals().F_gd, 1.0, 1e-10);
    EXPECT_THROW(parse_noise_spec(R"({"kind": "sech", "b": 1})"), ValidationError);
    EXPECT_THROW(parse_noise_spec(R"({"kind": "custom"})"), ValidationError);
    EXPECT_THROW(parse_noise_spec(R"({"kind": )"), ValidationError);
}

TEST(Config, Minimal) {
    const SimConfig c = parse_config(R"({
        "experiment": "weak_detection", "model": "wigner", "N": 64,
        "noise": {"kind": "gaussian", "w2": 2.0}, "snr": [0.3, 0.5], "k1": 1, "k2": 2,
        "trials": 10, "seed": 42})");
    EXPECT_EQ(c.experiment, ExperimentKind::weak_detection);
    EXPECT_EQ(c.model.N, 64u);
    EXPECT_EQ(c.model.M, 64u);
    EXPECT_EQ(c.snr_grid, (std::vector<double>{0.3, 0.5}));
    EXPECT_EQ(c.master_seed, 42u);
    EXPECT_EQ(c.k2, 2);
}

TEST(Config, RectangularAndTransform) {
    const SimConfig c = parse_config(R"({
        "experiment": "bbp_outliers", "model": "rect_multiplicative", "N": 200, "d0": 0.5,
        "noise": {"kind": "bimodal", "a": 0.9165151389911680}, "snr": "lam_sim_mult",
        "transform": {"enabled": true, "alpha": "sqrt_Fg"}, "trials": 3})");
    EXPECT_EQ(c.model.M, 100u);
    EXPECT_TRUE(c.transformed);
    EXPECT_EQ(c.alpha.mode, AlphaChoice::Mode::sqrt_Fg);
    ASSERT_EQ(c.snr_grid.size(), 3u);
    EXPECT_GE(c.snr_grid[0], c.snr_grid[1]);
}

TEST(Config, SpikeListSorted) {
    const SimConfig c = parse_config(R"({"experiment": "bbp_outliers", "model": "wigner", "N": 50,
        "noise": "sech", "snr": [0.5, 2.0, 1.0], "trials": 1})");
    EXPECT_EQ(c.snr_grid, (std::vector<double>{2.0, 1.0, 0.5}));
}

TEST(Config, UnknownKeyNamed) {
    const std::string m = message_of(R"({"experiment": "clt_null", "model": "wigner", "N": 32,
        "noise": "gaussian", "snr": [0.5], "trials": 5, "trails": 7})");
    EXPECT_NE(m.find("trails"), std::string::npos) << m;
    const std::string m2 = message_of(R"({"experiment": "clt_null", "model": "wigner", "N": 32,
        "noise": {"kind": "gaussian", "sigma": 1}, "snr": [0.5], "trials": 5})");
    EXPECT_NE(m2.find("sigma"), std::string::npos) << m2;
}

TEST(Config, MissingRequiredKeyNamed) {
    const std::string m = message_of(R"({"experiment": "clt_null", "model": "wigner", "N": 32,
        "noise": "gaussian", "snr": [0.5]})");
    EXPECT_NE(m.find("trials"), std::string::npos) << m;
}

TEST(Config, Rejections) {
    EXPECT_FALSE(message_of("{not json").empty());
    // Outside the statistic's domain.
    EXPECT_FALSE(message_of(R"({"experiment": "weak_detection", "model": "wigner", "N": 32,
        "noise": "gaussian", "snr": [1.2], "trials": 5})").empty());
    // Transformed sech: omega F_g must stay below 1.
    EXPECT_FALSE(message_of(R"({"experiment": "weak_detection", "model": "wigner", "N": 32,
        "noise": "sech", "snr": [0.85], "trials": 5, "transform": {"enabled": true}})").empty());
    EXPECT_FALSE(message_of(R"({"experiment": "weak_detection", "model": "wigner", "N": 32,
        "noise": "gaussian", "snr": [0.5], "trials": 0})").empty());
    EXPECT_FALSE(message_of(R"({"experiment": "weak_detection", "model": "additive", "N": 30, "d0": 0.45,
        "noise": "gaussian", "snr": [0.5], "trials": 5})").empty());
    EXPECT_FALSE(message_of(R"({"experiment": "weak_detection", "model": "wigner", "N": 32,
        "noise": "gaussian", "snr": [0.5], "trials": 5, "k1": 2, "k2": 1})").empty());
    EXPECT_FALSE(message_of(R"({"experiment": "weak_detection", "model": "multiplicative", "N": 32, "M": 16,
        "noise": "sech", "snr": [0.1], "trials": 5, "transform": {"enabled": true}})").empty());
    EXPECT_FALSE(message_of(R"({"experiment": "nope", "model": "wigner", "N": 32,
        "noise": "gaussian", "snr": [0.5], "trials": 5})").empty());
    EXPECT_FALSE(message_of(R"({"experiment": "clt_null", "model": "wigner", "N": 32,
        "noise": "gaussian", "snr": "lam2", "trials": 5})").empty());
}

TEST(Config, EmptyGridAllowed) {
    EXPECT_TRUE(parse_config(R"({"experiment": "clt_null", "model": "wigner", "N": 16,
        "noise": "gaussian", "snr": [], "trials": 2})").snr_grid.empty());
}

TEST(Presets, Formulas) {
    const double F = 2.5;
    const auto a = preset_lam(F, 3);
    ASSERT_EQ(a.size(), 3u);
    EXPECT_NEAR(a[0], (3 + 1 / F) / 4, 1e-15);
    EXPECT_NEAR(a[2], (1 + 1 / F) / 2, 1e-15);
    const double d0 = 0.5, r = std::sqrt(d0);
    EXPECT_NEAR(preset_lam_sim(d0, F, 3)[1], (2 * r + r / F) / 3, 1e-15);
    EXPECT_NEAR(preset_lam_sim_mult(d0, F, 3)[2], (r + 2 * r / (1 + std::sqrt(F))) / 2, 1e-15);
    EXPECT_TRUE(preset_lam(F, 0).empty());
}

#pragma once

#include <optional>
#include <span>

#include "spiked/lss.hpp"
#include "spiked/models.hpp"
#include "spiked/spectral.hpp"

namespace spiked {

// Standard complementary error function, 2/sqrt(pi) normalization.
double erfc_std(double x);

struct HypothesisPair {
    int k1 = 0;
    int k2 = 1;
    double omega = 0.0;

    void validate() const;
};

struct Decision {
    int accepted = 0;  // k1 or k2
    double statistic = 0.0;
    double threshold = 0.0;
};

// Accept k1 iff L <= (m_{k1} + m_{k2}) / 2.
Decision decide(double L, const CltParams& params, const HypothesisPair& pair);

struct TestOptions {
    bool transformed = false;
};

// Which statistic applies to a model. The multiplicative model has no
// transformed statistic.
LssCase statistic_case(ModelKind kind, bool transformed);

struct StatisticEvaluation {
    LssCase kase = LssCase::wigner;
    double statistic = 0.0;
    CltParams params;
    Spectrum spectrum;
};

// Optional transform, spectrum, statistic and CLT parameters for one matrix.
// The noise model recorded in the data's spec is treated as known.
StatisticEvaluation evaluate_statistic(const DataMatrix& data, double omega, bool transformed);

Decision run_test(const DataMatrix& data, const HypothesisPair& pair, TestOptions options = {});

// erfc((k2 - k1)/4 sqrt(V0/2)).
double theoretical_error(const HypothesisPair& pair, double V0);

struct RankEstimate {
    int kappa = 0;
    double kappa_prime = 0.0;
    bool clamped = false;
};

RankEstimate estimate_rank(double L, const CltParams& params, std::optional<int> K_max = {});

// prior[k] = P(rank = k), k = 0..K. bounded selects the known-range variant
// where both end ranks err on one side only.
double theoretical_rank_error(std::span<const double> prior, double V0, bool bounded = true);

}  // namespace spiked

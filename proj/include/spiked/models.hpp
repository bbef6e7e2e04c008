#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spiked/noise.hpp"

namespace spiked {

enum class ModelKind { wigner, rect_additive, rect_multiplicative };
enum class PriorKind { rademacher_iid, spherical };

std::string to_string(ModelKind kind);
std::string to_string(PriorKind kind);
ModelKind parse_model_kind(const std::string& s);
PriorKind parse_prior_kind(const std::string& s);

// Diagonal of Lambda, non-increasing and positive. Empty means no spike.
class SnrSpec {
public:
    SnrSpec() = default;
    explicit SnrSpec(std::vector<double> lambdas);

    const std::vector<double>& lambdas() const noexcept { return lambdas_; }
    // gamma = sqrt(1 + lambda) - 1, so that 2 gamma + gamma^2 = lambda.
    std::vector<double> gammas() const;
    std::size_t rank() const noexcept { return lambdas_.size(); }

private:
    std::vector<double> lambdas_;
};

struct ModelSpec {
    ModelKind kind = ModelKind::wigner;
    std::size_t N = 0;
    std::size_t M = 0;  // equals N for wigner
    NoiseModel noise = NoiseModel::gaussian();
    PriorKind prior = PriorKind::rademacher_iid;
    SnrSpec snr;

    double d0() const { return static_cast<double>(M) / static_cast<double>(N); }
    bool is_rect() const noexcept { return kind != ModelKind::wigner; }
    void validate() const;

    static ModelSpec wigner(std::size_t N, NoiseModel noise, SnrSpec snr,
                            PriorKind prior = PriorKind::rademacher_iid);
    static ModelSpec rect(ModelKind kind, std::size_t M, std::size_t N, NoiseModel noise,
                          SnrSpec snr, PriorKind prior = PriorKind::rademacher_iid);
};

struct DataMatrix {
    Eigen::MatrixXd values;  // N x N (wigner) or M x N
    Eigen::MatrixXd U;       // left spikes, one column per SNR
    Eigen::MatrixXd V;       // right spikes (additive model only)
    ModelSpec spec;
    std::optional<std::uint64_t> seed;
};

// dim x k matrix of spike columns.
Eigen::MatrixXd sample_spike(PriorKind prior, std::size_t dim, std::size_t k, Rng& rng);

DataMatrix build_spiked_wigner(const ModelSpec& spec, Rng& rng);
DataMatrix build_additive(const ModelSpec& spec, Rng& rng);
DataMatrix build_multiplicative(const ModelSpec& spec, Rng& rng);

// Dispatch on spec.kind.
DataMatrix build(const ModelSpec& spec, Rng& rng);
// Seeds a fresh generator and records the seed in the result.
DataMatrix synthesize(const ModelSpec& spec, std::uint64_t seed);

}  // namespace spiked

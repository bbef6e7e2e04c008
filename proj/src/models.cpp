#include "spiked/models.hpp"

#include <cmath>
#include <sstream>

#include "spiked/error.hpp"

namespace spiked {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::wigner: return "wigner";
        case ModelKind::rect_additive: return "rect_additive";
        case ModelKind::rect_multiplicative: return "rect_multiplicative";
    }
    return "?";
}

std::string to_string(PriorKind kind) {
    return kind == PriorKind::spherical ? "spherical" : "rademacher_iid";
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "wigner") return ModelKind::wigner;
    if (s == "rect_additive" || s == "additive") return ModelKind::rect_additive;
    if (s == "rect_multiplicative" || s == "multiplicative") return ModelKind::rect_multiplicative;
    throw ValidationError("unknown model kind '" + s + "'");
}

PriorKind parse_prior_kind(const std::string& s) {
    if (s == "rademacher_iid" || s == "rademacher") return PriorKind::rademacher_iid;
    if (s == "spherical") return PriorKind::spherical;
    throw ValidationError("unknown prior '" + s + "'");
}

SnrSpec::SnrSpec(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
    for (std::size_t i = 0; i < lambdas_.size(); ++i) {
        const double l = lambdas_[i];
        if (!(l > 0.0) || !std::isfinite(l)) {
            std::ostringstream os;
            os << "snr[" << i << "] must be positive and finite, got " << l;
            throw ValidationError(os.str());
        }
        if (i > 0 && l > lambdas_[i - 1]) {
            throw ValidationError("snr values must be non-increasing");
        }
    }
}

std::vector<double> SnrSpec::gammas() const {
    std::vector<double> g;
    g.reserve(lambdas_.size());
    // sqrt(1+l) - 1 written to avoid cancellation for small l
    for (double l : lambdas_) g.push_back(l / (std::sqrt(1.0 + l) + 1.0));
    return g;
}

void ModelSpec::validate() const {
    if (N == 0 || M == 0) throw ValidationError("matrix dimensions must be positive");
    if (kind == ModelKind::wigner && M != N) {
        throw ValidationError("wigner model requires M = N");
    }
    if (is_rect() && M > N) {
        throw ValidationError("rectangular models require M <= N (d0 in (0,1]); transpose the data");
    }
    if (snr.rank() > M) throw ValidationError("spike rank exceeds the row dimension");
}

ModelSpec ModelSpec::wigner(std::size_t N, NoiseModel noise, SnrSpec snr, PriorKind prior) {
    ModelSpec s;
    s.kind = ModelKind::wigner;
    s.N = N;
    s.M = N;
    s.noise = std::move(noise);
    s.prior = prior;
    s.snr = std::move(snr);
    s.validate();
    return s;
}

ModelSpec ModelSpec::rect(ModelKind kind, std::size_t M, std::size_t N, NoiseModel noise,
                          SnrSpec snr, PriorKind prior) {
    if (kind == ModelKind::wigner) throw ValidationError("rect() called with wigner kind");
    ModelSpec s;
    s.kind = kind;
    s.N = N;
    s.M = M;
    s.noise = std::move(noise);
    s.prior = prior;
    s.snr = std::move(snr);
    s.validate();
    return s;
}

Eigen::MatrixXd sample_spike(PriorKind prior, std::size_t dim, std::size_t k, Rng& rng) {
    if (k > dim) {
        std::ostringstream os;
        os << "spike rank " << k << " exceeds dimension " << dim;
        throw ValidationError(os.str());
    }
    const auto n = static_cast<Eigen::Index>(dim);
    const auto r = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd U(n, r);
    if (prior == PriorKind::rademacher_iid) {
        std::bernoulli_distribution coin(0.5);
        const double v = 1.0 / std::sqrt(static_cast<double>(dim));
        for (Eigen::Index j = 0; j < r; ++j)
            for (Eigen::Index i = 0; i < n; ++i) U(i, j) = coin(rng) ? v : -v;
        return U;
    }
    std::normal_distribution<double> normal;
    for (Eigen::Index j = 0; j < r; ++j)
        for (Eigen::Index i = 0; i < n; ++i) U(i, j) = normal(rng);
    if (r == 0) return U;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(U);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
}

namespace {

Eigen::MatrixXd iid_noise(const Density& d, std::size_t rows, std::size_t cols, double scale,
                          Rng& rng) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    d.fill(std::span<double>(X.data(), static_cast<std::size_t>(X.size())), rng);
    X *= scale;
    return X;
}

Eigen::VectorXd sqrt_lambdas(const SnrSpec& snr) {
    Eigen::VectorXd s(static_cast<Eigen::Index>(snr.rank()));
    for (std::size_t i = 0; i < snr.rank(); ++i) s(static_cast<Eigen::Index>(i)) = std::sqrt(snr.lambdas()[i]);
    return s;
}

void require_kind(const ModelSpec& spec, ModelKind kind) {
    spec.validate();
    if (spec.kind != kind) {
        throw ValidationError("builder for " + to_string(kind) + " called with " +
                              to_string(spec.kind) + " spec");
    }
}

}  // namespace

DataMatrix build_spiked_wigner(const ModelSpec& spec, Rng& rng) {
    require_kind(spec, ModelKind::wigner);
    const std::size_t N = spec.N;
    const auto n = static_cast<Eigen::Index>(N);
    const double Nd = static_cast<double>(N);

    DataMatrix out;
    out.spec = spec;
    out.U = sample_spike(spec.prior, N, spec.snr.rank(), rng);

    std::vector<double> off(N * (N - 1) / 2);
    std::vector<double> diag(N);
    spec.noise.offdiag().fill(off, rng);
    spec.noise.diag().fill(diag, rng);

    Eigen::MatrixXd W(n, n);
    const double s_off = 1.0 / std::sqrt(Nd);
    const double s_diag = std::sqrt(spec.noise.w2() / Nd);
    std::size_t idx = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double v = s_off * off[idx++];
            W(i, j) = v;
            W(j, i) = v;
        }
        W(j, j) = s_diag * diag[static_cast<std::size_t>(j)];
    }
    if (spec.snr.rank() > 0) {
        const Eigen::MatrixXd US = out.U * sqrt_lambdas(spec.snr).asDiagonal();
        Eigen::MatrixXd P = US * out.U.transpose();
        // Symmetrize exactly so values(i,j) == values(j,i) bit for bit.
        P = 0.5 * (P + P.transpose()).eval();
        W += P;
    }
    out.values = std::move(W);
    return out;
}

DataMatrix build_additive(const ModelSpec& spec, Rng& rng) {
    require_kind(spec, ModelKind::rect_additive);
    DataMatrix out;
    out.spec = spec;
    const std::size_t k = spec.snr.rank();
    out.U = sample_spike(spec.prior, spec.M, k, rng);
    out.V = sample_spike(spec.prior, spec.N, k, rng);
    out.values = iid_noise(spec.noise.offdiag(), spec.M, spec.N,
                           1.0 / std::sqrt(static_cast<double>(spec.N)), rng);
    if (k > 0) out.values.noalias() += out.U * sqrt_lambdas(spec.snr).asDiagonal() * out.V.transpose();
    return out;
}

DataMatrix build_multiplicative(const ModelSpec& spec, Rng& rng) {
    require_kind(spec, ModelKind::rect_multiplicative);
    DataMatrix out;
    out.spec = spec;
    const std::size_t k = spec.snr.rank();
    out.U = sample_spike(spec.prior, spec.M, k, rng);
    out.values = iid_noise(spec.noise.offdiag(), spec.M, spec.N,
                           1.0 / std::sqrt(static_cast<double>(spec.N)), rng);
    if (k > 0) {
        const std::vector<double> g = spec.snr.gammas();
        const Eigen::VectorXd gamma = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(k));
        const Eigen::MatrixXd UtX = out.U.transpose() * out.values;
        out.values.noalias() += out.U * gamma.asDiagonal() * UtX;
    }
    return out;
}

DataMatrix build(const ModelSpec& spec, Rng& rng) {
    switch (spec.kind) {
        case ModelKind::wigner: return build_spiked_wigner(spec, rng);
        case ModelKind::rect_additive: return build_additive(spec, rng);
        case ModelKind::rect_multiplicative: return build_multiplicative(spec, rng);
    }
    throw ValidationError("unknown model kind");
}

DataMatrix synthesize(const ModelSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    DataMatrix d = build(spec, rng);
    d.seed = seed;
    return d;
}

}  // namespace spiked

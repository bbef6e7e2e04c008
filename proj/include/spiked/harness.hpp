#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "spiked/models.hpp"
#include "spiked/noise.hpp"

namespace spiked {

enum class ExperimentKind { bbp_outliers, weak_detection, rank_estimation, clt_null };
enum class SupercriticalPolicy { accept_k2, exclude };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

// Mixing parameter of the rectangular transform h_alpha.
struct AlphaChoice {
    enum class Mode { sqrt_Fg, zero, value };
    Mode mode = Mode::sqrt_Fg;
    double value = 0.0;

    double resolve(double F_g) const;
    std::string label() const;
};

struct SimConfig {
    std::string name;
    ExperimentKind experiment = ExperimentKind::weak_detection;
    // Model template: kind, N, M, noise and prior. Its snr is ignored.
    ModelSpec model;
    // Hypothesis SNRs (weak_detection, rank_estimation, clt_null) or the
    // full spike list of a single configuration (bbp_outliers).
    std::vector<double> snr_grid;
    int k1 = 0;
    int k2 = 1;
    int kmax = 4;
    std::size_t trials = 1000;
    bool transformed = false;
    AlphaChoice alpha;
    std::uint64_t master_seed = 0;
    double outlier_tol = 0.05;      // transformed spectra
    double raw_outlier_tol = 0.05;  // untransformed spectra
    unsigned threads = 1;
    SupercriticalPolicy supercritical = SupercriticalPolicy::accept_k2;

    void validate() const;
};

// Preset SNR lists, returned non-increasing. count spikes, l = 1..count.
std::vector<double> preset_lam(double F_g, int count = 3);
std::vector<double> preset_lam_sim(double d0, double F_g, int count = 3);
std::vector<double> preset_lam_sim_mult(double d0, double F_g, int count = 3);

SimConfig parse_config(std::string_view json_text);
SimConfig load_config(const std::filesystem::path& path);

struct GridPointSummary {
    bool transformed = false;
    double snr = 0.0;
    int k1 = 0;
    int k2 = 0;
    std::size_t trials = 0;  // trials entering the error rate
    double empirical_error = 0.0;
    double stderr_ = 0.0;
    double theory_error = 0.0;
    std::size_t supercritical = 0;
    // Moments of the per-trial quantity: the statistic under the first
    // hypothesis, or the outlier count for bbp experiments.
    double stat_mean = 0.0;
    double stat_var = 0.0;
    double theory_mean = 0.0;
    double theory_var = 0.0;
    std::vector<std::size_t> outlier_histogram;  // bbp only
};

struct SimSummary {
    SimConfig config;
    std::vector<GridPointSummary> points;
};

// Per-trial seed from (master, grid index, trial index).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t grid, std::uint64_t trial);

// Thread count: SPIKED_DETECT_THREADS overrides the requested value.
unsigned effective_threads(unsigned requested);

SimSummary run_trials(const SimConfig& config);

void write_csv(const SimSummary& summary, std::ostream& os, bool extended = false);
void emit_csv(const SimSummary& summary, const std::filesystem::path& path, bool extended = false);

}  // namespace spiked

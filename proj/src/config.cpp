#include "spiked/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "spiked/error.hpp"
#include "spiked/harness.hpp"

namespace spiked {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ValidationError("unknown key '" + key + "' in " + where);
        }
    }
}

double get_number(const json& j, const std::string& key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_number()) throw ValidationError("key '" + key + "' in " + where + " must be a number");
    return v.get<double>();
}

long long get_integer(const json& j, const std::string& key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ValidationError("key '" + key + "' in " + where + " must be an integer");
    }
    return v.get<long long>();
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_string()) throw ValidationError("key '" + key + "' in " + where + " must be a string");
    return v.get<std::string>();
}

Density parse_density(const json& j, const std::string& where) {
    const std::string kind = get_string(j, "kind", where);
    if (kind == "gaussian") return Density::gaussian();
    if (kind == "sech") return Density::sech();
    if (kind == "bimodal") {
        if (!j.contains("a")) throw ValidationError("key 'a' missing in " + where);
        return Density::bimodal(get_number(j, "a", where));
    }
    if (kind == "custom") {
        throw ValidationError("custom densities need closed-form evaluators and cannot be given in JSON");
    }
    throw ValidationError("unknown noise kind '" + kind + "' in " + where);
}

NoiseModel parse_noise_json(const json& j) {
    if (j.is_string()) return parse_noise_spec(j.get<std::string>());
    check_keys(j, {"kind", "a", "w2", "diag"}, "noise");
    if (!j.contains("kind")) throw ValidationError("key 'kind' missing in noise");
    const Density off = parse_density(j, "noise");
    const double w2 = j.contains("w2") ? get_number(j, "w2", "noise") : 1.0;
    if (j.contains("diag")) {
        const json& d = j.at("diag");
        check_keys(d, {"kind", "a"}, "noise.diag");
        return NoiseModel(off, parse_density(d, "noise.diag"), w2);
    }
    return NoiseModel(off, w2);
}

}  // namespace

NoiseModel parse_noise_spec(std::string_view text) {
    std::string s(text);
    if (!s.empty() && s.front() == '{') {
        json j;
        try {
            j = json::parse(s);
        } catch (const json::exception& e) {
            throw ValidationError(std::string("malformed noise JSON: ") + e.what());
        }
        return parse_noise_json(j);
    }
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    double param = NAN;
    if (colon != std::string::npos) {
        const std::string p = s.substr(colon + 1);
        std::size_t used = 0;
        try {
            param = std::stod(p, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != p.size() || p.empty()) throw ValidationError("bad noise parameter '" + p + "'");
    }
    if (kind == "gaussian") return NoiseModel::gaussian(std::isnan(param) ? 1.0 : param);
    if (kind == "sech") {
        if (!std::isnan(param)) throw ValidationError("sech noise takes no parameter");
        return NoiseModel::sech();
    }
    if (kind == "bimodal") {
        if (std::isnan(param)) throw ValidationError("bimodal noise needs an amplitude, e.g. bimodal:0.866");
        return NoiseModel::bimodal(param);
    }
    throw ValidationError("unknown noise '" + s + "'");
}

SimConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed JSON config: ") + e.what());
    }
    const std::string where = "config";
    check_keys(j, {"name", "experiment", "model", "N", "M", "d0", "noise", "prior", "snr", "spikes",
                   "k1", "k2", "kmax", "trials", "transform", "seed", "outlier_tol",
                   "raw_outlier_tol", "threads", "supercritical_policy"},
               where);
    for (const char* key : {"experiment", "model", "N", "noise", "snr", "trials"}) {
        if (!j.contains(key)) throw ValidationError(std::string("required key '") + key + "' missing in config");
    }

    SimConfig c;
    try {
        if (j.contains("name")) c.name = get_string(j, "name", where);
        c.experiment = parse_experiment_kind(get_string(j, "experiment", where));
        c.model.kind = parse_model_kind(get_string(j, "model", where));
        const long long N = get_integer(j, "N", where);
        if (N <= 0) throw ValidationError("key 'N' must be positive");
        c.model.N = static_cast<std::size_t>(N);
        if (c.model.kind == ModelKind::wigner) {
            if (j.contains("M") || j.contains("d0")) {
                throw ValidationError("keys 'M'/'d0' do not apply to the wigner model");
            }
            c.model.M = c.model.N;
        } else if (j.contains("M")) {
            if (j.contains("d0")) throw ValidationError("give only one of 'M' and 'd0'");
            const long long M = get_integer(j, "M", where);
            if (M <= 0) throw ValidationError("key 'M' must be positive");
            c.model.M = static_cast<std::size_t>(M);
        } else if (j.contains("d0")) {
            const double d0 = get_number(j, "d0", where);
            const double Mf = d0 * static_cast<double>(N);
            const double Mr = std::round(Mf);
            if (!(d0 > 0.0 && d0 <= 1.0) || std::abs(Mf - Mr) > 1e-9) {
                throw ValidationError("key 'd0' must lie in (0,1] with d0*N an integer");
            }
            c.model.M = static_cast<std::size_t>(Mr);
        } else {
            throw ValidationError("rectangular models need key 'M' or 'd0'");
        }
        c.model.noise = parse_noise_json(j.at("noise"));
        if (j.contains("prior")) c.model.prior = parse_prior_kind(get_string(j, "prior", where));

        if (j.contains("k1")) c.k1 = static_cast<int>(get_integer(j, "k1", where));
        if (j.contains("k2")) c.k2 = static_cast<int>(get_integer(j, "k2", where));
        if (j.contains("kmax")) c.kmax = static_cast<int>(get_integer(j, "kmax", where));
        const long long trials = get_integer(j, "trials", where);
        if (trials < 1) throw ValidationError("key 'trials' must be at least 1");
        c.trials = static_cast<std::size_t>(trials);
        if (j.contains("seed")) {
            const json& s = j.at("seed");
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
                throw ValidationError("key 'seed' must be a nonnegative integer");
            }
            c.master_seed = s.get<std::uint64_t>();
        }
        if (j.contains("outlier_tol")) c.outlier_tol = get_number(j, "outlier_tol", where);
        if (j.contains("raw_outlier_tol")) c.raw_outlier_tol = get_number(j, "raw_outlier_tol", where);
        if (j.contains("threads")) {
            const long long t = get_integer(j, "threads", where);
            if (t < 1) throw ValidationError("key 'threads' must be at least 1");
            c.threads = static_cast<unsigned>(t);
        }
        if (j.contains("supercritical_policy")) {
            const std::string p = get_string(j, "supercritical_policy", where);
            if (p == "accept_k2") c.supercritical = SupercriticalPolicy::accept_k2;
            else if (p == "exclude") c.supercritical = SupercriticalPolicy::exclude;
            else throw ValidationError("key 'supercritical_policy' must be accept_k2 or exclude");
        }
        if (j.contains("transform")) {
            const json& t = j.at("transform");
            check_keys(t, {"enabled", "alpha"}, "transform");
            if (t.contains("enabled")) {
                if (!t.at("enabled").is_boolean()) throw ValidationError("key 'enabled' in transform must be a boolean");
                c.transformed = t.at("enabled").get<bool>();
            }
            if (t.contains("alpha")) {
                const json& a = t.at("alpha");
                if (a.is_number()) {
                    c.alpha.mode = AlphaChoice::Mode::value;
                    c.alpha.value = a.get<double>();
                } else if (a.is_string() && a.get<std::string>() == "sqrt_Fg") {
                    c.alpha.mode = AlphaChoice::Mode::sqrt_Fg;
                } else if (a.is_string() && a.get<std::string>() == "zero") {
                    c.alpha.mode = AlphaChoice::Mode::zero;
                } else {
                    throw ValidationError("key 'alpha' in transform must be \"sqrt_Fg\", \"zero\" or a number");
                }
            }
        }

        const json& snr = j.at("snr");
        if (snr.is_array()) {
            if (j.contains("spikes")) throw ValidationError("key 'spikes' only applies to preset snr lists");
            for (const auto& v : snr) {
                if (!v.is_number()) throw ValidationError("key 'snr' must hold numbers");
                c.snr_grid.push_back(v.get<double>());
            }
        } else if (snr.is_string()) {
            const int count = j.contains("spikes") ? static_cast<int>(get_integer(j, "spikes", where)) : 3;
            const std::string p = snr.get<std::string>();
            const double F = c.model.noise.functionals().F_g;
            if (p == "lam") c.snr_grid = preset_lam(F, count);
            else if (p == "lam_sim") c.snr_grid = preset_lam_sim(c.model.d0(), F, count);
            else if (p == "lam_sim_mult") c.snr_grid = preset_lam_sim_mult(c.model.d0(), F, count);
            else throw ValidationError("unknown snr preset '" + p + "'");
        } else {
            throw ValidationError("key 'snr' must be an array or a preset name");
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad config value: ") + e.what());
    }
    // A spike list is a diagonal of Lambda; store it non-increasing.
    if (c.experiment == ExperimentKind::bbp_outliers) {
        std::sort(c.snr_grid.begin(), c.snr_grid.end(), std::greater<>());
    }
    c.validate();
    return c;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace spiked

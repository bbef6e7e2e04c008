#pragma once

#include <string>
#include <string_view>

#include "spiked/noise.hpp"

namespace spiked {

// Noise from a short form ("sech", "gaussian", "gaussian:2" for w2 = 2,
// "bimodal:0.866") or a JSON object such as
// {"kind": "bimodal", "a": 0.8660254, "w2": 1.0, "diag": {"kind": "gaussian"}}.
NoiseModel parse_noise_spec(std::string_view text);

}  // namespace spiked

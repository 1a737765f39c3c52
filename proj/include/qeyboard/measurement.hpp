// Copyright 2026 The Qeyboard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The measurement stage: state -> one SoundFeatureFrame. Shared by offline
// score playback and live sessions so both produce identical frames.

#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "qeyboard/errors.hpp"
#include "qeyboard/observable_parser.hpp"
#include "qeyboard/observables.hpp"
#include "qeyboard/qsim.hpp"
#include "qeyboard/sonify.hpp"

namespace qeyboard {

enum class MeasurementMode {
    Expectation,  // each sound = (frequency observable, intensity observable)
    Strings,      // each qubit = one fixed-pitch string, intensity from 1-counts
};

inline std::string_view to_string(MeasurementMode m) {
    return m == MeasurementMode::Expectation ? "expectation" : "strings";
}

/// Observable pair driving one sound; the literals are kept for round-tripping.
struct SoundSpec {
    std::string frequency_literal;
    std::string intensity_literal;
    Observable frequency;
    Observable intensity;
};

struct MeasurementConfig {
    double dt = 0.1;  // seconds between frames
    MeasurementMode mode = MeasurementMode::Expectation;
    std::uint64_t n_shots = 0;  // 0 = exact expectation values
    std::uint64_t seed = 0;
    double readout_flip_p = 0.0;
    FrequencyMap frequency_map = FrequencyMap::affine(220.0, 880.0);
    std::vector<SoundSpec> sounds;                 // expectation mode
    std::vector<double> scale = c_major_scale();   // strings mode, one pitch per qubit

    std::size_t n_sounds(int n_qubits) const {
        return mode == MeasurementMode::Expectation ? sounds.size() : static_cast<std::size_t>(n_qubits);
    }

    void validate(int n_qubits) const {
        check_qubit_count(n_qubits);
        if (!(dt > 0) || !std::isfinite(dt)) {
            throw std::invalid_argument("dt must be positive");
        }
        if (!(readout_flip_p >= 0.0 && readout_flip_p <= 1.0)) {
            throw std::invalid_argument("readout_flip_p must lie in [0, 1]");
        }
        if (mode == MeasurementMode::Expectation) {
            frequency_map.validate();
            if (sounds.empty()) {
                throw std::invalid_argument("expectation mode needs at least one sound");
            }
            if (2 * sounds.size() > kMaxSessionObservables) {
                throw std::invalid_argument("at most " + std::to_string(kMaxSessionObservables) +
                                            " observables per session");
            }
            for (const auto &s : sounds) {
                if (s.frequency.n_qubits() != n_qubits || s.intensity.n_qubits() != n_qubits) {
                    throw std::invalid_argument("sound observables must act on " + std::to_string(n_qubits) +
                                                " qubits");
                }
            }
        } else {
            if (scale.size() < static_cast<std::size_t>(n_qubits)) {
                throw std::invalid_argument("strings mode needs a scale entry for every qubit");
            }
            for (double f : scale) {
                if (!(f > 0)) {
                    throw std::invalid_argument("scale frequencies must be positive");
                }
            }
        }
    }
};

/// Measures `state` as frame number `frame_index` at time `t`. Sampling draws
/// from streams derived from (seed, frame_index, ...), so a frame depends only
/// on its inputs.
inline SoundFeatureFrame measure_frame(const Statevector &state, const MeasurementConfig &cfg, double t,
                                       std::uint64_t frame_index) {
    SoundFeatureFrame frame;
    frame.t = t;
    if (cfg.mode == MeasurementMode::Strings) {
        IntensityVector iv;
        if (cfg.n_shots > 0) {
            iv = quantum_string_intensities(
                sample_counts(state, cfg.n_shots, derive_seed(cfg.seed, {frame_index}), cfg.readout_flip_p));
        } else {
            iv = exact_string_intensities(state);
            const double p = cfg.readout_flip_p;
            for (auto &v : iv.values) {
                v = v * (1.0 - p) + (1.0 - v) * p;
            }
        }
        for (std::size_t n = 0; n < iv.values.size(); ++n) {
            frame.features.push_back({cfg.scale[n], iv.values[n]});
        }
        return frame;
    }
    const bool sampled = cfg.n_shots > 0;
    for (std::size_t s = 0; s < cfg.sounds.size(); ++s) {
        const auto &spec = cfg.sounds[s];
        double fe = estimate_expectation(state, spec.frequency, cfg.n_shots,
                                         derive_seed(cfg.seed, {frame_index, 2 * s}), cfg.readout_flip_p);
        double ie = estimate_expectation(state, spec.intensity, cfg.n_shots,
                                         derive_seed(cfg.seed, {frame_index, 2 * s + 1}), cfg.readout_flip_p);
        if (sampled) {
            // Shot noise may push estimates slightly outside the map's domain.
            fe = cfg.frequency_map.mode == FrequencyMode::Multiplicative ? std::max(fe, 0.0)
                                                                         : std::clamp(fe, 0.0, 1.0);
        }
        frame.features.push_back({map_frequency(fe, cfg.frequency_map), std::max(ie, 0.0)});
    }
    return frame;
}

// ---------------------------------------------------------------------------
// JSON schema
//
//   {
//     "dt": 0.1, "mode": "expectation" | "strings", "n_shots": 0, "seed": 0,
//     "readout_flip_p": 0.0,
//     "frequency_map": {"mode": "affine", "f0": 220, "f1": 880}
//                    | {"mode": "multiplicative", "f0": 523.26}
//                    | {"mode": "fixed-scale", "scale": [...]},
//     "sounds": [{"frequency": "<literal>", "intensity": "<literal>"}],
//     "scale": [261.63, ...]
//   }
//
// Every field is optional; unknown fields are rejected.

namespace detail {

inline void reject_unknown(const nlohmann::json &obj, std::initializer_list<std::string_view> allowed,
                           const std::string &where) {
    if (!obj.is_object()) {
        throw ParseError(where + " must be an object");
    }
    for (const auto &[key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ParseError("unknown field '" + key + "' in " + where);
        }
    }
}

template <class T> T get_field(const nlohmann::json &obj, const char *key, const std::string &where) {
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ParseError("field '" + std::string(key) + "' in " + where + " is missing or has the wrong type");
    }
}

}  // namespace detail

inline FrequencyMap frequency_map_from_json(const nlohmann::json &j) {
    detail::reject_unknown(j, {"mode", "f0", "f1", "scale"}, "frequency_map");
    const auto mode = frequency_mode_from_string(detail::get_field<std::string>(j, "mode", "frequency_map"));
    FrequencyMap m;
    switch (mode) {
    case FrequencyMode::Affine:
        m = FrequencyMap::affine(detail::get_field<double>(j, "f0", "frequency_map"),
                                 detail::get_field<double>(j, "f1", "frequency_map"));
        break;
    case FrequencyMode::Multiplicative:
        m = FrequencyMap::multiplicative(detail::get_field<double>(j, "f0", "frequency_map"));
        break;
    case FrequencyMode::FixedScale:
        m = FrequencyMap::fixed_scale(detail::get_field<std::vector<double>>(j, "scale", "frequency_map"));
        break;
    }
    m.validate();
    return m;
}

inline nlohmann::json to_json(const FrequencyMap &m) {
    nlohmann::json j{{"mode", std::string(to_string(m.mode))}};
    if (m.mode == FrequencyMode::FixedScale) {
        j["scale"] = m.scale_table;
    } else {
        j["f0"] = m.f0;
        if (m.mode == FrequencyMode::Affine) {
            j["f1"] = m.f1;
        }
    }
    return j;
}

inline MeasurementConfig measurement_from_json(const nlohmann::json &j, int n_qubits) {
    const std::string where = "measurement";
    detail::reject_unknown(j, {"dt", "mode", "n_shots", "seed", "readout_flip_p", "frequency_map", "sounds", "scale"},
                           where);
    MeasurementConfig cfg;
    if (j.contains("dt")) {
        cfg.dt = detail::get_field<double>(j, "dt", where);
    }
    if (j.contains("mode")) {
        const auto m = detail::get_field<std::string>(j, "mode", where);
        if (m == "expectation") {
            cfg.mode = MeasurementMode::Expectation;
        } else if (m == "strings") {
            cfg.mode = MeasurementMode::Strings;
        } else {
            throw ParseError("unknown measurement mode '" + m + "'");
        }
    }
    if (j.contains("n_shots")) {
        const auto shots = detail::get_field<std::int64_t>(j, "n_shots", where);
        if (shots < 0) {
            throw ParseError("n_shots must be nonnegative");
        }
        cfg.n_shots = static_cast<std::uint64_t>(shots);
    }
    if (j.contains("seed")) {
        cfg.seed = detail::get_field<std::uint64_t>(j, "seed", where);
    }
    if (j.contains("readout_flip_p")) {
        cfg.readout_flip_p = detail::get_field<double>(j, "readout_flip_p", where);
    }
    if (j.contains("frequency_map")) {
        cfg.frequency_map = frequency_map_from_json(j.at("frequency_map"));
    }
    if (j.contains("scale")) {
        cfg.scale = detail::get_field<std::vector<double>>(j, "scale", where);
    }
    if (j.contains("sounds")) {
        if (!j.at("sounds").is_array()) {
            throw ParseError("'sounds' must be an array");
        }
        for (const auto &s : j.at("sounds")) {
            detail::reject_unknown(s, {"frequency", "intensity"}, "sound");
            SoundSpec spec;
            spec.frequency_literal = detail::get_field<std::string>(s, "frequency", "sound");
            spec.intensity_literal = detail::get_field<std::string>(s, "intensity", "sound");
            spec.frequency = parse_observable(spec.frequency_literal, n_qubits);
            spec.intensity = parse_observable(spec.intensity_literal, n_qubits);
            cfg.sounds.push_back(std::move(spec));
        }
    }
    cfg.validate(n_qubits);
    return cfg;
}

inline nlohmann::json to_json(const MeasurementConfig &cfg) {
    nlohmann::json sounds = nlohmann::json::array();
    for (const auto &s : cfg.sounds) {
        sounds.push_back({{"frequency", s.frequency_literal}, {"intensity", s.intensity_literal}});
    }
    return {{"dt", cfg.dt},
            {"mode", std::string(to_string(cfg.mode))},
            {"n_shots", cfg.n_shots},
            {"seed", cfg.seed},
            {"readout_flip_p", cfg.readout_flip_p},
            {"frequency_map", to_json(cfg.frequency_map)},
            {"sounds", sounds},
            {"scale", cfg.scale}};
}

}  // namespace qeyboard

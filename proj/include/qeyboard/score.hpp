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

// Scores: timed circuit edits plus a measurement configuration. The file
// format is JSON and documented in docs/score-format.md.

#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qeyboard/errors.hpp"
#include "qeyboard/measurement.hpp"
#include "qeyboard/qsim.hpp"
#include "qeyboard/sonify.hpp"

namespace qeyboard {

inline constexpr int kScoreVersion = 1;

/// Two times closer than this are treated as equal when deciding whether an
/// event is in effect.
inline constexpr double kTimeTolerance = 1e-9;

// Circuit edits. The first three are shared with live sessions.
struct AddGate {
    GateOp gate;
};
struct RemoveGate {
    std::string gate_id;
};
struct SetParam {
    std::string gate_id;
    double value = 0.0;
};
struct RampParam {
    std::string gate_id;
    double t_end = 0.0;
    double from = 0.0;
    double to = 0.0;
};

using ScoreAction = std::variant<AddGate, RemoveGate, SetParam, RampParam>;

struct ScoreEvent {
    double t = 0.0;
    ScoreAction action;
};

struct Score {
    int version = kScoreVersion;
    int n_qubits = 1;
    double duration = 1.0;
    std::vector<ScoreEvent> events;  // sorted by t, ties in file order
    MeasurementConfig measurement;

    /// floor(duration / dt) + 1
    std::size_t frame_count() const {
        return static_cast<std::size_t>(std::floor(duration / measurement.dt + kTimeTolerance)) + 1;
    }
};

// ---------------------------------------------------------------------------
// Gate JSON: {"id": "g1", "kind": "RY", "targets": [0], "param": 0.5, "axis": "X"}

inline GateOp gate_from_json(const nlohmann::json &j) {
    detail::reject_unknown(j, {"id", "kind", "targets", "param", "axis"}, "gate");
    GateOp op;
    if (j.contains("id")) {
        op.id = detail::get_field<std::string>(j, "id", "gate");
    }
    try {
        op.kind = gate_kind_from_string(detail::get_field<std::string>(j, "kind", "gate"));
    } catch (const std::invalid_argument &e) {
        throw ParseError(e.what());
    }
    op.targets = detail::get_field<std::vector<int>>(j, "targets", "gate");
    if (j.contains("param")) {
        op.param = detail::get_field<double>(j, "param", "gate");
    }
    if (j.contains("axis")) {
        if (op.kind != GateKind::EXP2) {
            throw ParseError("only EXP2 gates take an axis");
        }
        const auto a = detail::get_field<std::string>(j, "axis", "gate");
        if (a.size() != 1) {
            throw ParseError("axis must be one of X, Y, Z");
        }
        try {
            op.axis = pauli_from_char(a[0]);
        } catch (const std::invalid_argument &e) {
            throw ParseError(e.what());
        }
    }
    return op;
}

inline nlohmann::json to_json(const GateOp &op) {
    nlohmann::json j{{"id", op.id}, {"kind", std::string(to_string(op.kind))}, {"targets", op.targets}};
    if (op.param) {
        j["param"] = *op.param;
    }
    if (op.kind == GateKind::EXP2) {
        j["axis"] = std::string(1, to_char(op.axis));
    }
    return j;
}

inline nlohmann::json to_json(const Circuit &c) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto &g : c.gates()) {
        gates.push_back(to_json(g));
    }
    return {{"n_qubits", c.n_qubits()}, {"gates", gates}};
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Applies a structural edit to `c`; throws std::invalid_argument on dangling ids.
inline void apply_edit(Circuit &c, const ScoreAction &action) {
    std::visit(
        [&](const auto &a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AddGate>) {
                c.add(a.gate);
            } else if constexpr (std::is_same_v<T, RemoveGate>) {
                c.remove(a.gate_id);
            } else if constexpr (std::is_same_v<T, SetParam>) {
                c.set_param(a.gate_id, a.value);
            } else {
                c.set_param(a.gate_id, a.from);
            }
        },
        action);
}

}  // namespace detail

inline Score score_from_json(const nlohmann::json &j) {
    detail::reject_unknown(j, {"version", "n_qubits", "duration", "measurement", "events"}, "score");
    if (!j.contains("version")) {
        throw ParseError("score is missing the mandatory 'version' field");
    }
    Score score;
    score.version = detail::get_field<int>(j, "version", "score");
    if (score.version != kScoreVersion) {
        throw ParseError("unsupported score version " + std::to_string(score.version));
    }
    score.n_qubits = detail::get_field<int>(j, "n_qubits", "score");
    score.duration = detail::get_field<double>(j, "duration", "score");
    try {
        check_qubit_count(score.n_qubits);
    } catch (const std::invalid_argument &e) {
        throw ParseError(e.what());
    }
    if (!(score.duration > 0) || !std::isfinite(score.duration)) {
        throw ParseError("duration must be positive");
    }
    try {
        score.measurement = measurement_from_json(j.value("measurement", nlohmann::json::object()), score.n_qubits);
    } catch (const std::invalid_argument &e) {
        throw ParseError(std::string("measurement: ") + e.what());
    }

    const auto events = j.value("events", nlohmann::json::array());
    if (!events.is_array()) {
        throw ParseError("'events' must be an array");
    }
    Circuit shadow(score.n_qubits);
    double last_t = 0.0;
    for (std::size_t k = 0; k < events.size(); ++k) {
        const auto &e = events[k];
        const std::string where = "event " + std::to_string(k);
        const auto action = detail::get_field<std::string>(e, "action", where);
        ScoreEvent ev;
        ev.t = detail::get_field<double>(e, "t", where);
        if (!(ev.t >= 0) || !std::isfinite(ev.t)) {
            throw ParseError(where + ": time must be finite and nonnegative");
        }
        if (ev.t > score.duration + kTimeTolerance) {
            throw ParseError(where + ": time " + std::to_string(ev.t) + " is past the score duration");
        }
        if (ev.t < last_t) {
            throw ParseError(where + ": events must be sorted by time");
        }
        last_t = ev.t;
        if (action == "add") {
            detail::reject_unknown(e, {"t", "action", "gate"}, where);
            auto gate = gate_from_json(e.at("gate"));
            if (gate.id.empty()) {
                gate.id = "e" + std::to_string(k);
            }
            ev.action = AddGate{std::move(gate)};
        } else if (action == "remove") {
            detail::reject_unknown(e, {"t", "action", "id"}, where);
            ev.action = RemoveGate{detail::get_field<std::string>(e, "id", where)};
        } else if (action == "set") {
            detail::reject_unknown(e, {"t", "action", "id", "value"}, where);
            ev.action = SetParam{detail::get_field<std::string>(e, "id", where),
                                 detail::get_field<double>(e, "value", where)};
        } else if (action == "ramp") {
            detail::reject_unknown(e, {"t", "action", "id", "t_end", "from", "to"}, where);
            RampParam r{detail::get_field<std::string>(e, "id", where), detail::get_field<double>(e, "t_end", where),
                        detail::get_field<double>(e, "from", where), detail::get_field<double>(e, "to", where)};
            if (!(r.t_end > ev.t)) {
                throw ParseError(where + ": ramp needs t_end > t");
            }
            if (!std::isfinite(r.from) || !std::isfinite(r.to) || !std::isfinite(r.t_end)) {
                throw ParseError(where + ": ramp values must be finite");
            }
            ev.action = std::move(r);
        } else {
            throw ParseError(where + ": unknown action '" + action + "'");
        }
        try {
            detail::apply_edit(shadow, ev.action);
        } catch (const std::exception &ex) {
            throw ParseError(where + ": " + ex.what());
        }
        score.events.push_back(std::move(ev));
    }
    return score;
}

/// Parses score text; syntax errors carry line and column.
inline Score parse_score(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        auto [line, col] = detail::line_column(text, e.byte);
        throw ParseError(std::string("syntax error: ") + e.what(), line, col);
    }
    return score_from_json(j);
}

/// The circuit in effect at time t: every gate added at or before t and not
/// removed since, with ramped parameters linearly interpolated.
inline Circuit circuit_at(const Score &score, double t) {
    if (!(t >= -kTimeTolerance && t <= score.duration + kTimeTolerance)) {
        throw std::out_of_range("time " + std::to_string(t) + " outside the score");
    }
    Circuit c(score.n_qubits);
    struct ActiveRamp {
        double t0, t1, from, to;
    };
    std::map<std::string, ActiveRamp, std::less<>> ramps;
    for (const auto &ev : score.events) {
        if (ev.t > t + kTimeTolerance) {
            break;
        }
        detail::apply_edit(c, ev.action);
        std::visit(
            [&](const auto &a) {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, RampParam>) {
                    ramps[a.gate_id] = {ev.t, a.t_end, a.from, a.to};
                } else if constexpr (std::is_same_v<T, AddGate>) {
                    ramps.erase(a.gate.id);
                } else {
                    ramps.erase(a.gate_id);
                }
            },
            ev.action);
    }
    for (const auto &[id, r] : ramps) {
        const double w = std::clamp((t - r.t0) / (r.t1 - r.t0), 0.0, 1.0);
        c.set_param(id, r.from + (r.to - r.from) * w);
    }
    return c;
}

/// Measures the score on its dt grid: frame i is taken at t_i = i * dt.
inline std::vector<SoundFeatureFrame> play_score(const Score &score) {
    score.measurement.validate(score.n_qubits);
    const auto n = score.frame_count();
    std::vector<SoundFeatureFrame> frames;
    frames.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * score.measurement.dt;
        const auto state = circuit_at(score, std::min(t, score.duration)).run();
        frames.push_back(measure_frame(state, score.measurement, t, i));
    }
    return frames;
}

}  // namespace qeyboard

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

// A live session: a circuit edited by events, measured once per tick.
// Transport-free; the server drives tick() from a timer.

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qeyboard/measurement.hpp"
#include "qeyboard/qsim.hpp"
#include "qeyboard/score.hpp"
#include "qeyboard/service/frame_queue.hpp"
#include "qeyboard/sonify.hpp"

namespace qeyboard::service {

/// Replaces the measurement configuration from the next tick on.
struct ConfigChange {
    MeasurementConfig measurement;
};

using LiveAction = std::variant<AddGate, RemoveGate, SetParam, ConfigChange>;

struct LoggedEvent {
    std::uint64_t tick = 0;  // first frame that reflects the event
    LiveAction action;
};

struct IndexedFrame {
    std::uint64_t index = 0;
    SoundFeatureFrame frame;
};

/// A frame consumer. The session holds it weakly; dropping the last strong
/// reference unsubscribes.
struct Subscription {
    explicit Subscription(std::size_t capacity) : queue(capacity) {}
    FrameQueue<IndexedFrame> queue;
    std::function<void()> wake;  // called after each push, on the ticking thread
};

struct SessionConfig {
    int n_qubits = 1;
    MeasurementConfig measurement;
    std::size_t queue_capacity = 64;
    std::size_t recording_cap = 100000;  // frames kept for rendering

    void validate() const {
        check_qubit_count(n_qubits);
        measurement.validate(n_qubits);
        if (queue_capacity == 0 || recording_cap < 2) {
            throw std::invalid_argument("queue capacity must be positive and the recording cap at least 2");
        }
    }
};

namespace detail {

inline void apply_live(Circuit &c, MeasurementConfig &m, const LiveAction &a) {
    std::visit(
        [&](const auto &x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, AddGate>) {
                c.add(x.gate);
            } else if constexpr (std::is_same_v<T, RemoveGate>) {
                c.remove(x.gate_id);
            } else if constexpr (std::is_same_v<T, SetParam>) {
                c.set_param(x.gate_id, x.value);
            } else {
                m = x.measurement;
            }
        },
        a);
}

}  // namespace detail

class Session {
  public:
    Session(std::string id, SessionConfig cfg)
        : id_(std::move(id)), cfg_(std::move(cfg)), live_(cfg_.n_qubits), shadow_(cfg_.n_qubits),
          measurement_(cfg_.measurement), shadow_measurement_(cfg_.measurement) {
        cfg_.validate();
    }

    const std::string &id() const { return id_; }
    int n_qubits() const { return cfg_.n_qubits; }
    const SessionConfig &config() const { return cfg_; }
    /// Measurement settings the next tick will use.
    const MeasurementConfig &pending_measurement() const { return shadow_measurement_; }
    /// Circuit as of the last tick.
    const Circuit &circuit() const { return live_; }
    /// Circuit including edits not yet applied.
    const Circuit &pending_circuit() const { return shadow_; }
    std::uint64_t next_tick() const { return next_tick_; }
    double dt() const { return measurement_.dt; }

    /// Validates `a` against the pending circuit and queues it for the next
    /// tick. Throws std::invalid_argument (or ParseError) and leaves the
    /// session untouched on failure. For adds, returns the gate id.
    std::string submit(LiveAction a) {
        if (auto *add = std::get_if<AddGate>(&a)) {
            add->gate.validate(cfg_.n_qubits);
            if (add->gate.id.empty()) {
                add->gate.id = "g" + std::to_string(++auto_id_);
                while (shadow_.find(add->gate.id)) {
                    add->gate.id = "g" + std::to_string(++auto_id_);
                }
            }
        }
        if (auto *cc = std::get_if<ConfigChange>(&a)) {
            cc->measurement.validate(cfg_.n_qubits);
            if (cc->measurement.dt != measurement_.dt) {
                throw std::invalid_argument("dt cannot change during a session");
            }
        }
        Circuit c = shadow_;
        MeasurementConfig m = shadow_measurement_;
        detail::apply_live(c, m, a);
        shadow_ = std::move(c);
        shadow_measurement_ = std::move(m);
        std::string gate_id;
        if (auto *add = std::get_if<AddGate>(&a)) {
            gate_id = add->gate.id;
        }
        mailbox_.push_back(std::move(a));
        return gate_id;
    }

    /// Applies queued events as one batch, measures, records and fans out.
    IndexedFrame tick() {
        const auto i = next_tick_++;
        for (auto &a : mailbox_) {
            detail::apply_live(live_, measurement_, a);
            log_.push_back({i, std::move(a)});
        }
        mailbox_.clear();
        IndexedFrame f{i, measure_frame(live_.run(), measurement_, static_cast<double>(i) * measurement_.dt, i)};
        recording_.push_back(f);
        if (recording_.size() > cfg_.recording_cap) {
            recording_.pop_front();
        }
        std::erase_if(subscribers_, [](const auto &w) { return w.expired(); });
        for (const auto &w : subscribers_) {
            if (auto s = w.lock()) {
                s->queue.push(f);
                if (s->wake) {
                    s->wake();
                }
            }
        }
        return f;
    }

    std::shared_ptr<Subscription> subscribe(std::function<void()> wake = {}) {
        auto s = std::make_shared<Subscription>(cfg_.queue_capacity);
        s->wake = std::move(wake);
        subscribers_.push_back(s);
        return s;
    }

    void wake_subscribers() const {
        for (const auto &w : subscribers_) {
            if (auto s = w.lock(); s && s->wake) {
                s->wake();
            }
        }
    }

    std::size_t subscriber_count() const {
        return static_cast<std::size_t>(
            std::count_if(subscribers_.begin(), subscribers_.end(), [](const auto &w) { return !w.expired(); }));
    }

    const std::deque<IndexedFrame> &recording() const { return recording_; }
    const std::vector<LoggedEvent> &event_log() const { return log_; }

    /// Recorded frames with t in [t0, t1].
    std::vector<SoundFeatureFrame> frames_between(double t0, double t1) const {
        if (!(t1 > t0)) {
            throw std::invalid_argument("render range must have t1 > t0");
        }
        if (recording_.size() < 2) {
            throw std::out_of_range("not enough recorded frames to render");
        }
        const double first = recording_.front().frame.t;
        const double last = recording_.back().frame.t;
        if (t0 < first - kTimeTolerance || t1 > last + kTimeTolerance) {
            throw std::out_of_range("range [" + std::to_string(t0) + ", " + std::to_string(t1) +
                                    "] is outside the recording [" + std::to_string(first) + ", " +
                                    std::to_string(last) + "]");
        }
        std::vector<SoundFeatureFrame> out;
        for (const auto &f : recording_) {
            if (f.frame.t >= t0 - kTimeTolerance && f.frame.t <= t1 + kTimeTolerance) {
                out.push_back(f.frame);
            }
        }
        if (out.size() < 2) {
            throw std::out_of_range("render range covers fewer than two frames");
        }
        return out;
    }

    Waveform render(double t0, double t1, const RenderOptions &opts = {}) const {
        return render_frames(frames_between(t0, t1), opts);
    }

  private:
    std::string id_;
    SessionConfig cfg_;
    Circuit live_;
    Circuit shadow_;
    MeasurementConfig measurement_;
    MeasurementConfig shadow_measurement_;
    std::vector<LiveAction> mailbox_;
    std::vector<LoggedEvent> log_;
    std::deque<IndexedFrame> recording_;
    std::vector<std::weak_ptr<Subscription>> subscribers_;
    std::uint64_t next_tick_ = 0;
    std::uint64_t auto_id_ = 0;
};

/// Rebuilds the frames of a session from its event log.
inline std::vector<IndexedFrame> replay(const SessionConfig &cfg, const std::vector<LoggedEvent> &log,
                                        std::uint64_t n_ticks) {
    cfg.validate();
    Circuit c(cfg.n_qubits);
    MeasurementConfig m = cfg.measurement;
    std::vector<IndexedFrame> out;
    std::size_t k = 0;
    for (std::uint64_t i = 0; i < n_ticks; ++i) {
        while (k < log.size() && log[k].tick == i) {
            detail::apply_live(c, m, log[k].action);
            ++k;
        }
        out.push_back({i, measure_frame(c.run(), m, static_cast<double>(i) * m.dt, i)});
    }
    return out;
}

/// Edits that turn circuit `from` into `to`: parameter sets when the gate
/// lists match, otherwise remove everything and re-add.
inline std::vector<LiveAction> diff_events(const Circuit &from, const Circuit &to) {
    std::vector<LiveAction> out;
    const auto a = from.gates();
    const auto b = to.gates();
    const bool same_shape = a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const auto &x, const auto &y) {
                                return x.id == y.id && x.kind == y.kind && x.targets == y.targets && x.axis == y.axis;
                            });
    if (same_shape) {
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (a[k].param != b[k].param && b[k].param) {
                out.push_back(SetParam{b[k].id, *b[k].param});
            }
        }
        return out;
    }
    for (const auto &g : a) {
        out.push_back(RemoveGate{g.id});
    }
    for (const auto &g : b) {
        out.push_back(AddGate{g});
    }
    return out;
}

}  // namespace qeyboard::service

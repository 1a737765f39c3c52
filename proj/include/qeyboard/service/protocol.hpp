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

// Wire protocol, version 1. See docs/protocol.md.
//
// Every message is a JSON object {"v": 1, "type": ..., "session": ...,
// "id": ..., "payload": {...}}. "id" is an optional client correlation
// token echoed back as "ref".

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <deque>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qeyboard/errors.hpp"
#include "qeyboard/measurement.hpp"
#include "qeyboard/score.hpp"
#include "qeyboard/service/config.hpp"
#include "qeyboard/service/session.hpp"
#include "qeyboard/sonify.hpp"
#include "qeyboard/wav.hpp"

namespace qeyboard::service {

inline constexpr int kProtocolVersion = 1;

using nlohmann::json;

inline json envelope(std::string_view type, const std::string &session, json payload) {
    json j{{"v", kProtocolVersion}, {"type", type}, {"payload", std::move(payload)}};
    if (!session.empty()) {
        j["session"] = session;
    }
    return j;
}

inline json error_message(std::string_view code, const std::string &message, const std::string &session = {}) {
    return envelope("error", session, {{"code", code}, {"message", message}});
}

inline std::string session_of(const json &msg) {
    auto it = msg.find("session");
    return it != msg.end() && it->is_string() ? it->get<std::string>() : std::string();
}

inline json frame_message(const std::string &session, const IndexedFrame &f, std::uint64_t dropped) {
    json feats = json::array();
    for (const auto &s : f.frame.features) {
        feats.push_back({{"f", s.frequency}, {"i", s.intensity}});
    }
    return envelope("frame", session, {{"index", f.index}, {"t", f.frame.t}, {"features", feats}, {"dropped", dropped}});
}

/// Rendered WAVs kept for download, oldest evicted first.
class WavStore {
  public:
    explicit WavStore(std::size_t cap = 32) : cap_(cap) {}

    void put(const std::string &token, std::vector<std::uint8_t> bytes) {
        order_.push_back(token);
        items_[token] = std::make_shared<const std::vector<std::uint8_t>>(std::move(bytes));
        while (order_.size() > cap_) {
            items_.erase(order_.front());
            order_.pop_front();
        }
    }

    std::shared_ptr<const std::vector<std::uint8_t>> get(const std::string &token) const {
        auto it = items_.find(token);
        return it == items_.end() ? nullptr : it->second;
    }

  private:
    std::size_t cap_;
    std::deque<std::string> order_;
    std::map<std::string, std::shared_ptr<const std::vector<std::uint8_t>>> items_;
};

/// Per-connection state.
struct Client {
    std::function<void()> wake;  // frames became available
    std::map<std::string, std::shared_ptr<Subscription>> subscriptions;
};

/// Owns sessions and turns request messages into replies. Single-threaded:
/// the server calls everything from its io thread.
class SessionManager {
  public:
    explicit SessionManager(ServiceConfig cfg, std::uint64_t id_seed = std::random_device{}())
        : cfg_(std::move(cfg)), rng_(id_seed) {
        cfg_.validate();
    }

    const ServiceConfig &config() const { return cfg_; }

    /// Hooks for the transport: start and stop per-session timers.
    std::function<void(const std::shared_ptr<Session> &)> on_created;
    std::function<void(const std::string &)> on_closed;

    std::shared_ptr<Session> find(const std::string &id) const {
        auto it = sessions_.find(id);
        return it == sessions_.end() ? nullptr : it->second.session;
    }
    std::size_t session_count() const { return sessions_.size(); }
    const WavStore &wavs() const { return wavs_; }

    std::shared_ptr<Session> create(SessionConfig sc) {
        if (sessions_.size() >= cfg_.session_cap) {
            throw std::length_error("session cap of " + std::to_string(cfg_.session_cap) + " reached");
        }
        sc.queue_capacity = cfg_.queue_capacity;
        sc.recording_cap = cfg_.recording_cap;
        auto s = std::make_shared<Session>(token("s"), std::move(sc));
        sessions_[s->id()] = {s, 0};
        if (on_created) {
            on_created(s);
        }
        return s;
    }

    void close(const std::string &id) {
        auto it = sessions_.find(id);
        if (it == sessions_.end()) {
            return;
        }
        auto s = it->second.session;
        sessions_.erase(it);
        if (on_closed) {
            on_closed(id);
        }
        s->wake_subscribers();
    }

    void close_all() {
        std::vector<std::string> ids;
        for (const auto &[id, _] : sessions_) {
            ids.push_back(id);
        }
        for (const auto &id : ids) {
            close(id);
        }
    }

    /// Ticks one session; closes it after idle_timeout without subscribers.
    /// Returns false if the session is gone.
    bool tick(const std::string &id) {
        auto it = sessions_.find(id);
        if (it == sessions_.end()) {
            return false;
        }
        auto &e = it->second;
        e.session->tick();
        if (e.session->subscriber_count() == 0) {
            ++e.idle_ticks;
            if (static_cast<double>(e.idle_ticks) * e.session->dt() >= cfg_.idle_timeout) {
                close(id);
                return false;
            }
        } else {
            e.idle_ticks = 0;
        }
        return true;
    }

    /// Handles one text message from `client`; returns the replies.
    std::vector<json> handle(Client &client, std::string_view text) {
        json msg;
        try {
            msg = json::parse(text);
        } catch (const json::parse_error &e) {
            return {error_message("bad_request", std::string("malformed JSON: ") + e.what())};
        }
        if (!msg.is_object()) {
            return {error_message("bad_request", "message must be a JSON object")};
        }
        json reply;
        try {
            reply = dispatch(client, msg);
        } catch (const std::length_error &e) {
            reply = error_message("limit", e.what(), session_of(msg));
        } catch (const std::out_of_range &e) {
            reply = error_message("not_found", e.what(), session_of(msg));
        } catch (const std::exception &e) {
            reply = error_message("invalid", e.what(), session_of(msg));
        }
        if (msg.contains("id")) {
            reply["ref"] = msg["id"];
        }
        return {reply};
    }

    /// Drains the client's subscriptions into frame messages, plus closed
    /// notices for sessions that went away.
    std::vector<json> collect(Client &client) {
        std::vector<json> out;
        for (auto it = client.subscriptions.begin(); it != client.subscriptions.end();) {
            for (auto &q : it->second->queue.drain()) {
                out.push_back(frame_message(it->first, q.item, q.dropped_before));
            }
            if (!sessions_.count(it->first)) {
                out.push_back(envelope("closed", it->first, json::object()));
                it = client.subscriptions.erase(it);
            } else {
                ++it;
            }
        }
        return out;
    }

  private:
    struct Entry {
        std::shared_ptr<Session> session;
        std::uint64_t idle_ticks = 0;
    };

    std::string token(std::string_view prefix) {
        std::ostringstream os;
        os << prefix << '-' << std::hex << std::setw(16) << std::setfill('0') << rng_();
        return os.str();
    }

    std::shared_ptr<Session> require(const json &msg) {
        if (!msg.contains("session") || !msg["session"].is_string()) {
            throw std::invalid_argument("message needs a 'session' field");
        }
        auto s = find(msg["session"].get<std::string>());
        if (!s) {
            throw std::out_of_range("unknown session '" + msg["session"].get<std::string>() + "'");
        }
        return s;
    }

    static json state_payload(const Session &s) {
        return {{"n_qubits", s.n_qubits()},
                {"dt", s.dt()},
                {"next_index", s.next_tick()},
                {"circuit", to_json(s.pending_circuit())["gates"]},
                {"measurement", to_json(s.pending_measurement())}};
    }

    void attach(Client &client, const std::shared_ptr<Session> &s) {
        if (!client.subscriptions.count(s->id())) {
            client.subscriptions[s->id()] = s->subscribe(client.wake);
        }
    }

    json dispatch(Client &client, const json &msg) {
        if (msg.value("v", kProtocolVersion) != kProtocolVersion) {
            throw std::invalid_argument("unsupported protocol version");
        }
        if (!msg.contains("type") || !msg["type"].is_string()) {
            throw std::invalid_argument("message needs a string 'type'");
        }
        const auto type = msg["type"].get<std::string>();
        const json payload = msg.value("payload", json::object());
        if (!payload.is_object()) {
            throw std::invalid_argument("'payload' must be an object");
        }

        if (type == "create") {
            qeyboard::detail::reject_unknown(payload, {"n_qubits", "measurement"}, "create payload");
            SessionConfig sc;
            sc.n_qubits = qeyboard::detail::get_field<int>(payload, "n_qubits", "create payload");
            check_qubit_count(sc.n_qubits);
            json m = payload.value("measurement", json::object());
            if (!m.is_object()) {
                throw std::invalid_argument("'measurement' must be an object");
            }
            if (!m.contains("dt")) {
                m["dt"] = cfg_.default_dt;
            }
            if (!m.contains("seed")) {
                m["seed"] = rng_();
            }
            if (!m.contains("mode") && !m.contains("sounds")) {
                m["mode"] = "strings";
            }
            sc.measurement = measurement_from_json(m, sc.n_qubits);
            auto s = create(std::move(sc));
            attach(client, s);
            return envelope("session_created", s->id(), state_payload(*s));
        }
        if (type == "attach") {
            auto s = require(msg);
            attach(client, s);
            return envelope("session_state", s->id(), state_payload(*s));
        }
        if (type == "state") {
            auto s = require(msg);
            return envelope("session_state", s->id(), state_payload(*s));
        }
        if (type == "gate") {
            auto s = require(msg);
            const auto &g = payload.contains("gate") ? payload["gate"] : payload;
            const auto id = s->submit(AddGate{gate_from_json(g)});
            return envelope("ack", s->id(), {{"op", "gate"}, {"gate_id", id}, {"effective_index", s->next_tick()}});
        }
        if (type == "set_param") {
            auto s = require(msg);
            qeyboard::detail::reject_unknown(payload, {"id", "value"}, "set_param payload");
            const auto id = qeyboard::detail::get_field<std::string>(payload, "id", "set_param payload");
            const auto v = qeyboard::detail::get_field<double>(payload, "value", "set_param payload");
            if (!std::isfinite(v)) {
                throw std::invalid_argument("parameter must be finite");
            }
            s->submit(SetParam{id, v});
            return envelope("ack", s->id(), {{"op", "set_param"}, {"gate_id", id}, {"effective_index", s->next_tick()}});
        }
        if (type == "remove") {
            auto s = require(msg);
            qeyboard::detail::reject_unknown(payload, {"id"}, "remove payload");
            const auto id = qeyboard::detail::get_field<std::string>(payload, "id", "remove payload");
            s->submit(RemoveGate{id});
            return envelope("ack", s->id(), {{"op", "remove"}, {"gate_id", id}, {"effective_index", s->next_tick()}});
        }
        if (type == "config") {
            auto s = require(msg);
            json merged = to_json(s->pending_measurement());
            for (const auto &[k, v] : payload.items()) {
                merged[k] = v;
            }
            if (payload.contains("sounds") && !payload.contains("mode")) {
                merged["mode"] = "expectation";
            }
            s->submit(ConfigChange{measurement_from_json(merged, s->n_qubits())});
            return envelope("ack", s->id(), {{"op", "config"}, {"effective_index", s->next_tick()}});
        }
        if (type == "render") {
            auto s = require(msg);
            qeyboard::detail::reject_unknown(payload, {"t0", "t1", "sample_rate", "phase_mode", "interpolation", "window"},
                                             "render payload");
            RenderOptions opts;
            if (payload.contains("sample_rate")) {
                opts.sample_rate = qeyboard::detail::get_field<double>(payload, "sample_rate", "render payload");
            }
            if (payload.contains("phase_mode")) {
                opts.phase_mode = phase_mode_from_string(
                    qeyboard::detail::get_field<std::string>(payload, "phase_mode", "render payload"));
            }
            if (payload.contains("interpolation")) {
                const auto m = qeyboard::detail::get_field<std::string>(payload, "interpolation", "render payload");
                opts.interpolation.mode = interpolation_mode_from_string(m);
            }
            if (payload.contains("window")) {
                opts.interpolation.window = qeyboard::detail::get_field<int>(payload, "window", "render payload");
            }
            const auto &rec = s->recording();
            const double t0 = payload.contains("t0") ? qeyboard::detail::get_field<double>(payload, "t0", "render payload")
                                                     : (rec.empty() ? 0.0 : rec.front().frame.t);
            const double t1 = payload.contains("t1") ? qeyboard::detail::get_field<double>(payload, "t1", "render payload")
                                                     : (rec.empty() ? 0.0 : rec.back().frame.t);
            const auto wav = s->render(t0, t1, opts);
            const auto tok = token("w");
            const auto n = wav.samples.size();
            wavs_.put(tok, encode_wav(wav));
            return envelope("wav_ready", s->id(),
                            {{"token", tok}, {"url", "/wav/" + tok}, {"n_samples", n}, {"sample_rate", wav.sample_rate},
                             {"t0", t0}, {"t1", t1}});
        }
        if (type == "close") {
            auto s = require(msg);
            const auto id = s->id();
            close(id);
            return envelope("closed", id, json::object());
        }
        return error_message("unknown_type", "unknown message type '" + type + "'", session_of(msg));
    }

    ServiceConfig cfg_;
    std::mt19937_64 rng_;
    std::map<std::string, Entry> sessions_;
    WavStore wavs_{cfg_.wav_store_cap};
};

}  // namespace qeyboard::service

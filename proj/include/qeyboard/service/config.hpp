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

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>

#include "qeyboard/errors.hpp"
#include "qeyboard/measurement.hpp"

namespace qeyboard::service {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 8765;
    double default_dt = 0.1;
    std::size_t queue_capacity = 64;
    std::size_t session_cap = 16;
    std::size_t recording_cap = 100000;
    std::size_t wav_store_cap = 32;
    double idle_timeout = 300.0;  // seconds without subscribers before a session is closed

    void validate() const {
        if (!(default_dt > 0) || queue_capacity == 0 || session_cap == 0 || recording_cap < 2 ||
            wav_store_cap == 0 || !(idle_timeout > 0)) {
            throw std::invalid_argument("invalid service configuration");
        }
    }
};

inline ServiceConfig service_config_from_json(const nlohmann::json &j) {
    const std::string where = "service config";
    qeyboard::detail::reject_unknown(j, {"host", "port", "dt", "queue_capacity", "session_cap", "recording_cap",
                                         "wav_store_cap", "idle_timeout"},
                                     where);
    using qeyboard::detail::get_field;
    ServiceConfig c;
    if (j.contains("host")) c.host = get_field<std::string>(j, "host", where);
    if (j.contains("port")) c.port = get_field<std::uint16_t>(j, "port", where);
    if (j.contains("dt")) c.default_dt = get_field<double>(j, "dt", where);
    if (j.contains("queue_capacity")) c.queue_capacity = get_field<std::size_t>(j, "queue_capacity", where);
    if (j.contains("session_cap")) c.session_cap = get_field<std::size_t>(j, "session_cap", where);
    if (j.contains("recording_cap")) c.recording_cap = get_field<std::size_t>(j, "recording_cap", where);
    if (j.contains("wav_store_cap")) c.wav_store_cap = get_field<std::size_t>(j, "wav_store_cap", where);
    if (j.contains("idle_timeout")) c.idle_timeout = get_field<double>(j, "idle_timeout", where);
    return c;
}

/// Overrides from QEYBOARD_PORT, QEYBOARD_DT, QEYBOARD_QUEUE_CAPACITY and
/// QEYBOARD_SESSION_CAP. `getenv` is injectable for tests.
inline void apply_env_overrides(ServiceConfig &c,
                                const std::function<const char *(const char *)> &getenv = [](const char *k) {
                                    return std::getenv(k);
                                }) {
    auto num = [&](const char *key, auto &dst) {
        const char *v = getenv(key);
        if (!v) {
            return;
        }
        try {
            std::size_t used = 0;
            const std::string s(v);
            const double d = std::stod(s, &used);
            if (used != s.size()) {
                throw std::invalid_argument("trailing characters");
            }
            using T = std::decay_t<decltype(dst)>;
            if constexpr (std::is_integral_v<T>) {
                if (d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d)) ||
                    d > static_cast<double>(std::numeric_limits<T>::max())) {
                    throw std::invalid_argument("not a valid count");
                }
            }
            dst = static_cast<std::decay_t<decltype(dst)>>(d);
        } catch (const std::exception &) {
            throw std::invalid_argument(std::string("bad value for ") + key + ": '" + v + "'");
        }
    };
    num("QEYBOARD_PORT", c.port);
    num("QEYBOARD_DT", c.default_dt);
    num("QEYBOARD_QUEUE_CAPACITY", c.queue_capacity);
    num("QEYBOARD_SESSION_CAP", c.session_cap);
}

inline ServiceConfig load_service_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return service_config_from_json(j);
}

}  // namespace qeyboard::service

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

// Mono 16-bit PCM RIFF/WAVE.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qeyboard/sonify.hpp"

namespace qeyboard {

/// round(v * 32767), clamped to [-32767, 32767].
inline std::int16_t encode_sample(double v) {
    const double scaled = std::round(std::clamp(v, -1.0, 1.0) * 32767.0);
    return static_cast<std::int16_t>(scaled);
}

inline std::vector<std::uint8_t> encode_wav(const Waveform &w) {
    const auto rate = static_cast<std::uint32_t>(std::lround(w.sample_rate));
    if (rate == 0) {
        throw std::invalid_argument("sample rate must be positive");
    }
    const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    auto tag = [&](const char *s) { out.insert(out.end(), s, s + 4); };
    auto u32 = [&](std::uint32_t v) {
        for (int b = 0; b < 4; ++b) {
            out.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xff));
        }
    };
    auto u16 = [&](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    tag("RIFF");
    u32(36 + data_bytes);
    tag("WAVE");
    tag("fmt ");
    u32(16);        // PCM fmt chunk size
    u16(1);         // PCM
    u16(1);         // mono
    u32(rate);
    u32(rate * 2);  // byte rate
    u16(2);         // block align
    u16(16);        // bits per sample
    tag("data");
    u32(data_bytes);
    for (double v : w.samples) {
        u16(static_cast<std::uint16_t>(encode_sample(v)));
    }
    return out;
}

inline void write_bytes(const std::filesystem::path &path, const std::vector<std::uint8_t> &bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    f.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

inline void write_wav(const Waveform &w, const std::filesystem::path &path) { write_bytes(path, encode_wav(w)); }

/// Reads back files produced by encode_wav (mono 16-bit PCM only).
inline Waveform decode_wav(const std::vector<std::uint8_t> &bytes) {
    auto u32 = [&](std::size_t at) {
        return static_cast<std::uint32_t>(bytes.at(at)) | (static_cast<std::uint32_t>(bytes.at(at + 1)) << 8) |
               (static_cast<std::uint32_t>(bytes.at(at + 2)) << 16) |
               (static_cast<std::uint32_t>(bytes.at(at + 3)) << 24);
    };
    auto u16 = [&](std::size_t at) {
        return static_cast<std::uint16_t>(bytes.at(at) | (bytes.at(at + 1) << 8));
    };
    if (bytes.size() < 44 || std::string(bytes.begin(), bytes.begin() + 4) != "RIFF" ||
        std::string(bytes.begin() + 8, bytes.begin() + 12) != "WAVE") {
        throw std::invalid_argument("not a RIFF/WAVE file");
    }
    if (u16(20) != 1 || u16(22) != 1 || u16(34) != 16) {
        throw std::invalid_argument("only mono 16-bit PCM is supported");
    }
    Waveform w;
    w.sample_rate = u32(24);
    const auto n = u32(40) / 2;
    w.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        w.samples[k] = static_cast<std::int16_t>(u16(44 + 2 * k)) / 32767.0;
    }
    return w;
}

}  // namespace qeyboard

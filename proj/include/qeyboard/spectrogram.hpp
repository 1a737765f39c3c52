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

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "qeyboard/sonify.hpp"

namespace qeyboard {

/// Hann-windowed short-time magnitude spectrum; rows are frames, columns
/// bins 0..window/2.
struct Spectrogram {
    std::size_t window = 0;
    std::size_t hop = 0;
    double sample_rate = 0.0;
    std::vector<std::vector<double>> magnitudes;

    double bin_frequency(std::size_t bin) const {
        return static_cast<double>(bin) * sample_rate / static_cast<double>(window);
    }

    std::size_t argmax_bin(std::size_t frame) const {
        const auto &row = magnitudes.at(frame);
        return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
};

inline Spectrogram spectrogram(const Waveform &w, std::size_t window_len, std::size_t hop) {
    if (window_len < 2 || !std::has_single_bit(window_len)) {
        throw std::invalid_argument("window length must be a power of two >= 2");
    }
    if (hop < 1) {
        throw std::invalid_argument("hop must be at least 1");
    }
    if (window_len > w.samples.size()) {
        throw std::invalid_argument("window longer than signal");
    }
    std::vector<double> hann(window_len);
    for (std::size_t n = 0; n < window_len; ++n) {
        hann[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                        static_cast<double>(window_len)));
    }
    Spectrogram out;
    out.window = window_len;
    out.hop = hop;
    out.sample_rate = w.sample_rate;
    Eigen::FFT<double> fft;
    std::vector<double> frame(window_len);
    std::vector<std::complex<double>> bins;
    for (std::size_t start = 0; start + window_len <= w.samples.size(); start += hop) {
        for (std::size_t n = 0; n < window_len; ++n) {
            frame[n] = w.samples[start + n] * hann[n];
        }
        fft.fwd(bins, frame);
        std::vector<double> mags(window_len / 2 + 1);
        for (std::size_t k = 0; k < mags.size(); ++k) {
            mags[k] = std::abs(bins[k]);
        }
        out.magnitudes.push_back(std::move(mags));
    }
    return out;
}

/// Rows = frames, columns = bins; header row lists bin frequencies in Hz.
inline void write_spectrogram_csv(std::ostream &os, const Spectrogram &s) {
    const auto old = os.precision(10);
    os << "frame_start_s";
    for (std::size_t k = 0; k <= s.window / 2; ++k) {
        os << ',' << s.bin_frequency(k);
    }
    os << '\n';
    for (std::size_t r = 0; r < s.magnitudes.size(); ++r) {
        os << static_cast<double>(r * s.hop) / s.sample_rate;
        for (double m : s.magnitudes[r]) {
            os << ',' << m;
        }
        os << '\n';
    }
    os.precision(old);
}

}  // namespace qeyboard

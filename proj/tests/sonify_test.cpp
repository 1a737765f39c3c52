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

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "qeyboard/sonify.hpp"
#include "qeyboard/spectrogram.hpp"
#include "qeyboard/wav.hpp"

using namespace qeyboard;

namespace {

std::vector<SoundFeatureFrame> constant_tone(double f, double i, double seconds) {
    return {{0.0, {{f, i}}}, {seconds, {{f, i}}}};
}

}  // namespace

TEST(frequency_map, affine_endpoints) {
    const auto m = FrequencyMap::affine(220, 880);
    EXPECT_DOUBLE_EQ(map_frequency(0.0, m), 220);
    EXPECT_DOUBLE_EQ(map_frequency(1.0, m), 880);
    EXPECT_DOUBLE_EQ(map_frequency(0.5, m), 550);
    EXPECT_DOUBLE_EQ(map_frequency(1.0 + 1e-12, m), 880);
    EXPECT_THROW(map_frequency(1.1, m), std::invalid_argument);
}

TEST(frequency_map, multiplicative_and_scale) {
    EXPECT_NEAR(map_frequency(4.0, FrequencyMap::multiplicative(523.26)), 2093.04, 1e-9);
    EXPECT_THROW(map_frequency(-0.5, FrequencyMap::multiplicative(523.26)), std::invalid_argument);
    const auto s = FrequencyMap::fixed_scale(c_major_scale());
    EXPECT_DOUBLE_EQ(map_frequency(0.0, s), 261.63);
    EXPECT_DOUBLE_EQ(map_frequency(1.0, s), 523.25);
    EXPECT_DOUBLE_EQ(map_frequency(0.5, s), 392.00);  // round(3.5) = 4
    EXPECT_THROW(FrequencyMap::fixed_scale({440, 220}).validate(), std::invalid_argument);
}

TEST(interpolation, moving_average_example) {
    const std::vector<double> v{0, 1, 0, 1, 0};
    const auto m = moving_average(v, 3);
    EXPECT_DOUBLE_EQ(m[1], 1.0 / 3);
    EXPECT_DOUBLE_EQ(m[2], 2.0 / 3);
    EXPECT_DOUBLE_EQ(m[3], 1.0 / 3);
    EXPECT_DOUBLE_EQ(m[0], 0.5);  // shrunken window at the edge
    EXPECT_DOUBLE_EQ(m[4], 0.5);
    EXPECT_THROW(moving_average(v, 2), std::invalid_argument);
}

TEST(interpolation, linear_between_frames) {
    std::vector<SoundFeatureFrame> frames{{0.0, {{100, 0}}}, {1.0, {{200, 1}}}, {2.0, {{100, 0}}}};
    FeatureCurves c(frames);
    EXPECT_DOUBLE_EQ(c.frequency(0, 0.25), 125);
    EXPECT_DOUBLE_EQ(c.intensity(0, 1.5), 0.5);
    EXPECT_DOUBLE_EQ(c.frequency(0, 5.0), 100);  // held
    std::vector<SoundFeatureFrame> bad{{0.0, {{100, 0}}}, {0.0, {{200, 1}}}};
    EXPECT_THROW(FeatureCurves{bad}, std::invalid_argument);
}

TEST(synthesis, literal_sample_hits_peak) {
    // sample 10 at 17600 Hz is t = 1/1760 s, where sin(2 pi 440 t) = 1
    const auto w = synthesize(FeatureCurves(constant_tone(440, 1, 1.0)), 0.01, 17600);
    EXPECT_NEAR(w.samples[10], 1.0, 1e-12);
    EXPECT_EQ(w.normalization, 1.0);
}

TEST(synthesis, identical_sounds_normalize_to_one) {
    std::vector<SoundFeatureFrame> frames{{0.0, {{440, 1}, {440, 1}}}, {1.0, {{440, 1}, {440, 1}}}};
    const auto w = render_frames(frames);
    double peak = 0;
    for (double v : w.samples) {
        peak = std::max(peak, std::abs(v));
    }
    EXPECT_NEAR(peak, 1.0, 1e-12);
    EXPECT_GT(w.normalization, 1.9);
}

TEST(synthesis, zero_intensity_is_silent) {
    const auto w = render_frames(constant_tone(440, 0, 0.5));
    for (double v : w.samples) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(synthesis, accumulated_phase_matches_constant_frequency) {
    const auto a = render_frames(constant_tone(330, 0.8, 0.2), {44100, PhaseMode::Accumulated, {}, {}});
    const auto l = render_frames(constant_tone(330, 0.8, 0.2), {44100, PhaseMode::Literal, {}, {}});
    ASSERT_EQ(a.samples.size(), l.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        EXPECT_NEAR(a.samples[k], l.samples[k], 1e-9);
    }
}

TEST(synthesis, random_streams_never_clip) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> f(20, 4000), in(0, 3), dt(0.01, 0.2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n_sounds = 1 + rng() % 6;
        std::vector<SoundFeatureFrame> frames;
        double t = 0;
        for (int k = 0; k < 5; ++k) {
            SoundFeatureFrame fr{t, {}};
            for (std::size_t s = 0; s < n_sounds; ++s) {
                fr.features.push_back({f(rng), in(rng)});
            }
            frames.push_back(fr);
            t += dt(rng);
        }
        const auto mode = trial % 2 ? PhaseMode::Accumulated : PhaseMode::Literal;
        const auto w = render_frames(frames, {8000, mode, {}, {}});
        for (double v : w.samples) {
            ASSERT_LE(std::abs(v), 1.0);
        }
    }
}

TEST(wav, header_and_round_trip) {
    Waveform w{8000, {0.0, 1.0, -1.0, 0.5, -0.25}, 1.0};
    const auto bytes = encode_wav(w);
    ASSERT_EQ(bytes.size(), 44u + 2 * w.samples.size());
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "RIFF");
    EXPECT_EQ(std::string(bytes.begin() + 8, bytes.begin() + 12), "WAVE");
    EXPECT_EQ(bytes[22], 1);   // mono
    EXPECT_EQ(bytes[34], 16);  // bits per sample
    EXPECT_EQ(encode_sample(1.0), 32767);
    EXPECT_EQ(encode_sample(-1.0), -32767);
    EXPECT_EQ(encode_sample(0.5), 16384);
    const auto back = decode_wav(bytes);
    EXPECT_EQ(back.sample_rate, 8000);
    ASSERT_EQ(back.samples.size(), w.samples.size());
    for (std::size_t k = 0; k < w.samples.size(); ++k) {
        EXPECT_NEAR(back.samples[k], w.samples[k], 1.0 / 32767);
    }
    // little endian: 1.0 -> 0x7fff -> ff 7f
    EXPECT_EQ(bytes[46], 0xff);
    EXPECT_EQ(bytes[47], 0x7f);
}

TEST(spectrogram, pure_tone_lands_in_bin_41) {
    const auto w = render_frames(constant_tone(440, 1, 1.0));
    const auto s = spectrogram(w, 4096, 1024);
    ASSERT_FALSE(s.magnitudes.empty());
    for (std::size_t f = 0; f < s.magnitudes.size(); ++f) {
        EXPECT_EQ(s.argmax_bin(f), 41u);
    }
    EXPECT_NEAR(s.bin_frequency(41), 440.0, 44100.0 / 4096);
    EXPECT_THROW(spectrogram(w, 1000, 10), std::invalid_argument);
    Waveform tiny{44100, std::vector<double>(100, 0.0), 1.0};
    EXPECT_THROW(spectrogram(tiny, 4096, 1024), std::invalid_argument);
}

TEST(csv, features_columns) {
    std::ostringstream os;
    std::vector<SoundFeatureFrame> frames{{0.0, {{100, 0}, {200, 1}}}, {0.1, {{110, 0.5}, {210, 1}}}};
    write_features_csv(os, frames);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,f_0,i_0,f_1,i_1");
}

TEST(spectrum_features, one_track_per_level) {
    std::vector<SpectrumPoint> sweep{{0.0, {-3, -1, 1, 3}, {1, 0.5, -0.5, -1}}, {1.0, {-4, -2, 2, 4}, {0.2, 0, 0, -0.2}}};
    const auto frames = spectrum_to_features(sweep, 200, 800, 0.5);
    ASSERT_EQ(frames.size(), 2u);
    ASSERT_EQ(frames[0].features.size(), 4u);
    EXPECT_DOUBLE_EQ(frames[1].features[0].frequency, 200);
    EXPECT_DOUBLE_EQ(frames[1].features[3].frequency, 800);
    EXPECT_DOUBLE_EQ(frames[0].features[3].intensity, 1.0);  // |M|
    EXPECT_DOUBLE_EQ(frames[1].t, 0.5);
    EXPECT_DOUBLE_EQ(energy_to_frequency(1, 1, 1, 200, 800), 500);
}

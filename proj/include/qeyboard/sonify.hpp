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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qeyboard {

// ---------------------------------------------------------------------------
// Feature frames

struct SoundFeature {
    double frequency = 0.0;  // Hz
    double intensity = 0.0;  // unitless, >= 0

    friend bool operator==(const SoundFeature &, const SoundFeature &) = default;
};

/// Features of all N_S sounds at one measurement time.
struct SoundFeatureFrame {
    double t = 0.0;  // seconds
    std::vector<SoundFeature> features;

    friend bool operator==(const SoundFeatureFrame &, const SoundFeatureFrame &) = default;
};

/// Equal-temperament C4..C5 major scale; one note per quantum string.
inline const std::vector<double> &c_major_scale() {
    static const std::vector<double> scale{261.63, 293.66, 329.63, 349.23, 392.00, 440.00, 493.88, 523.25};
    return scale;
}

// ---------------------------------------------------------------------------
// Frequency maps

enum class FrequencyMode { Affine, Multiplicative, FixedScale };

inline std::string_view to_string(FrequencyMode m) {
    switch (m) {
    case FrequencyMode::Affine:
        return "affine";
    case FrequencyMode::Multiplicative:
        return "multiplicative";
    case FrequencyMode::FixedScale:
        return "fixed-scale";
    }
    return "?";
}

inline FrequencyMode frequency_mode_from_string(std::string_view s) {
    if (s == "affine" || s == "linear") {
        return FrequencyMode::Affine;
    }
    if (s == "multiplicative") {
        return FrequencyMode::Multiplicative;
    }
    if (s == "fixed-scale" || s == "scale") {
        return FrequencyMode::FixedScale;
    }
    throw std::invalid_argument("unknown frequency map mode '" + std::string(s) + "'");
}

struct FrequencyMap {
    FrequencyMode mode = FrequencyMode::Affine;
    double f0 = 220.0;
    double f1 = 880.0;               // affine only
    std::vector<double> scale_table;  // fixed-scale only

    static FrequencyMap affine(double f0, double f1) { return {FrequencyMode::Affine, f0, f1, {}}; }
    static FrequencyMap multiplicative(double f0) { return {FrequencyMode::Multiplicative, f0, f0, {}}; }
    static FrequencyMap fixed_scale(std::vector<double> table) {
        const double first = table.empty() ? 0.0 : table.front();
        return {FrequencyMode::FixedScale, first, first, std::move(table)};
    }

    void validate() const {
        switch (mode) {
        case FrequencyMode::Affine:
            if (!(f0 > 0 && f1 > 0)) {
                throw std::invalid_argument("affine frequency map needs f0, f1 > 0");
            }
            break;
        case FrequencyMode::Multiplicative:
            if (!(f0 > 0)) {
                throw std::invalid_argument("multiplicative frequency map needs f0 > 0");
            }
            break;
        case FrequencyMode::FixedScale:
            if (scale_table.empty()) {
                throw std::invalid_argument("fixed-scale frequency map needs a scale table");
            }
            for (std::size_t k = 0; k < scale_table.size(); ++k) {
                if (!(scale_table[k] > 0) || (k && !(scale_table[k] > scale_table[k - 1]))) {
                    throw std::invalid_argument("scale table must be positive and strictly increasing");
                }
            }
            break;
        }
    }
};

/// Values this far outside the contract are clamped instead of rejected.
inline constexpr double kExpvalSlack = 1e-9;

/// affine: f0 + (f1 - f0) * expval, expval in [0, 1]
/// multiplicative: f0 * expval, expval >= 0
/// fixed-scale: nearest scale degree to expval * (size - 1), expval in [0, 1]
inline double map_frequency(double expval, const FrequencyMap &map) {
    map.validate();
    if (!std::isfinite(expval)) {
        throw std::invalid_argument("expectation value is not finite");
    }
    switch (map.mode) {
    case FrequencyMode::Affine:
    case FrequencyMode::FixedScale:
        if (expval < -kExpvalSlack || expval > 1.0 + kExpvalSlack) {
            throw std::invalid_argument("expectation value " + std::to_string(expval) + " outside [0, 1]");
        }
        expval = std::clamp(expval, 0.0, 1.0);
        if (map.mode == FrequencyMode::Affine) {
            return map.f0 + (map.f1 - map.f0) * expval;
        } else {
            const auto n = map.scale_table.size();
            const auto idx = static_cast<std::size_t>(std::lround(expval * static_cast<double>(n - 1)));
            return map.scale_table[idx];
        }
    case FrequencyMode::Multiplicative:
        if (expval < -kExpvalSlack) {
            throw std::invalid_argument("expectation value " + std::to_string(expval) + " is negative");
        }
        return map.f0 * std::max(expval, 0.0);
    }
    return map.f0;
}

// ---------------------------------------------------------------------------
// Interpolation

/// Centered moving average over `window` samples (odd); windows shrink at the ends.
inline std::vector<double> moving_average(std::span<const double> values, int window) {
    if (window < 1 || window % 2 == 0) {
        throw std::invalid_argument("smoothing window must be a positive odd number");
    }
    const auto n = static_cast<std::ptrdiff_t>(values.size());
    const std::ptrdiff_t half = window / 2;
    std::vector<double> out(values.size());
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const auto lo = std::max<std::ptrdiff_t>(0, k - half);
        const auto hi = std::min<std::ptrdiff_t>(n - 1, k + half);
        double s = 0.0;
        for (auto j = lo; j <= hi; ++j) {
            s += values[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(k)] = s / static_cast<double>(hi - lo + 1);
    }
    return out;
}

enum class InterpolationMode { Linear, Smoothed };

inline std::string_view to_string(InterpolationMode m) { return m == InterpolationMode::Linear ? "linear" : "smoothed"; }

inline InterpolationMode interpolation_mode_from_string(std::string_view s) {
    if (s == "linear") {
        return InterpolationMode::Linear;
    }
    if (s == "smoothed") {
        return InterpolationMode::Smoothed;
    }
    throw std::invalid_argument("unknown interpolation mode '" + std::string(s) + "'");
}

struct Interpolation {
    InterpolationMode mode = InterpolationMode::Linear;
    int window = 3;  // smoothed only
};

/// Continuous per-sound frequency and intensity functions built from frames.
/// Piecewise linear between frame times (after optional smoothing of the
/// frame values); held constant outside [t_first, t_last].
class FeatureCurves {
  public:
    FeatureCurves(std::span<const SoundFeatureFrame> frames, Interpolation interp = {}) {
        if (frames.size() < 2) {
            throw std::invalid_argument("interpolation needs at least two frames");
        }
        const auto n_sounds = frames.front().features.size();
        times_.reserve(frames.size());
        freq_.assign(n_sounds, {});
        inten_.assign(n_sounds, {});
        for (std::size_t k = 0; k < frames.size(); ++k) {
            const auto &f = frames[k];
            if (!std::isfinite(f.t) || f.t < 0) {
                throw std::invalid_argument("frame time must be finite and nonnegative");
            }
            if (k && !(f.t > frames[k - 1].t)) {
                throw std::invalid_argument("frame times must be strictly increasing (frame " + std::to_string(k) +
                                            ")");
            }
            if (f.features.size() != n_sounds) {
                throw std::invalid_argument("frames disagree on the number of sounds");
            }
            times_.push_back(f.t);
            for (std::size_t s = 0; s < n_sounds; ++s) {
                freq_[s].push_back(f.features[s].frequency);
                inten_[s].push_back(f.features[s].intensity);
            }
        }
        if (interp.mode == InterpolationMode::Smoothed) {
            for (std::size_t s = 0; s < n_sounds; ++s) {
                freq_[s] = moving_average(freq_[s], interp.window);
                inten_[s] = moving_average(inten_[s], interp.window);
            }
        }
    }

    std::size_t n_sounds() const { return freq_.size(); }
    double t_first() const { return times_.front(); }
    double t_last() const { return times_.back(); }
    std::span<const double> times() const { return times_; }

    double frequency(std::size_t sound, double t) const { return eval(freq_.at(sound), t); }
    double intensity(std::size_t sound, double t) const { return eval(inten_.at(sound), t); }

  private:
    double eval(const std::vector<double> &v, double t) const {
        if (t <= times_.front()) {
            return v.front();
        }
        if (t >= times_.back()) {
            return v.back();
        }
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const auto hi = static_cast<std::size_t>(it - times_.begin());
        const auto lo = hi - 1;
        const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
        return v[lo] + (v[hi] - v[lo]) * w;
    }

    std::vector<double> times_;
    std::vector<std::vector<double>> freq_;
    std::vector<std::vector<double>> inten_;
};

// ---------------------------------------------------------------------------
// Synthesis

struct Waveform {
    double sample_rate = 44100.0;
    std::vector<double> samples;   // in [-1, 1]
    double normalization = 1.0;    // the divisor that was applied

    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

enum class PhaseMode {
    Literal,      // sin(2 pi f(t) t), exactly as the additive formula is written
    Accumulated,  // sin(phi(t)), phi(t) = 2 pi * integral of f (trapezoidal)
};

inline std::string_view to_string(PhaseMode m) { return m == PhaseMode::Literal ? "literal" : "accumulated"; }

inline PhaseMode phase_mode_from_string(std::string_view s) {
    if (s == "literal") {
        return PhaseMode::Literal;
    }
    if (s == "accumulated") {
        return PhaseMode::Accumulated;
    }
    throw std::invalid_argument("unknown phase mode '" + std::string(s) + "'");
}

/// w(t) = (1/N) sum_s i_s(t) sin(phase_s(t)), sampled at k / sample_rate for
/// k in [0, round(duration * sample_rate)). Curves are queried at
/// `t_offset + t`; N is the peak |w| when it exceeds 1, else 1.
inline Waveform synthesize(const FeatureCurves &curves, double duration, double sample_rate,
                           PhaseMode phase_mode = PhaseMode::Literal, double t_offset = 0.0) {
    if (!(duration > 0) || !std::isfinite(duration)) {
        throw std::invalid_argument("duration must be positive");
    }
    if (!(sample_rate > 0) || !std::isfinite(sample_rate)) {
        throw std::invalid_argument("sample rate must be positive");
    }
    const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
    Waveform w;
    w.sample_rate = sample_rate;
    w.samples.assign(n, 0.0);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double dt = 1.0 / sample_rate;
    for (std::size_t s = 0; s < curves.n_sounds(); ++s) {
        double cycles = 0.0;  // integral of f, in cycles
        double f_prev = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) / sample_rate;
            const double f = curves.frequency(s, t_offset + t);
            const double amp = curves.intensity(s, t_offset + t);
            double phase;
            if (phase_mode == PhaseMode::Literal) {
                phase = two_pi * f * t;
            } else {
                if (k) {
                    cycles += 0.5 * (f_prev + f) * dt;
                }
                phase = two_pi * cycles;
                f_prev = f;
            }
            w.samples[k] += amp * std::sin(phase);
        }
    }
    double peak = 0.0;
    for (double v : w.samples) {
        peak = std::max(peak, std::abs(v));
    }
    if (peak > 1.0) {
        w.normalization = peak;
        for (auto &v : w.samples) {
            v /= peak;
        }
    }
    return w;
}

struct RenderOptions {
    double sample_rate = 44100.0;
    PhaseMode phase_mode = PhaseMode::Literal;
    Interpolation interpolation{};
    std::optional<double> duration;  // defaults to t_last - t_first
};

/// Interpolate + synthesize over [t_first, t_first + duration]; waveform time starts at 0.
inline Waveform render_frames(std::span<const SoundFeatureFrame> frames, const RenderOptions &opts = {}) {
    FeatureCurves curves(frames, opts.interpolation);
    const double duration = opts.duration.value_or(curves.t_last() - curves.t_first());
    return synthesize(curves, duration, opts.sample_rate, opts.phase_mode, curves.t_first());
}

// ---------------------------------------------------------------------------
// Spectrum sonification

/// One point of a parameter sweep: energies E_k and magnetizations M_k.
struct SpectrumPoint {
    double h = 0.0;
    std::vector<double> energies;
    std::vector<double> magnetizations;
};

enum class IntensityRule {
    AbsMagnetization,      // i_k = |M_k|
    ShiftedMagnetization,  // i_k = (M_k + 1) / 2
    Constant,              // i_k = 1
};

inline IntensityRule intensity_rule_from_string(std::string_view s) {
    if (s == "abs") {
        return IntensityRule::AbsMagnetization;
    }
    if (s == "shifted") {
        return IntensityRule::ShiftedMagnetization;
    }
    if (s == "constant") {
        return IntensityRule::Constant;
    }
    throw std::invalid_argument("unknown intensity rule '" + std::string(s) + "'");
}

/// Affine map of [e_min, e_max] onto [f_lo, f_hi]; a degenerate range maps to the midpoint.
inline double energy_to_frequency(double e, double e_min, double e_max, double f_lo, double f_hi) {
    if (!(e_max > e_min)) {
        return 0.5 * (f_lo + f_hi);
    }
    return f_lo + (f_hi - f_lo) * (e - e_min) / (e_max - e_min);
}

/// One frame per sweep point at t = index * seconds_per_step; track k plays E_k.
inline std::vector<SoundFeatureFrame> spectrum_to_features(std::span<const SpectrumPoint> sweep, double f_lo,
                                                           double f_hi, double seconds_per_step,
                                                           IntensityRule rule = IntensityRule::AbsMagnetization) {
    if (sweep.empty()) {
        throw std::invalid_argument("empty sweep");
    }
    if (!(f_lo > 0 && f_lo < f_hi)) {
        throw std::invalid_argument("frequency range must satisfy 0 < f_lo < f_hi");
    }
    if (!(seconds_per_step > 0)) {
        throw std::invalid_argument("seconds per step must be positive");
    }
    double e_min = std::numeric_limits<double>::infinity();
    double e_max = -std::numeric_limits<double>::infinity();
    const auto n_tracks = sweep.front().energies.size();
    for (const auto &p : sweep) {
        if (p.energies.size() != n_tracks) {
            throw std::invalid_argument("sweep points disagree on the number of levels");
        }
        if (rule != IntensityRule::Constant && p.magnetizations.size() != n_tracks) {
            throw std::invalid_argument("sweep point lacks magnetizations");
        }
        for (double e : p.energies) {
            e_min = std::min(e_min, e);
            e_max = std::max(e_max, e);
        }
    }
    std::vector<SoundFeatureFrame> frames;
    frames.reserve(sweep.size());
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        SoundFeatureFrame f;
        f.t = static_cast<double>(i) * seconds_per_step;
        for (std::size_t k = 0; k < n_tracks; ++k) {
            double inten = 1.0;
            if (rule == IntensityRule::AbsMagnetization) {
                inten = std::abs(sweep[i].magnetizations[k]);
            } else if (rule == IntensityRule::ShiftedMagnetization) {
                inten = 0.5 * (sweep[i].magnetizations[k] + 1.0);
            }
            f.features.push_back({energy_to_frequency(sweep[i].energies[k], e_min, e_max, f_lo, f_hi), inten});
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

// ---------------------------------------------------------------------------
// CSV

/// Columns: t, f_0, i_0, f_1, i_1, ...
inline void write_features_csv(std::ostream &os, std::span<const SoundFeatureFrame> frames) {
    const auto n = frames.empty() ? 0 : frames.front().features.size();
    os << "t";
    for (std::size_t s = 0; s < n; ++s) {
        os << ",f_" << s << ",i_" << s;
    }
    os << '\n';
    const auto old = os.precision(17);
    for (const auto &f : frames) {
        os << f.t;
        for (const auto &x : f.features) {
            os << ',' << x.frequency << ',' << x.intensity;
        }
        os << '\n';
    }
    os.precision(old);
}

}  // namespace qeyboard

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

// VQE and VQD with a sequential sinusoidal (Nakanishi-Fujii-Todo) optimizer.
//
// The ansatz is L layers of [RY on every qubit, CNOT chain i -> i+1] followed
// by a final RY layer. Every parameter enters through a single RY, so the
// objective restricted to one parameter is a*cos(theta - b) + c.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <vector>

#include "qeyboard/ising.hpp"
#include "qeyboard/observables.hpp"
#include "qeyboard/qsim.hpp"
#include "qeyboard/sonify.hpp"

namespace qeyboard {

struct Ansatz {
    int n_qubits = 1;
    int n_layers = 1;

    /// N*(L+1)
    std::size_t n_params() const { return static_cast<std::size_t>(n_qubits) * static_cast<std::size_t>(n_layers + 1); }

    void validate() const {
        check_qubit_count(n_qubits);
        if (n_layers < 0) {
            throw std::invalid_argument("ansatz layer count must be nonnegative");
        }
    }

    /// Layers default to the qubit count.
    static Ansatz for_qubits(int n_qubits, std::optional<int> n_layers = std::nullopt) {
        Ansatz a{n_qubits, n_layers.value_or(n_qubits)};
        a.validate();
        return a;
    }

    Circuit circuit(std::span<const double> theta) const {
        check(theta);
        Circuit c(n_qubits);
        std::size_t k = 0;
        for (int l = 0; l <= n_layers; ++l) {
            for (int q = 0; q < n_qubits; ++q) {
                c.add({"", GateKind::RY, {q}, theta[k++]});
            }
            if (l < n_layers) {
                for (int q = 0; q + 1 < n_qubits; ++q) {
                    c.add({"", GateKind::CNOT, {q, q + 1}, std::nullopt});
                }
            }
        }
        return c;
    }

    void check(std::span<const double> theta) const {
        if (theta.size() != n_params()) {
            throw std::invalid_argument("ansatz takes " + std::to_string(n_params()) + " parameters, got " +
                                        std::to_string(theta.size()));
        }
    }
};

inline Statevector prepare_ansatz_state(const Ansatz &ansatz, std::span<const double> theta) {
    ansatz.check(theta);
    Statevector s(ansatz.n_qubits);
    std::size_t k = 0;
    for (int l = 0; l <= ansatz.n_layers; ++l) {
        for (int q = 0; q < ansatz.n_qubits; ++q) {
            const double c = std::cos(theta[k] / 2);
            const double sn = std::sin(theta[k] / 2);
            ++k;
            s.apply_1q(q, {Complex(c), Complex(-sn), Complex(sn), Complex(c)});
        }
        if (l < ansatz.n_layers) {
            for (int q = 0; q + 1 < ansatz.n_qubits; ++q) {
                s.apply_cnot(q, q + 1);
            }
        }
    }
    return s;
}

/// A previously found state and its deflation weight.
struct Prior {
    Statevector state;
    double beta = 0.0;
};

/// <H> + sum_j beta_j |<psi|psi_j>|^2
inline double deflated_value(const Statevector &psi, double energy, std::span<const Prior> priors) {
    double v = energy;
    for (const auto &p : priors) {
        v += p.beta * std::norm(psi.inner(p.state));
    }
    return v;
}

inline double objective(const Observable &H, std::span<const Prior> priors, const Ansatz &ansatz,
                        std::span<const double> theta) {
    const auto psi = prepare_ansatz_state(ansatz, theta);
    return deflated_value(psi, expectation(psi, H), priors);
}

// ---------------------------------------------------------------------------
// NFT coordinate step

struct NftStep {
    double theta = 0.0;      // new value of the parameter
    double amplitude = 0.0;  // a
    double phase = 0.0;      // b, in (-pi, pi]
    double offset = 0.0;     // c
    double predicted = 0.0;  // c - a, or E(theta_j) when flat
    std::array<double, 3> evaluations{};  // at theta_j, theta_j + pi/2, theta_j - pi/2
};

inline constexpr double kNftFlatAmplitude = 1e-12;

inline double wrap_angle(double x) {
    constexpr double two_pi = 2 * std::numbers::pi;
    double r = std::remainder(x, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) {
        r += two_pi;
    }
    return r;
}

/// Fits a*cos(theta_j - b) + c from three evaluations and moves theta_j to the
/// minimum b + pi. A flat objective (a < 1e-12) leaves theta_j unchanged.
/// `evaluator` must not keep references to its argument.
inline NftStep nft_parameter_update(const std::function<double(std::span<const double>)> &evaluator,
                                    std::vector<double> &theta, std::size_t j) {
    if (j >= theta.size()) {
        throw std::out_of_range("parameter index out of range");
    }
    const double t0 = theta[j];
    NftStep step;
    step.evaluations[0] = evaluator(theta);
    theta[j] = t0 + std::numbers::pi / 2;
    step.evaluations[1] = evaluator(theta);
    theta[j] = t0 - std::numbers::pi / 2;
    step.evaluations[2] = evaluator(theta);
    theta[j] = t0;
    for (double e : step.evaluations) {
        if (!std::isfinite(e)) {
            throw std::domain_error("objective returned a non-finite value");
        }
    }
    const auto [e0, ep, em] = step.evaluations;
    step.offset = 0.5 * (ep + em);
    const double x = e0 - step.offset;
    const double y = 0.5 * (em - ep);
    step.amplitude = std::hypot(x, y);
    if (step.amplitude < kNftFlatAmplitude) {
        step.theta = t0;
        step.phase = 0.0;
        step.predicted = e0;
        return step;
    }
    step.phase = wrap_angle(t0 - std::atan2(y, x));
    step.theta = step.phase + std::numbers::pi;
    step.predicted = step.offset - step.amplitude;
    theta[j] = step.theta;
    return step;
}

// ---------------------------------------------------------------------------
// Traces

struct TraceRecord {
    int level = 0;
    int start = 0;
    std::int64_t iteration = 0;  // strictly increasing within a level
    int param_index = -1;        // -1 for the evaluation at a start point
    double energy = 0.0;         // <H>, without deflation terms
};

struct CallbackTrace {
    std::vector<TraceRecord> records;

    std::vector<int> levels() const {
        std::set<int> s;
        for (const auto &r : records) {
            s.insert(r.level);
        }
        return {s.begin(), s.end()};
    }

    /// Only the records of the given (level, start) pairs.
    CallbackTrace filter(const std::function<bool(const TraceRecord &)> &keep) const {
        CallbackTrace t;
        std::copy_if(records.begin(), records.end(), std::back_inserter(t.records), keep);
        return t;
    }
};

/// Columns: level, iteration, param_index, energy, start
inline void write_trace_csv(std::ostream &os, const CallbackTrace &trace) {
    os << "level,iteration,param_index,energy,start\n";
    os.precision(17);
    for (const auto &r : trace.records) {
        os << r.level << ',' << r.iteration << ',' << r.param_index << ',' << r.energy << ',' << r.start << '\n';
    }
}

/// One frame per evaluation index; each level is one track. Energies map
/// affinely from the trace's [min, max] onto [f_lo, f_hi]. Levels with fewer
/// evaluations hold their last value.
inline std::vector<SoundFeatureFrame> trace_to_features(const CallbackTrace &trace, double f_lo, double f_hi,
                                                        double seconds_per_eval, double intensity = 1.0) {
    if (trace.records.empty()) {
        throw std::invalid_argument("empty trace");
    }
    if (!(f_lo > 0 && f_lo < f_hi)) {
        throw std::invalid_argument("frequency range must satisfy 0 < f_lo < f_hi");
    }
    if (!(seconds_per_eval > 0)) {
        throw std::invalid_argument("seconds per evaluation must be positive");
    }
    const auto levels = trace.levels();
    std::vector<std::vector<double>> tracks(levels.size());
    double e_min = std::numeric_limits<double>::infinity();
    double e_max = -e_min;
    for (const auto &r : trace.records) {
        const auto k = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), r.level) - levels.begin());
        tracks[k].push_back(r.energy);
        e_min = std::min(e_min, r.energy);
        e_max = std::max(e_max, r.energy);
    }
    std::size_t n = 0;
    for (const auto &t : tracks) {
        n = std::max(n, t.size());
    }
    std::vector<SoundFeatureFrame> frames(n);
    for (std::size_t i = 0; i < n; ++i) {
        frames[i].t = static_cast<double>(i) * seconds_per_eval;
        for (const auto &t : tracks) {
            const double e = t[std::min(i, t.size() - 1)];
            frames[i].features.push_back({energy_to_frequency(e, e_min, e_max, f_lo, f_hi), intensity});
        }
    }
    return frames;
}

// ---------------------------------------------------------------------------
// VQE / VQD

struct VqeConfig {
    std::optional<int> n_layers;  // default: number of qubits
    double tol = 1e-6;
    int max_sweeps = 200;
    int n_starts = 5;
    std::uint64_t seed = 0;
    std::uint64_t n_shots = 0;  // 0 = exact energies
    double readout_flip_p = 0.0;
    std::optional<double> beta;  // default 2 * one_norm(H)

    void validate() const {
        if (!(tol > 0) || max_sweeps < 1 || n_starts < 1) {
            throw std::invalid_argument("VQE needs tol > 0, max_sweeps >= 1 and n_starts >= 1");
        }
        if (beta && !(*beta > 0)) {
            throw std::invalid_argument("beta must be positive");
        }
    }
};

struct VqeResult {
    std::vector<double> theta;
    double energy = 0.0;     // <H> at theta
    double objective = 0.0;  // deflated value at theta
    bool converged = false;
    int best_start = 0;
    int sweeps = 0;
};

/// Minimizes the (optionally deflated) energy by cyclic NFT sweeps from
/// `n_starts` random points and returns the best. Every evaluation is
/// appended to `trace` under `level`.
inline VqeResult vqe_minimize(const Observable &H, const Ansatz &ansatz, const VqeConfig &cfg,
                              CallbackTrace *trace = nullptr, std::span<const Prior> priors = {}, int level = 0) {
    cfg.validate();
    ansatz.validate();
    if (H.n_qubits() != ansatz.n_qubits) {
        throw std::invalid_argument("Hamiltonian and ansatz act on different qubit counts");
    }
    // Sampled energies jitter by about ||H||_1 / sqrt(shots); a tolerance
    // below that would never trigger.
    const double tol = cfg.n_shots == 0
                           ? cfg.tol
                           : std::max(cfg.tol, H.one_norm() / std::sqrt(static_cast<double>(cfg.n_shots)));
    std::int64_t iteration = 0;
    VqeResult best;
    best.objective = std::numeric_limits<double>::infinity();
    for (int s = 0; s < cfg.n_starts; ++s) {
        auto rng = make_rng(cfg.seed, {static_cast<std::uint64_t>(level), static_cast<std::uint64_t>(s)});
        std::vector<double> theta(ansatz.n_params());
        for (auto &t : theta) {
            t = (2 * uniform01(rng) - 1) * std::numbers::pi;
        }
        int current_param = -1;
        std::uint64_t eval_count = 0;
        auto eval = [&](std::span<const double> th) {
            const auto psi = prepare_ansatz_state(ansatz, th);
            const double e =
                cfg.n_shots == 0
                    ? expectation(psi, H)
                    : estimate_expectation(psi, H, cfg.n_shots,
                                           derive_seed(cfg.seed, {static_cast<std::uint64_t>(level),
                                                                  static_cast<std::uint64_t>(s), eval_count}),
                                           cfg.readout_flip_p);
            ++eval_count;
            if (trace) {
                trace->records.push_back({level, s, iteration, current_param, e});
            }
            ++iteration;
            return deflated_value(psi, e, priors);
        };
        double last = eval(theta);
        bool converged = false;
        int sweeps = 0;
        while (sweeps < cfg.max_sweeps) {
            for (std::size_t j = 0; j < theta.size(); ++j) {
                current_param = static_cast<int>(j);
                nft_parameter_update(eval, theta, j);
            }
            ++sweeps;
            current_param = -1;
            const double now = eval(theta);
            const bool done = std::abs(now - last) < tol;
            last = now;
            if (done) {
                converged = true;
                break;
            }
        }
        const auto psi = prepare_ansatz_state(ansatz, theta);
        const double energy = expectation(psi, H);
        const double obj = deflated_value(psi, energy, priors);
        if (obj < best.objective) {
            best = {theta, energy, obj, converged, s, sweeps};
        }
    }
    return best;
}

struct VqdLevel {
    double energy = 0.0;
    std::vector<double> theta;
    Statevector state{1};
    double magnetization = 0.0;
    bool converged = false;
    int best_start = 0;
};

struct VqdResult {
    std::vector<VqdLevel> levels;  // in discovery order
    CallbackTrace trace;
    double beta = 0.0;

    /// The trace of each level's winning start only.
    CallbackTrace best_trace() const {
        return trace.filter([this](const TraceRecord &r) {
            return r.level >= 0 && static_cast<std::size_t>(r.level) < levels.size() &&
                   levels[static_cast<std::size_t>(r.level)].best_start == r.start;
        });
    }
};

/// Finds k_max levels by successive deflation with weight beta.
inline VqdResult vqd_spectrum(const Observable &H, std::size_t k_max, const VqeConfig &cfg) {
    cfg.validate();
    const int n = H.n_qubits();
    check_qubit_count(n);
    if (k_max < 1 || k_max > (std::size_t{1} << n)) {
        throw std::invalid_argument("k_max must lie in [1, 2^N]");
    }
    const auto ansatz = Ansatz::for_qubits(n, cfg.n_layers);
    VqdResult out;
    out.beta = cfg.beta.value_or(2.0 * H.one_norm());
    if (!(out.beta > 0)) {
        out.beta = 1.0;
    }
    std::vector<Prior> priors;
    for (std::size_t k = 0; k < k_max; ++k) {
        auto r = vqe_minimize(H, ansatz, cfg, &out.trace, priors, static_cast<int>(k));
        VqdLevel lvl;
        lvl.state = prepare_ansatz_state(ansatz, r.theta);
        lvl.energy = r.energy;
        lvl.theta = std::move(r.theta);
        lvl.magnetization = magnetization(lvl.state);
        lvl.converged = r.converged;
        lvl.best_start = r.best_start;
        priors.push_back({lvl.state, out.beta});
        out.levels.push_back(std::move(lvl));
    }
    return out;
}

/// VQD stand-in for exact_spectrum; levels are sorted by energy.
inline SpectrumResult vqd_ising_spectrum(const IsingParams &p, std::size_t k_max, const VqeConfig &cfg,
                                         CallbackTrace *trace = nullptr) {
    auto r = vqd_spectrum(build_hamiltonian(p), k_max, cfg);
    if (trace) {
        *trace = r.trace;
    }
    std::vector<std::size_t> order(r.levels.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return r.levels[a].energy < r.levels[b].energy; });
    SpectrumResult s;
    s.params = p;
    for (auto i : order) {
        s.eigenvalues.push_back(r.levels[i].energy);
        s.eigenstates.push_back(r.levels[i].state);
        s.magnetizations.push_back(r.levels[i].magnetization);
    }
    return s;
}

}  // namespace qeyboard

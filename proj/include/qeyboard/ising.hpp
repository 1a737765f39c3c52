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

// Transverse-field Ising chain:
//
//   H = -J sum_<ij> Z_i Z_j - h sum_i X_i - eps sum_i Z_i
//
// The eps term is an optional pinning field that picks the M = +1 branch of
// the degenerate ferromagnetic ground state.

#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qeyboard/observables.hpp"
#include "qeyboard/qsim.hpp"
#include "qeyboard/sonify.hpp"

namespace qeyboard {

enum class Boundary { Open, Periodic };

inline std::string_view to_string(Boundary b) { return b == Boundary::Open ? "open" : "periodic"; }

inline Boundary boundary_from_string(std::string_view s) {
    if (s == "open") {
        return Boundary::Open;
    }
    if (s == "periodic") {
        return Boundary::Periodic;
    }
    throw std::invalid_argument("unknown boundary '" + std::string(s) + "'");
}

/// Pinning field used for magnetization sweeps, as a fraction of |J|.
inline constexpr double kPinningFraction = 0.05;

struct IsingParams {
    int n_sites = 4;
    double J = 1.0;
    double h = 0.0;
    Boundary boundary = Boundary::Open;
    double epsilon = 0.0;

    void validate() const {
        if (n_sites < 2 || n_sites > kMaxQubits) {
            throw std::invalid_argument("Ising chain needs 2 to " + std::to_string(kMaxQubits) + " sites, got " +
                                        std::to_string(n_sites));
        }
        if (boundary == Boundary::Periodic && n_sites < 3) {
            throw std::invalid_argument("periodic boundary needs at least 3 sites");
        }
        if (!std::isfinite(J) || !std::isfinite(epsilon)) {
            throw std::invalid_argument("J and epsilon must be finite");
        }
        if (!(h >= 0) || !std::isfinite(h)) {
            throw std::invalid_argument("field h must be finite and nonnegative");
        }
    }
};

inline Observable build_hamiltonian(const IsingParams &p) {
    p.validate();
    const int n = p.n_sites;
    std::vector<PauliTerm> terms;
    const int bonds = p.boundary == Boundary::Open ? n - 1 : n;
    for (int i = 0; i < bonds; ++i) {
        std::vector<Pauli> f(n, Pauli::I);
        f[i] = Pauli::Z;
        f[(i + 1) % n] = Pauli::Z;
        terms.push_back({-p.J, PauliString(f)});
    }
    for (int i = 0; i < n; ++i) {
        terms.push_back({-p.h, PauliString::single(n, i, Pauli::X)});
    }
    for (int i = 0; i < n; ++i) {
        terms.push_back({-p.epsilon, PauliString::single(n, i, Pauli::Z)});
    }
    return Observable(n, std::move(terms));
}

/// (1/N) sum_i <Z_i>
inline double magnetization(const Statevector &state) {
    const int n = state.n_qubits();
    if (n == 0) {
        throw std::invalid_argument("magnetization of a 0-qubit state");
    }
    double acc = 0.0;
    for (std::size_t x = 0; x < state.dim(); ++x) {
        const double p = std::norm(state[x]);
        acc += p * static_cast<double>(n - 2 * std::popcount(x));
    }
    return acc / n;
}

struct SpectrumResult {
    IsingParams params;
    std::vector<double> eigenvalues;  // ascending
    std::vector<Statevector> eigenstates;
    std::vector<double> magnetizations;
};

/// Full dense diagonalization. Each eigenvector's sign is fixed so its
/// largest-magnitude component (first on ties) is positive.
inline SpectrumResult exact_spectrum(const IsingParams &p) {
    const auto H = dense_real_matrix(build_hamiltonian(p));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigensolver failed");
    }
    SpectrumResult r;
    r.params = p;
    const auto dim = H.rows();
    const auto &vecs = solver.eigenvectors();
    for (Eigen::Index k = 0; k < dim; ++k) {
        r.eigenvalues.push_back(solver.eigenvalues()(k));
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < dim; ++i) {
            if (std::abs(vecs(i, k)) > std::abs(vecs(arg, k)) + 1e-12) {
                arg = i;
            }
        }
        const double sign = vecs(arg, k) < 0 ? -1.0 : 1.0;
        std::vector<Complex> amps(static_cast<std::size_t>(dim));
        for (Eigen::Index i = 0; i < dim; ++i) {
            amps[static_cast<std::size_t>(i)] = sign * vecs(i, k);
        }
        r.eigenstates.push_back(Statevector::from_amplitudes(std::move(amps)));
        r.magnetizations.push_back(magnetization(r.eigenstates.back()));
    }
    return r;
}

using SpectrumSolver = std::function<SpectrumResult(const IsingParams &)>;

/// One spectrum per h, in input order. Points run on up to `threads` workers
/// (0 = hardware concurrency); each point is independent, so results do not
/// depend on the thread count.
inline std::vector<SpectrumResult> sweep(const IsingParams &base, std::span<const double> h_values,
                                         const SpectrumSolver &solver = exact_spectrum, unsigned threads = 1) {
    if (h_values.empty()) {
        throw std::invalid_argument("sweep needs at least one h value");
    }
    std::vector<SpectrumResult> out(h_values.size());
    auto run = [&](std::size_t i) {
        auto p = base;
        p.h = h_values[i];
        out[i] = solver(p);
    };
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, h_values.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < h_values.size(); ++i) {
            run(i);
        }
        return out;
    }
    std::vector<std::future<void>> workers;
    for (unsigned w = 0; w < threads; ++w) {
        workers.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < h_values.size(); i += threads) {
                run(i);
            }
        }));
    }
    for (auto &f : workers) {
        f.get();
    }
    return out;
}

/// Parses "start:stop:step" into an inclusive grid.
inline std::vector<double> parse_grid(std::string_view spec) {
    const auto c1 = spec.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
        throw std::invalid_argument("grid must look like start:stop:step, got '" + std::string(spec) + "'");
    }
    auto num = [&](std::string_view s) {
        const std::string t(s);
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != t.size() || t.empty()) {
            throw std::invalid_argument("bad number '" + t + "' in grid");
        }
        return v;
    };
    const double a = num(spec.substr(0, c1));
    const double b = num(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = num(spec.substr(c2 + 1));
    if (!(step > 0) || !(b >= a)) {
        throw std::invalid_argument("grid needs step > 0 and stop >= start");
    }
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (n > 100000) {
        throw std::invalid_argument("grid too large");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a + static_cast<double>(i) * step;
    }
    return out;
}

inline std::vector<SpectrumPoint> to_spectrum_points(std::span<const SpectrumResult> results) {
    std::vector<SpectrumPoint> pts;
    for (const auto &r : results) {
        pts.push_back({r.params.h, r.eigenvalues, r.magnetizations});
    }
    return pts;
}

/// Columns: h, E_0.., M_0..
inline void write_sweep_csv(std::ostream &os, std::span<const SpectrumResult> results) {
    if (results.empty()) {
        return;
    }
    const auto levels = results.front().eigenvalues.size();
    os << "h";
    for (std::size_t k = 0; k < levels; ++k) {
        os << ",E_" << k;
    }
    for (std::size_t k = 0; k < levels; ++k) {
        os << ",M_" << k;
    }
    os << '\n';
    os.precision(17);
    for (const auto &r : results) {
        os << r.params.h;
        for (double e : r.eigenvalues) {
            os << ',' << e;
        }
        for (double m : r.magnetizations) {
            os << ',' << m;
        }
        os << '\n';
    }
}

}  // namespace qeyboard

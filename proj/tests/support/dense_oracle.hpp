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

// Dense reference for tests: every gate becomes a full 2^q matrix built from
// Kronecker products, rotations come from the matrix exponential. Shares no
// code with the statevector kernels.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>
#include <random>
#include <vector>

#include "qeyboard/qsim.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using C = std::complex<double>;

inline Mat I2() { return Mat::Identity(2, 2); }
inline Mat X() { Mat m(2, 2); m << 0, 1, 1, 0; return m; }
inline Mat Y() { Mat m(2, 2); m << 0, C(0, -1), C(0, 1), 0; return m; }
inline Mat Z() { Mat m(2, 2); m << 1, 0, 0, -1; return m; }
inline Mat H() { Mat m(2, 2); m << 1, 1, 1, -1; return m / std::sqrt(2.0); }
inline Mat P0() { Mat m(2, 2); m << 1, 0, 0, 0; return m; }
inline Mat P1() { Mat m(2, 2); m << 0, 0, 0, 1; return m; }

inline Mat of(qeyboard::Pauli p) {
    switch (p) {
    case qeyboard::Pauli::X: return X();
    case qeyboard::Pauli::Y: return Y();
    case qeyboard::Pauli::Z: return Z();
    default: return I2();
    }
}

/// ops[0] is qubit 0, the leftmost factor.
inline Mat kron(const std::vector<Mat> &ops) {
    Mat m = Mat::Identity(1, 1);
    for (const auto &o : ops) {
        Mat next = Eigen::kroneckerProduct(m, o).eval();
        m = std::move(next);
    }
    return m;
}

inline Mat embed(int n, std::vector<std::pair<int, Mat>> placed) {
    std::vector<Mat> ops(static_cast<std::size_t>(n), I2());
    for (auto &[q, m] : placed) {
        ops[static_cast<std::size_t>(q)] = m;
    }
    return kron(ops);
}

inline Mat expm_i(double theta, const Mat &gen) { return (C(0, -theta) * gen).exp(); }

inline Mat pauli_string(const qeyboard::PauliString &s) {
    std::vector<Mat> ops;
    for (auto p : s.factors()) {
        ops.push_back(of(p));
    }
    return kron(ops);
}

inline Mat gate_matrix(int n, const qeyboard::GateOp &g) {
    using qeyboard::GateKind;
    const auto &t = g.targets;
    switch (g.kind) {
    case GateKind::X: return embed(n, {{t[0], X()}});
    case GateKind::Y: return embed(n, {{t[0], Y()}});
    case GateKind::Z: return embed(n, {{t[0], Z()}});
    case GateKind::H: return embed(n, {{t[0], H()}});
    case GateKind::RX: return expm_i(*g.param / 2, embed(n, {{t[0], X()}}));
    case GateKind::RY: return expm_i(*g.param / 2, embed(n, {{t[0], Y()}}));
    case GateKind::RZ: return expm_i(*g.param / 2, embed(n, {{t[0], Z()}}));
    case GateKind::CNOT: return embed(n, {{t[0], P0()}}) + embed(n, {{t[0], P1()}, {t[1], X()}});
    case GateKind::SWAP:
        return 0.5 * (embed(n, {}) + embed(n, {{t[0], X()}, {t[1], X()}}) + embed(n, {{t[0], Y()}, {t[1], Y()}}) +
                      embed(n, {{t[0], Z()}, {t[1], Z()}}));
    case GateKind::EXP2: return expm_i(*g.param, embed(n, {{t[0], of(g.axis)}, {t[1], of(g.axis)}}));
    }
    throw std::logic_error("unhandled gate");
}

inline Vec run(const qeyboard::Circuit &c) {
    const int n = c.n_qubits();
    Vec v = Vec::Zero(Eigen::Index{1} << n);
    v(0) = 1;
    for (const auto &g : c.gates()) {
        v = gate_matrix(n, g) * v;
    }
    return v;
}

inline qeyboard::GateOp random_gate(int n, std::mt19937_64 &rng) {
    using qeyboard::GateKind;
    std::uniform_real_distribution<double> angle(-4.0, 4.0);
    std::vector<GateKind> kinds{GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::RX, GateKind::RY,
                                GateKind::RZ};
    if (n >= 2) {
        kinds.insert(kinds.end(), {GateKind::CNOT, GateKind::SWAP, GateKind::EXP2});
    }
    qeyboard::GateOp g;
    g.kind = kinds[std::uniform_int_distribution<std::size_t>(0, kinds.size() - 1)(rng)];
    std::uniform_int_distribution<int> q(0, n - 1);
    const int a = q(rng);
    g.targets = {a};
    if (qeyboard::arity(g.kind) == 2) {
        int b = q(rng);
        while (b == a) {
            b = q(rng);
        }
        g.targets.push_back(b);
    }
    if (qeyboard::is_parameterized(g.kind)) {
        g.param = angle(rng);
    }
    if (g.kind == GateKind::EXP2) {
        g.axis = std::array{qeyboard::Pauli::X, qeyboard::Pauli::Y, qeyboard::Pauli::Z}[rng() % 3];
    }
    return g;
}

}  // namespace oracle

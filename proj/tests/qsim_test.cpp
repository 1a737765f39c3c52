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

#include <boost/math/distributions/chi_squared.hpp>

#include <numbers>

#include "qeyboard/qsim.hpp"
#include "support/dense_oracle.hpp"

using namespace qeyboard;

namespace {

double max_diff(const Statevector &s, const oracle::Vec &v) {
    double d = 0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        d = std::max(d, std::abs(s[i] - v(static_cast<Eigen::Index>(i))));
    }
    return d;
}

GateOp op(GateKind k, std::vector<int> t, std::optional<double> p = std::nullopt, Pauli axis = Pauli::X) {
    return {"", k, std::move(t), p, axis};
}

}  // namespace

TEST(qsim, basis_convention_qubit0_is_leftmost) {
    Statevector s(3);
    apply_gate_inplace(s, op(GateKind::X, {0}));
    EXPECT_EQ(s[0b100], Complex(1));
    EXPECT_EQ(to_bitstring(0b100, 3), "100");
    auto t = Statevector::from_bitstring("001");
    EXPECT_EQ(t[1], Complex(1));
}

TEST(qsim, x_then_h_matches_hand_result) {
    auto s = apply_gate(apply_gate(Statevector(1), op(GateKind::X, {0})), op(GateKind::H, {0}));
    EXPECT_NEAR(s[0].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s[1].real(), -1 / std::sqrt(2.0), 1e-15);
}

TEST(qsim, cnot_entangles_plus_state) {
    Circuit c(2);
    c.add(op(GateKind::H, {0}));
    c.add(op(GateKind::CNOT, {0, 1}));
    auto s = c.run();
    EXPECT_NEAR(std::norm(s[0b00]), 0.5, 1e-15);
    EXPECT_NEAR(std::norm(s[0b11]), 0.5, 1e-15);
    EXPECT_NEAR(std::norm(s[0b01]) + std::norm(s[0b10]), 0.0, 1e-15);
}

TEST(qsim, pair_exponential_quarter_turn) {
    // exp(-i pi/2 XX)|00> = -i|11>
    auto s = apply_pair_exponential(Statevector(2), Pauli::X, {0, 1}, std::numbers::pi / 2);
    EXPECT_NEAR(std::abs(s[0b11] - Complex(0, -1)), 0.0, 1e-15);
    // exp(-i pi/2 YY)|00> = -i (YY)|00> = -i (i*i)|11> = i|11>
    auto y = apply_pair_exponential(Statevector(2), Pauli::Y, {0, 1}, std::numbers::pi / 2);
    EXPECT_NEAR(std::abs(y[0b11] - Complex(0, 1)), 0.0, 1e-15);
}

TEST(qsim, rotation_sinusoid_on_zero) {
    for (double th : {0.0, 0.3, 1.0, 2.0, std::numbers::pi}) {
        auto s = apply_gate(Statevector(1), op(GateKind::RY, {0}, th));
        EXPECT_NEAR(std::norm(s[1]), std::pow(std::sin(th / 2), 2), 1e-14);
    }
}

TEST(qsim, random_circuits_match_dense_oracle) {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 5);
        Circuit c(n);
        const int depth = 1 + static_cast<int>(rng() % 20);
        for (int d = 0; d < depth; ++d) {
            c.add(oracle::random_gate(n, rng));
        }
        ASSERT_LT(max_diff(c.run(), oracle::run(c)), 1e-10) << "trial " << trial;
    }
}

TEST(qsim, unitarity_preserves_norm) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        Circuit c(n);
        for (int d = 0; d < 30; ++d) {
            c.add(oracle::random_gate(n, rng));
        }
        EXPECT_NEAR(c.run().norm_squared(), 1.0, 1e-12);
    }
}

TEST(qsim, gate_then_inverse_is_identity) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        auto g = oracle::random_gate(n, rng);
        auto inv = g;
        if (g.param) {
            inv.param = -*g.param;
        }
        Statevector s(n);
        apply_gate_inplace(s, op(GateKind::H, {0}));
        auto start = s;
        apply_gate_inplace(s, g);
        apply_gate_inplace(s, inv);
        for (std::size_t i = 0; i < s.dim(); ++i) {
            EXPECT_NEAR(std::abs(s[i] - start[i]), 0.0, 1e-12);
        }
    }
}

TEST(qsim, invalid_ops_are_rejected) {
    Statevector s(2);
    EXPECT_THROW(apply_gate_inplace(s, op(GateKind::X, {2})), std::out_of_range);
    EXPECT_THROW(apply_gate_inplace(s, op(GateKind::CNOT, {1, 1})), std::invalid_argument);
    EXPECT_THROW(apply_gate_inplace(s, op(GateKind::RX, {0})), std::invalid_argument);
    EXPECT_THROW(apply_gate_inplace(s, op(GateKind::X, {0}, 1.0)), std::invalid_argument);
    EXPECT_THROW(gate_kind_from_string("FOO"), std::invalid_argument);
    EXPECT_EQ(gate_kind_from_string("cx"), GateKind::CNOT);
    EXPECT_THROW(Statevector(kMaxQubits + 1), std::invalid_argument);
    EXPECT_THROW(Statevector(0), std::invalid_argument);
}

TEST(qsim, circuit_editing) {
    Circuit c(2);
    auto a = c.add(op(GateKind::RY, {0}, 0.1));
    auto b = c.add(op(GateKind::X, {1}));
    EXPECT_NE(a, b);
    c.set_param(a, 0.5);
    EXPECT_EQ(*c.find(a)->param, 0.5);
    EXPECT_THROW(c.set_param(b, 1.0), std::invalid_argument);
    c.remove(a);
    EXPECT_EQ(c.size(), 1u);
    EXPECT_THROW(c.remove("nope"), std::invalid_argument);
    GateOp dup = op(GateKind::X, {0});
    dup.id = b;
    EXPECT_THROW(c.add(dup), std::invalid_argument);
}

TEST(qsim, sampling_is_deterministic_per_seed) {
    Circuit c(3);
    c.add(op(GateKind::H, {0}));
    c.add(op(GateKind::RY, {2}, 1.1));
    auto s = c.run();
    EXPECT_EQ(sample_counts(s, 500, 42).counts, sample_counts(s, 500, 42).counts);
    EXPECT_NE(sample_counts(s, 500, 42).counts, sample_counts(s, 500, 43).counts);
}

TEST(qsim, sampling_passes_chi_square) {
    Circuit c(3);
    c.add(op(GateKind::RY, {0}, 0.7));
    c.add(op(GateKind::H, {1}));
    c.add(op(GateKind::CNOT, {1, 2}));
    c.add(op(GateKind::RX, {2}, 2.1));
    auto s = c.run();
    const std::uint64_t shots = 20000;
    auto h = sample_counts(s, shots, 2024);
    double chi2 = 0;
    int dof = -1;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        const double expected = std::norm(s[i]) * shots;
        if (expected < 1e-9) {
            EXPECT_EQ(h.count(to_bitstring(i, 3)), 0u);
            continue;
        }
        const double obs = static_cast<double>(h.count(to_bitstring(i, 3)));
        chi2 += (obs - expected) * (obs - expected) / expected;
        ++dof;
    }
    boost::math::chi_squared dist(dof);
    EXPECT_LT(chi2, boost::math::quantile(dist, 0.999));
}

TEST(qsim, readout_flip_extremes) {
    auto s = Statevector::from_bitstring("010");
    auto all = sample_counts(s, 100, 1, 1.0);
    EXPECT_EQ(all.count("101"), 100u);
    auto none = sample_counts(s, 100, 1, 0.0);
    EXPECT_EQ(none.count("010"), 100u);
    EXPECT_THROW(sample_counts(s, 0, 1), std::invalid_argument);
    EXPECT_THROW(sample_counts(s, 10, 1, 1.5), std::invalid_argument);
}

TEST(qsim, pauli_string_algebra) {
    auto p = PauliString::from_string("XYZI");
    EXPECT_EQ(p.to_string(), "XYZI");
    EXPECT_EQ(p.y_count(), 1);
    auto [ph, r] = multiply(Pauli::X, Pauli::Y);
    EXPECT_EQ(r, Pauli::Z);
    EXPECT_EQ(ph, Complex(0, 1));
    // apply_pauli against the dense Kronecker product
    std::mt19937_64 rng(5);
    Circuit c(4);
    for (int d = 0; d < 10; ++d) {
        c.add(oracle::random_gate(4, rng));
    }
    auto s = c.run();
    oracle::Vec v = oracle::pauli_string(p) * oracle::run(c);
    s.apply_pauli(p);
    EXPECT_LT(max_diff(s, v), 1e-12);
}

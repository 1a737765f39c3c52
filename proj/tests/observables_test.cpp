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

#include "qeyboard/observable_parser.hpp"
#include "qeyboard/observables.hpp"
#include "support/dense_oracle.hpp"

using namespace qeyboard;

namespace {

Statevector random_state(int n, std::mt19937_64 &rng) {
    Circuit c(n);
    for (int d = 0; d < 12; ++d) {
        c.add(oracle::random_gate(n, rng));
    }
    return c.run();
}

double oracle_expectation(const Statevector &s, const Observable &o) {
    oracle::Mat m = oracle::Mat::Zero(static_cast<Eigen::Index>(s.dim()), static_cast<Eigen::Index>(s.dim()));
    for (const auto &t : o.terms()) {
        m += t.coeff * oracle::pauli_string(t.string);
    }
    oracle::Vec v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t i = 0; i < s.dim(); ++i) {
        v(static_cast<Eigen::Index>(i)) = s[i];
    }
    return (v.adjoint() * m * v)(0).real();
}

}  // namespace

TEST(observables, frequency_intensity_pair_on_two_qubits) {
    const auto hf = parse_observable("0.5*(I-X)@I");
    const auto hi = parse_observable("I@(0.5*(I-Z))");
    Statevector s(2);
    EXPECT_NEAR(expectation(s, hf), 0.5, 1e-12);
    EXPECT_NEAR(expectation(s, hi), 0.0, 1e-12);
    apply_gate_inplace(s, {"", GateKind::X, {1}, std::nullopt});
    EXPECT_NEAR(expectation(s, hi), 1.0, 1e-12);
}

TEST(observables, projector_is_idempotent_and_matches_formula) {
    for (auto a : {Pauli::X, Pauli::Y, Pauli::Z}) {
        const auto p = projector(a);
        EXPECT_EQ(p * p, p);
        EXPECT_EQ(p, 0.5 * (Observable::identity(1) - pauli(a)));
    }
    // Pi_Z projects onto |1>, the sigma_Z = -1 eigenstate.
    EXPECT_NEAR(expectation(Statevector::from_bitstring("1"), projector(Pauli::Z)), 1.0, 1e-15);
    EXPECT_NEAR(expectation(Statevector::from_bitstring("0"), projector(Pauli::Z)), 0.0, 1e-15);
}

TEST(observables, canonical_form_merges_and_drops) {
    auto o = Observable::term(1.0, "XZ") + Observable::term(2.0, "XZ") - Observable::term(3.0, "XZ");
    EXPECT_TRUE(o.is_zero());
    auto q = Observable::term(1.0, "ZI") + Observable::term(1.0, "IX");
    EXPECT_EQ(q, Observable::term(1.0, "IX") + Observable::term(1.0, "ZI"));
    EXPECT_EQ(q.terms().size(), 2u);
}

TEST(observables, non_hermitian_product_rejected) {
    EXPECT_THROW(pauli(Pauli::X) * pauli(Pauli::Z), std::domain_error);
    EXPECT_NO_THROW(pauli(Pauli::X) * pauli(Pauli::X));
}

TEST(observables, tensor_matches_kronecker) {
    std::mt19937_64 rng(3);
    const auto o = tensor({projector(Pauli::X), pauli(Pauli::Y), projector(Pauli::Z)});
    for (int k = 0; k < 10; ++k) {
        auto s = random_state(3, rng);
        EXPECT_NEAR(expectation(s, o), oracle_expectation(s, o), 1e-12);
    }
}

TEST(observables, expectation_linearity) {
    std::mt19937_64 rng(11);
    const auto a = parse_observable("XZ + 0.3*YY");
    const auto b = parse_observable("PI_Z@PI_X - 2*ZI");
    for (int k = 0; k < 20; ++k) {
        auto s = random_state(2, rng);
        EXPECT_NEAR(expectation(s, 1.5 * a + b), 1.5 * expectation(s, a) + expectation(s, b), 1e-12);
        EXPECT_NEAR(expectation(s, a), oracle_expectation(s, a), 1e-12);
    }
}

TEST(observables, projector_expectations_in_unit_interval) {
    std::mt19937_64 rng(21);
    const auto set = tomography_set(2);
    EXPECT_EQ(set.size(), 15u);
    for (int k = 0; k < 20; ++k) {
        auto s = random_state(2, rng);
        for (const auto &o : set) {
            const double e = expectation(s, o);
            EXPECT_GE(e, -1e-12);
            EXPECT_LE(e, 1 + 1e-12);
        }
    }
}

TEST(observables, shot_estimates_converge) {
    std::mt19937_64 rng(8);
    auto s = random_state(3, rng);
    const auto o = parse_observable("XYZ + 0.5*ZZI - 0.25*IXX + 2*PI_Y@I@I");
    const double exact = expectation(s, o);
    EXPECT_DOUBLE_EQ(estimate_expectation(s, o, 0, 1), exact);
    const double est = estimate_expectation(s, o, 200000, 5);
    EXPECT_NEAR(est, exact, 0.03);
    EXPECT_EQ(estimate_expectation(s, o, 1000, 5), estimate_expectation(s, o, 1000, 5));
}

TEST(observables, string_intensities_silence_and_flip) {
    Statevector s(4);
    auto iv = exact_string_intensities(s);
    for (double v : iv.values) {
        EXPECT_EQ(v, 0.0);
    }
    auto h = sample_counts(s, 1000, 3);
    for (double v : quantum_string_intensities(h).values) {
        EXPECT_EQ(v, 0.0);
    }
    auto flipped = quantum_string_intensities(sample_counts(s, 1000, 3, 1.0));
    for (double v : flipped.values) {
        EXPECT_EQ(v, 1.0);
    }
}

TEST(observables, string_intensities_match_marginals) {
    Circuit c(2);
    c.add({"", GateKind::RY, {0}, 1.0});
    c.add({"", GateKind::X, {1}, std::nullopt});
    auto iv = exact_string_intensities(c.run());
    EXPECT_NEAR(iv.values[0], std::pow(std::sin(0.5), 2), 1e-14);
    EXPECT_NEAR(iv.values[1], 1.0, 1e-14);
}

TEST(observables, dense_matrix_matches_oracle) {
    const auto o = parse_observable("XYZ + 0.5*ZZI - 0.25*IXX");
    oracle::Mat m = oracle::Mat::Zero(8, 8);
    for (const auto &t : o.terms()) {
        m += t.coeff * oracle::pauli_string(t.string);
    }
    EXPECT_LT((dense_matrix(o) - m).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW(dense_real_matrix(o), std::invalid_argument);
}

TEST(parser, precedence_and_words) {
    EXPECT_EQ(parse_observable("XZ"), tensor({pauli(Pauli::X), pauli(Pauli::Z)}));
    EXPECT_EQ(parse_observable("x@z"), parse_observable("XZ"));
    EXPECT_EQ(parse_observable("-X + 2*X"), pauli(Pauli::X));
    EXPECT_EQ(parse_observable("PI_Z@I@I"), tensor({projector(Pauli::Z), Observable::identity(1), Observable::identity(1)}));
    const auto hf = parse_observable("(2*PI_Z@I + I@PI_Z + I@I)@I");
    EXPECT_EQ(hf.n_qubits(), 3);
    // eigenvalues 1..4 on the computational basis of the first two qubits
    EXPECT_NEAR(expectation(Statevector::from_bitstring("000"), hf), 1.0, 1e-15);
    EXPECT_NEAR(expectation(Statevector::from_bitstring("110"), hf), 4.0, 1e-15);
    EXPECT_NEAR(expectation(Statevector::from_bitstring("100"), hf), 3.0, 1e-15);
}

TEST(parser, numbers_promote_to_identity) {
    EXPECT_EQ(parse_observable("1 + Z"), Observable::identity(1) + pauli(Pauli::Z));
    EXPECT_EQ(parse_observable("0.5", 2), Observable::identity(2, 0.5));
    EXPECT_THROW(parse_observable("0.5"), ParseError);
}

TEST(parser, errors_carry_column) {
    try {
        parse_observable("X + FOO");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.column(), 5u);
        EXPECT_NE(std::string(e.what()).find("FOO"), std::string::npos);
    }
    EXPECT_THROW(parse_observable("X @ YY + Z"), ParseError);  // width mismatch
    EXPECT_THROW(parse_observable("(X"), ParseError);
    EXPECT_THROW(parse_observable("X * Z"), ParseError);  // not Hermitian
    EXPECT_THROW(parse_observable("XZ", 3), ParseError);
}

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
#include <sstream>

#include "qeyboard/vqd.hpp"
#include "support/dense_oracle.hpp"

using namespace qeyboard;

namespace {

std::function<double(std::span<const double>)> sinusoid(double a, double b, double c, std::size_t j) {
    return [=](std::span<const double> th) { return a * std::cos(th[j] - b) + c; };
}

}  // namespace

TEST(ansatz, shape_and_oracle) {
    const auto a = Ansatz::for_qubits(3);
    EXPECT_EQ(a.n_layers, 3);
    EXPECT_EQ(a.n_params(), 12u);
    EXPECT_EQ(Ansatz::for_qubits(2, 0).n_params(), 2u);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<double> th(a.n_params());
    for (auto &t : th) {
        t = u(rng);
    }
    const auto fast = prepare_ansatz_state(a, th);
    const auto ref = oracle::run(a.circuit(th));
    for (std::size_t i = 0; i < fast.dim(); ++i) {
        EXPECT_NEAR(std::abs(fast[i] - ref(static_cast<Eigen::Index>(i))), 0.0, 1e-12);
        EXPECT_NEAR(fast[i].imag(), 0.0, 1e-15);  // real ansatz
    }
    EXPECT_THROW(prepare_ansatz_state(a, std::vector<double>(5)), std::invalid_argument);
}

TEST(ansatz, zero_params_is_all_zero_state) {
    const auto a = Ansatz::for_qubits(3);
    const auto s = prepare_ansatz_state(a, std::vector<double>(a.n_params(), 0.0));
    EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-15);
}

TEST(objective, deflation_adds_beta) {
    const auto H = build_hamiltonian({2, 1.0, 0.0, Boundary::Open, 0.0});
    const auto a = Ansatz::for_qubits(2, 1);
    const std::vector<double> zero(a.n_params(), 0.0);
    const auto psi = prepare_ansatz_state(a, zero);
    const double e = objective(H, {}, a, zero);
    EXPECT_NEAR(e, -1.0, 1e-12);  // |00>: -Z0 Z1 = -1
    std::vector<Prior> priors{{psi, 3.0}};
    EXPECT_NEAR(objective(H, priors, a, zero), e + 3.0, 1e-12);
    std::vector<Prior> orth{{Statevector::from_bitstring("11"), 3.0}};
    EXPECT_NEAR(objective(H, orth, a, zero), e, 1e-12);
}

TEST(nft, recovers_cosine_minimum) {
    std::vector<double> th{1.0};
    auto step = nft_parameter_update(sinusoid(1, 0, 0, 0), th, 0);
    EXPECT_NEAR(std::abs(wrap_angle(th[0] - std::numbers::pi)), 0.0, 1e-9);
    EXPECT_NEAR(step.predicted, -1.0, 1e-12);
}

TEST(nft, recovers_shifted_sinusoid) {
    // 2 cos(theta - 0.3) + 5 has its minimum at 0.3 + pi
    for (double start : {-2.0, 0.0, 0.7, 3.0}) {
        std::vector<double> th{0.4, start, -1.0};
        auto step = nft_parameter_update(sinusoid(2, 0.3, 5, 1), th, 1);
        EXPECT_NEAR(std::abs(wrap_angle(th[1] - (0.3 + std::numbers::pi))), 0.0, 1e-9);
        EXPECT_NEAR(step.amplitude, 2.0, 1e-12);
        EXPECT_NEAR(step.offset, 5.0, 1e-12);
        EXPECT_NEAR(step.predicted, 3.0, 1e-12);
        EXPECT_EQ(th[0], 0.4);
        EXPECT_EQ(th[2], -1.0);
    }
}

TEST(nft, random_sinusoids) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> amp(0.1, 5), ph(-3, 3), off(-10, 10);
    for (int k = 0; k < 200; ++k) {
        const double a = amp(rng), b = ph(rng), c = off(rng);
        std::vector<double> th{ph(rng)};
        nft_parameter_update(sinusoid(a, b, c, 0), th, 0);
        EXPECT_NEAR(std::abs(wrap_angle(th[0] - b - std::numbers::pi)), 0.0, 1e-9);
    }
}

TEST(nft, flat_objective_leaves_parameter) {
    std::vector<double> th{0.123};
    auto step = nft_parameter_update([](std::span<const double>) { return 4.0; }, th, 0);
    EXPECT_EQ(th[0], 0.123);
    EXPECT_LT(step.amplitude, kNftFlatAmplitude);
    std::vector<double> bad{0.0};
    EXPECT_THROW(nft_parameter_update([](std::span<const double>) { return std::nan(""); }, bad, 0),
                 std::domain_error);
    EXPECT_THROW(nft_parameter_update(sinusoid(1, 0, 0, 0), bad, 3), std::out_of_range);
}

TEST(vqe, constant_hamiltonian) {
    const auto H = Observable::identity(2, 0.7);
    VqeConfig cfg;
    cfg.seed = 1;
    cfg.n_starts = 2;
    const auto r = vqe_minimize(H, Ansatz::for_qubits(2), cfg);
    EXPECT_NEAR(r.energy, 0.7, 1e-12);
    EXPECT_TRUE(r.converged);
}

TEST(vqd, two_site_levels_match_exact) {
    const IsingParams p{2, 1.0, 0.5, Boundary::Open, 0.0};
    const auto exact = exact_spectrum(p);
    VqeConfig cfg;
    cfg.seed = 11;
    const auto r = vqd_ising_spectrum(p, 4, cfg);
    ASSERT_EQ(r.eigenvalues.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(r.eigenvalues[k], exact.eigenvalues[k], 5e-2);
    }
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a + 1; b < 4; ++b) {
            EXPECT_LT(std::norm(r.eigenstates[a].inner(r.eigenstates[b])), 0.1);
        }
    }
}

TEST(vqd, ground_energy_four_sites_and_variational_bound) {
    VqeConfig cfg;
    cfg.seed = 5;
    for (double h : {0.5, 1.0, 2.0}) {
        const IsingParams p{4, 1.0, h, Boundary::Open, 0.0};
        const double e0 = exact_spectrum(p).eigenvalues[0];
        CallbackTrace trace;
        const auto r = vqe_minimize(build_hamiltonian(p), Ansatz::for_qubits(4), cfg, &trace);
        EXPECT_NEAR(r.energy, e0, 1e-2) << "h=" << h;
        for (const auto &rec : trace.records) {
            ASSERT_GE(rec.energy, e0 - 1e-9);
        }
    }
}

TEST(vqd, trace_is_ordered_and_deterministic) {
    const auto H = build_hamiltonian({2, 1.0, 1.0, Boundary::Open, 0.0});
    VqeConfig cfg;
    cfg.seed = 3;
    cfg.n_starts = 2;
    const auto a = vqd_spectrum(H, 2, cfg);
    const auto b = vqd_spectrum(H, 2, cfg);
    ASSERT_EQ(a.trace.records.size(), b.trace.records.size());
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
        EXPECT_EQ(a.trace.records[i].energy, b.trace.records[i].energy);
    }
    for (int level : a.trace.levels()) {
        std::int64_t last = -1;
        for (const auto &r : a.trace.records) {
            if (r.level == level) {
                EXPECT_GT(r.iteration, last);
                last = r.iteration;
            }
        }
    }
    EXPECT_EQ(a.trace.levels(), (std::vector<int>{0, 1}));
    const auto best = a.best_trace();
    EXPECT_LT(best.records.size(), a.trace.records.size());
    std::ostringstream os;
    write_trace_csv(os, best);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "level,iteration,param_index,energy,start");
}

TEST(vqd, trace_features) {
    CallbackTrace t;
    t.records = {{0, 0, 0, -1, 0.0}, {0, 0, 1, 0, -1.0}, {1, 0, 0, -1, 1.0}};
    const auto frames = trace_to_features(t, 200, 400, 0.01);
    ASSERT_EQ(frames.size(), 2u);
    ASSERT_EQ(frames[0].features.size(), 2u);
    EXPECT_DOUBLE_EQ(frames[0].features[0].frequency, 300);
    EXPECT_DOUBLE_EQ(frames[1].features[0].frequency, 200);
    EXPECT_DOUBLE_EQ(frames[1].features[1].frequency, 400);  // held
    EXPECT_DOUBLE_EQ(frames[1].t, 0.01);
    EXPECT_THROW(trace_to_features(CallbackTrace{}, 200, 400, 0.01), std::invalid_argument);
}

TEST(vqd, shot_based_energies_run) {
    VqeConfig cfg;
    cfg.seed = 9;
    cfg.n_shots = 2000;
    cfg.n_starts = 1;
    cfg.max_sweeps = 10;
    const auto H = build_hamiltonian({2, 1.0, 0.5, Boundary::Open, 0.0});
    const auto r = vqe_minimize(H, Ansatz::for_qubits(2), cfg);
    EXPECT_NEAR(r.energy, -std::sqrt(2.0), 0.15);
}

// Copyright 2026 The pskqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pskqkd/channel.hpp"
#include "pskqkd/protocol.hpp"
#include "test_util.hpp"

using namespace pskqkd;
using namespace pskqkd::testing;

namespace {

// Loss-only joint state sum_xy sqrt(p_x p_y) <psi_y|psi_x> |x><y| (x) |sqrt(eta) a_x><sqrt(eta) a_y|
// where the first factor accounts for Eve's purification of the loss.
Matrix loss_only_state(const Constellation& c, double eta, int cutoff) {
    int N = c.n_states, dB = cutoff + 1;
    Matrix rho = Matrix::Zero(N * dB, N * dB);
    double se = std::sqrt(eta), sl = std::sqrt(1 - eta);
    for (int x = 0; x < N; ++x) {
        Vector vx = coherent_fock_vector(se * c.alphas[x], cutoff);
        for (int y = 0; y < N; ++y) {
            Vector vy = coherent_fock_vector(se * c.alphas[y], cutoff);
            Complex eve = coherent_overlap(sl * c.alphas[x], sl * c.alphas[y]);
            rho.block(x * dB, y * dB, dB, dB) = std::sqrt(c.probs[x] * c.probs[y]) * eve * vx * vy.adjoint();
        }
    }
    return rho;
}

}  // namespace

TEST(Protocol, ConstellationLayout) {
    auto q = build_constellation(4, 0.7);
    EXPECT_NEAR(q.phases[0], std::numbers::pi / 4, 1e-15);
    EXPECT_NEAR(std::abs(q.alphas[2] - std::polar(0.7, 5 * std::numbers::pi / 4)), 0, 1e-15);
    auto e = build_constellation(8, 0.7);
    EXPECT_NEAR(e.phases[3], 3 * std::numbers::pi / 4, 1e-15);
    EXPECT_THROW(build_constellation(3, 0.7), std::invalid_argument);
    EXPECT_THROW(build_constellation(4, 0.0), std::invalid_argument);
    Matrix g = alice_gram(q);
    EXPECT_TRUE(is_hermitian(g, 1e-15));
    EXPECT_NEAR(g.trace().real(), 1.0, 1e-15);
    EXPECT_GE(min_eigenvalue(g), -1e-15);
    // Overlap against the Fock expansion.
    Vector a = coherent_fock_vector(q.alphas[0], 40), b = coherent_fock_vector(q.alphas[1], 40);
    EXPECT_LT(std::abs(b.dot(a) - coherent_overlap(q.alphas[0], q.alphas[1])), 1e-14);
}

TEST(Channel, Transmittance) {
    EXPECT_DOUBLE_EQ(transmittance(0), 1.0);
    EXPECT_NEAR(transmittance(50), 0.1, 1e-15);
    EXPECT_NEAR(transmittance(100), 0.01, 1e-16);
    EXPECT_NEAR(transmittance(10, 0.03), std::pow(10, -0.3), 1e-15);
    EXPECT_THROW(transmittance(-1), std::invalid_argument);
}

TEST(Channel, ConstraintShapeAndIdentityCombination) {
    for (int N : {4, 8}) {
        auto c = build_constellation(N, 0.6);
        auto cs = build_constraint_set(c, 6, {20, 0.01});
        ASSERT_EQ(cs.size(), static_cast<std::size_t>(4 * N + N * N));
        Matrix id = Matrix::Zero(N * 7, N * 7);
        double tr = 0;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            EXPECT_TRUE(is_hermitian(cs.ops[i].to_dense(), 1e-15));
            cs.ops[i].add_to(id, cs.identity_combination[i]);
            tr += cs.identity_combination[i] * cs.values[i];
        }
        EXPECT_LT(max_abs(id - Matrix::Identity(N * 7, N * 7)), 1e-15);
        EXPECT_NEAR(tr, 1.0, 1e-14);
    }
}

TEST(Channel, LossOnlyStateSatisfiesConstraints) {
    for (int N : {4, 8}) {
        for (double L : {0.0, 20.0, 50.0}) {
            auto c = build_constellation(N, 0.75);
            ChannelParams ch{L, 0.0};
            Matrix rho = loss_only_state(c, ch.transmittance(), 14);
            auto cs = build_constraint_set(c, 14, ch);
            EXPECT_LT(cs.max_residual(rho), 1e-9) << "N=" << N << " L=" << L;
            TrustedDetector det(0.72, 0.04);
            auto ct = build_constraint_set(c, 14, ch, det);
            EXPECT_LT(ct.max_residual(rho), 1e-9) << "trusted N=" << N << " L=" << L;
        }
    }
}

TEST(Channel, NoisyMomentsMatchDisplacedThermalState) {
    // Behind a channel with transmittance eta and excess noise xi each output is
    // a displaced thermal state with mean photon number eta xi / 2.
    const int dim = 60;
    auto c = build_constellation(4, 0.9);
    ChannelParams ch{15, 0.05};
    double eta = ch.transmittance();
    auto un = expected_moments_untrusted(c, ch);
    TrustedDetector det(0.7, 0.05);
    auto tr = expected_moments_trusted(c, ch, det);
    auto o = build_observables(dim - 1);
    auto t = trusted_observables(dim - 1, det);
    for (int x = 0; x < 4; ++x) {
        // noisy_povm_element with eta_d = 1 and nu = eta xi / 2 is D rho_th D^dagger / pi
        Matrix rho = std::numbers::pi * noisy_povm_element(std::sqrt(eta) * c.alphas[x], 1.0, eta * ch.excess_noise / 2, dim);
        const Matrix* ops[4] = {&o.q, &o.p, &o.n, &o.d};
        for (int k = 0; k < 4; ++k) EXPECT_NEAR((rho * *ops[k]).trace().real(), un[x][k], 1e-9);
        const Matrix* tops[4] = {&t.fq, &t.fp, &t.sq, &t.sp};
        for (int k = 0; k < 4; ++k) EXPECT_NEAR((rho * *tops[k]).trace().real(), tr[x][k], 1e-8);
    }
}

TEST(BlockOperator, MatchesDenseAlgebra) {
    std::mt19937 rng(9);
    auto c = build_constellation(4, 0.5);
    auto cs = build_constraint_set(c, 5, {10, 0.02});
    Matrix X = random_density(24, rng);
    Matrix W = random_density(24, rng) * 3.0;
    for (const auto& op : cs.ops) {
        Matrix d = op.to_dense();
        EXPECT_NEAR(op.inner(X), (d * X).trace().real(), 1e-13);
        EXPECT_LT(max_abs(op.sandwich(W) - W * d * W), 1e-12);
    }
    auto dense = BlockOperator::dense(X);
    EXPECT_LT(max_abs(dense.to_dense() - X), 0.0 + 1e-300);
}

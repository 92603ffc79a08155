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

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pskqkd/block_operator.hpp"
#include "pskqkd/operators.hpp"
#include "pskqkd/protocol.hpp"

namespace pskqkd {

/// Phase-invariant Gaussian channel: loss 10^(-loss_exponent * L) and excess
/// noise xi referred to the channel input, in shot-noise units.
struct ChannelParams {
    double distance_km = 0.0;
    double excess_noise = 0.0;
    double loss_exponent = 0.02;

    double transmittance() const;
};

double transmittance(double distance_km, double loss_exponent = 0.02);

/// Per-state expectations of (q, p, n, d) behind the channel.
std::vector<std::array<double, 4>> expected_moments_untrusted(const Constellation& c, const ChannelParams& ch);

/// Per-state expectations of (F_Q, F_P, S_Q, S_P) for a trusted detector.
std::vector<std::array<double, 4>> expected_moments_trusted(const Constellation& c, const ChannelParams& ch,
                                                            const TrustedDetector& det);

/// Linear equality constraints Tr[Gamma_i rho] = gamma_i on the joint state
/// rho_AB, with H_A = C^N (Alice's register) and H_B the truncated Fock space.
///
/// The first 4N entries pin the per-state moments; the remaining N^2 pin
/// Tr_B rho to Alice's Gram matrix through an orthonormal Hermitian basis.
/// identity_combination holds c with sum_i c_i Gamma_i = I.
struct ConstraintSet {
    int dimA = 0;
    int dimB = 0;
    std::vector<BlockOperator> ops;
    std::vector<double> values;
    std::vector<std::string> labels;
    std::vector<double> identity_combination;

    std::size_t size() const { return ops.size(); }
    /// max_i |Tr[Gamma_i rho] - gamma_i|
    double max_residual(const Matrix& rho) const;
};

ConstraintSet build_constraint_set(const Constellation& c, int cutoff, const ChannelParams& ch,
                                   const std::optional<TrustedDetector>& detector = std::nullopt);

}  // namespace pskqkd

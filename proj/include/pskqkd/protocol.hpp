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

#include <vector>

#include "pskqkd/linalg.hpp"

namespace pskqkd {

/// Alice's phase-shift-keyed coherent-state alphabet.
///
/// 4 states sit at (2k+1) pi/4, 8 states at k pi/4. Both use uniform priors.
struct Constellation {
    int n_states = 0;
    double amplitude = 0.0;
    std::vector<double> phases;
    std::vector<Complex> alphas;
    std::vector<double> probs;
};

/// Throws std::invalid_argument unless n_states is 4 or 8 and amplitude > 0.
Constellation build_constellation(int n_states, double amplitude);

/// <beta|alpha> for coherent states.
Complex coherent_overlap(Complex alpha, Complex beta);

/// G_ij = sqrt(p_i p_j) <psi_j|psi_i>: the reduced state of Alice's register
/// in the source-replacement picture.
Matrix alice_gram(const Constellation& c);

/// Fock amplitudes <n|alpha>, n = 0..cutoff. Not renormalized.
Vector coherent_fock_vector(Complex alpha, int cutoff);

}  // namespace pskqkd

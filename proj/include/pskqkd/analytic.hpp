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

/// Eve's half of the beamsplitter attack on a PSK alphabet, written in the
/// orthonormal basis obtained by grouping Fock states by n mod n_states.
struct EveBasis {
    int n_states = 0;
    /// <~e_k|~e_k> = sum_l a^(2(N l + k)) / (N l + k)!
    std::vector<double> norms;
    /// Column x holds <e_k|eps_x>.
    Matrix overlap_matrix;
};

/// eve_amp = sqrt(1 - eta) |alpha|. Throws std::invalid_argument on
/// eve_amp < 0 or an unsupported n_states.
EveBasis eve_basis(int n_states, double eve_amp);

/// Probability that an ideal heterodyne outcome for the coherent state at
/// `state_center` falls in key wedge `wedge_index`. Wedges have angular width
/// 2 pi / n_states and are centred on the constellation phases.
double wedge_probability(Complex state_center, int wedge_index, int n_states);

/// Loss-only components of the Devetak-Winter rate, all in bits.
struct LossOnlyRate {
    double mutual_info = 0.0;
    double holevo = 0.0;
    double rate = 0.0;
};

LossOnlyRate lossonly_terms(int n_states, double amplitude, double eta, double beta);

/// beta I(A:B) - chi(B:E) for the beamsplitter attack, no postselection.
double lossonly_keyrate(int n_states, double amplitude, double eta, double beta);

/// Grid search over amplitudes step, 2 step, ... up to alpha_max. Ties go to
/// the smaller amplitude.
double find_optimal_alpha(int n_states, double eta, double beta, double step = 0.005,
                          double alpha_max = 2.0);

struct BerConfig {
    double amplitude = 0.8;
    /// Weight of each sent state relative to the decided sector, counted
    /// counter-clockwise from the decided one. Size fixes the alphabet.
    std::vector<int> weights{0, 1, 2, 1};
    /// Grid covers [-half_width, half_width]^2; a negative value means
    /// 3 * amplitude.
    double half_width = -1.0;
    int resolution = 101;
};

struct BerGrid {
    std::vector<double> axis;
    /// values(i, j) is the BER at gamma = axis[j] + i axis[i].
    RealMatrix values;
};

/// Expected bit error rate given the outcome gamma.
double ber_at(const BerConfig& cfg, Complex gamma);

/// Throws std::invalid_argument if resolution < 2 or the weights do not
/// describe a 4- or 8-state alphabet.
BerGrid ber_map(const BerConfig& cfg);

}  // namespace pskqkd

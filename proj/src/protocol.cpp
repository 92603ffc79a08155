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

#include "pskqkd/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pskqkd/special.hpp"

namespace pskqkd {

Constellation build_constellation(int n_states, double amplitude) {
    if (n_states != 4 && n_states != 8) throw std::invalid_argument("build_constellation: n_states must be 4 or 8");
    if (!(amplitude > 0)) throw std::invalid_argument("build_constellation: amplitude must be positive");
    Constellation c;
    c.n_states = n_states;
    c.amplitude = amplitude;
    double offset = n_states == 4 ? std::numbers::pi / 4 : 0.0;
    for (int k = 0; k < n_states; ++k) {
        double th = offset + 2.0 * std::numbers::pi * k / n_states;
        c.phases.push_back(th);
        c.alphas.push_back(std::polar(amplitude, th));
        c.probs.push_back(1.0 / n_states);
    }
    return c;
}

Complex coherent_overlap(Complex alpha, Complex beta) {
    return std::exp(-0.5 * (std::norm(alpha) + std::norm(beta)) + std::conj(beta) * alpha);
}

Matrix alice_gram(const Constellation& c) {
    int n = c.n_states;
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = std::sqrt(c.probs[i] * c.probs[j]) * coherent_overlap(c.alphas[i], c.alphas[j]);
    return g;
}

Vector coherent_fock_vector(Complex alpha, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("coherent_fock_vector: negative cutoff");
    Vector v(cutoff + 1);
    Complex term = std::exp(-0.5 * std::norm(alpha));
    v(0) = term;
    for (int n = 1; n <= cutoff; ++n) {
        term *= alpha / std::sqrt(static_cast<double>(n));
        v(n) = term;
    }
    return v;
}

}  // namespace pskqkd

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
#include <stdexcept>

#include "pskqkd/operators.hpp"

namespace pskqkd {

Observables build_observables(int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("build_observables: cutoff must be >= 1");
    int d = cutoff + 1;
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    Matrix ad = a.adjoint();
    const double s = 1.0 / std::sqrt(2.0);
    Observables o;
    o.q = s * (ad + a);
    o.p = Complex(0, s) * (ad - a);
    o.n = Matrix::Zero(d, d);
    for (int n = 0; n < d; ++n) o.n(n, n) = n;
    o.d = o.q * o.q - o.p * o.p;
    return o;
}

}  // namespace pskqkd

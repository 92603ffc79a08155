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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace pskqkd {

/// log(n!) via lgamma.
double log_factorial(int n);

/// Binomial coefficient as a double, exact for results below 2^53.
double binomial(int n, int k);

/// Exact binomial coefficient. Throws std::overflow_error past int64.
std::int64_t binomial_i64(int n, int k);

/// True when 2*s is a positive integer.
bool is_half_integer_order(double s);

/// Upper incomplete gamma function Gamma(s, x) = int_x^inf t^(s-1) e^-t dt.
///
/// Only integer and half-integer orders are supported; those are the only
/// orders the region operators ever need. Integer orders use the finite sum
/// (s-1)! e^-x sum_{k<s} x^k/k!; half-integer orders start from
/// Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x)) and recurse upward. Both paths are
/// free of cancellation.
///
/// Throws std::domain_error for s <= 0, x < 0, or an unsupported order.
template <typename T>
T upper_incomplete_gamma(T s, T x) {
    if (!(s > 0) || !(x >= 0)) {
        throw std::domain_error("upper_incomplete_gamma: need s > 0 and x >= 0");
    }
    T twice = 2 * s;
    T r = std::round(twice);
    if (std::abs(twice - r) > T(1e-12) * twice) {
        throw std::domain_error("upper_incomplete_gamma: order must be a multiple of 1/2");
    }
    long two_s = static_cast<long>(r);
    T ex = std::exp(-x);
    if (two_s % 2 == 0) {
        long n = two_s / 2;
        T term = 1, sum = 1, fact = 1;
        for (long k = 1; k < n; ++k) {
            term *= x / T(k);
            sum += term;
            fact *= T(k);
        }
        return fact * ex * sum;
    }
    T sx = std::sqrt(x);
    T g = std::sqrt(std::numbers::pi_v<T>) * std::erfc(sx);
    // Gamma(a+1, x) = a Gamma(a, x) + x^a e^-x, a = 1/2, 3/2, ...
    T a = T(0.5);
    T xa_ex = sx * ex;  // x^a e^-x at a = 1/2
    for (long k = 1; k < two_s; k += 2) {
        g = a * g + xa_ex;
        xa_ex *= x;
        a += 1;
    }
    return g;
}

/// Gamma(s, x) / Gamma(s): same domain as upper_incomplete_gamma.
double regularized_upper_gamma(double s, double x);

}  // namespace pskqkd

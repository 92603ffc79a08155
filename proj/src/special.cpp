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

#include "pskqkd/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pskqkd {

double log_factorial(int n) {
    if (n < 0) throw std::domain_error("log_factorial: negative argument");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double binomial(int n, int k) {
    if (k < 0 || k > n || n < 0) return 0.0;
    if (n <= 60) return static_cast<double>(binomial_i64(n, k));
    return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

std::int64_t binomial_i64(int n, int k) {
    if (k < 0 || k > n || n < 0) return 0;
    if (k > n - k) k = n - k;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        // r * (n - k + i) / i stays integral at every step.
        std::int64_t num = n - k + i;
        if (r > std::numeric_limits<std::int64_t>::max() / num) {
            throw std::overflow_error("binomial_i64: overflow");
        }
        r = r * num / i;
    }
    return r;
}

bool is_half_integer_order(double s) {
    double t = 2.0 * s;
    return s > 0 && std::abs(t - std::round(t)) <= 1e-12 * t;
}

double regularized_upper_gamma(double s, double x) {
    return upper_incomplete_gamma<double>(s, x) / std::tgamma(s);
}

}  // namespace pskqkd

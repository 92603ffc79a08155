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
#include <numbers>
#include <stdexcept>

#include "pskqkd/operators.hpp"
#include "pskqkd/special.hpp"

namespace pskqkd {

namespace {

using LD = long double;

// Neumaier-compensated accumulator for one real channel.
struct KahanSum {
    LD sum = 0, comp = 0;
    void add(LD x) {
        LD t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    LD value() const { return sum + comp; }
};

void check_common(int cutoff, double delta) {
    if (cutoff < 1) throw std::invalid_argument("region operators: cutoff must be >= 1");
    if (!(delta >= 0)) throw std::invalid_argument("region operators: radius parameters must be >= 0");
}

RegionOperators finish(std::vector<Matrix> regions) {
    RegionOperators out;
    out.regions = std::move(regions);
    Eigen::Index d = out.regions.front().rows();
    out.discard = Matrix::Identity(d, d) - out.total();
    out.discard = hermitian_part(out.discard);
    return out;
}

// i^k for integer k.
Complex ipow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

}  // namespace

Matrix RegionOperators::total() const {
    Matrix t = Matrix::Zero(regions.front().rows(), regions.front().cols());
    for (const auto& r : regions) t += r;
    return t;
}

RegionOperators region_ops_wedge(int cutoff, int n_wedges, double center_offset, double delta_r, double delta_a) {
    check_common(cutoff, delta_r);
    if (n_wedges < 2) throw std::invalid_argument("region_ops_wedge: need at least two wedges");
    const double half = std::numbers::pi / n_wedges;
    if (!(delta_a >= 0 && delta_a < half)) throw std::invalid_argument("region_ops_wedge: delta_a out of range");
    const double w = half - delta_a;
    const LD x = static_cast<LD>(delta_r) * delta_r;
    int d = cutoff + 1;
    std::vector<Matrix> regions(n_wedges, Matrix::Zero(d, d));
    for (int n = 0; n < d; ++n) {
        for (int m = n; m < d; ++m) {
            LD g = upper_incomplete_gamma<LD>(LD(n + m) / 2 + 1, x);
            LD lognorm = 0.5L * (std::lgamma(LD(n) + 1) + std::lgamma(LD(m) + 1));
            LD radial = g * std::exp(-lognorm) / std::numbers::pi_v<LD>;
            for (int z = 0; z < n_wedges; ++z) {
                Complex v;
                if (m == n) {
                    v = static_cast<double>(radial * w);
                } else {
                    int k = m - n;
                    double th = center_offset + 2.0 * std::numbers::pi * z / n_wedges;
                    v = static_cast<double>(radial * std::sin(LD(k) * w) / k) * std::polar(1.0, -k * th);
                }
                regions[z](n, m) = v;
                regions[z](m, n) = std::conj(v);
            }
        }
    }
    return finish(std::move(regions));
}

RegionOperators region_ops_ra(int cutoff, double delta_r, double delta_a) {
    return region_ops_wedge(cutoff, 4, std::numbers::pi / 4, delta_r, delta_a);
}

RegionOperators region_ops_8ra(int cutoff, double delta_r, double delta_a) {
    return region_ops_wedge(cutoff, 8, 0.0, delta_r, delta_a);
}

RegionOperators region_ops_cross(int cutoff, double delta_c) {
    check_common(cutoff, delta_c);
    const LD x = static_cast<LD>(delta_c) * delta_c;
    int d = cutoff + 1;
    // G[p] = Gamma((p+1)/2, delta_c^2), p = power of one Cartesian coordinate.
    std::vector<LD> G(2 * d);
    for (int p = 0; p < 2 * d; ++p) G[p] = upper_incomplete_gamma<LD>(LD(p + 1) / 2, x);
    std::vector<Matrix> regions(4, Matrix::Zero(d, d));
    for (int n = 0; n < d; ++n) {
        LD lfn = std::lgamma(LD(n) + 1);
        for (int m = n; m < d; ++m) {
            LD pre = std::exp(-0.5L * (lfn + std::lgamma(LD(m) + 1))) / (4 * std::numbers::pi_v<LD>);
            if (m == n) {
                KahanSum acc;
                for (int j = 0; j <= n; ++j) acc.add(LD(binomial(n, j)) * G[2 * j] * G[2 * (n - j)]);
                double v = static_cast<double>(pre * acc.value());
                for (int z = 0; z < 4; ++z) regions[z](n, n) = v;
                continue;
            }
            // Group the double binomial sum by s = total power of x. The
            // integer weight K_s = sum_j (-1)^j C(n,j) C(m,s-j) is exact, and
            // every quadrant factor depends on s alone.
            KahanSum re[4], im[4];
            for (int s = 0; s <= n + m; ++s) {
                std::int64_t K = 0;
                for (int j = std::max(0, s - m); j <= std::min(n, s); ++j) {
                    std::int64_t t = binomial_i64(n, j) * binomial_i64(m, s - j);
                    K += (j % 2 == 0) ? t : -t;
                }
                if (K == 0) continue;
                LD mag = LD(K) * G[s] * G[n + m - s];
                Complex ph = ipow(n - m + s);
                int sgn[4] = {1, (s % 2 == 0) ? 1 : -1, ((n + m) % 2 == 0) ? 1 : -1,
                              ((n + m - s) % 2 == 0) ? 1 : -1};
                for (int z = 0; z < 4; ++z) {
                    re[z].add(sgn[z] * ph.real() * mag);
                    im[z].add(sgn[z] * ph.imag() * mag);
                }
            }
            for (int z = 0; z < 4; ++z) {
                Complex v(static_cast<double>(pre * re[z].value()), static_cast<double>(pre * im[z].value()));
                regions[z](n, m) = v;
                regions[z](m, n) = std::conj(v);
            }
        }
    }
    return finish(std::move(regions));
}

}  // namespace pskqkd

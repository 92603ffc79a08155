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

void check_args(int cutoff, double delta) {
    if (cutoff < 1) throw std::invalid_argument("trusted region operators: cutoff must be >= 1");
    if (!(delta >= 0)) throw std::invalid_argument("trusted region operators: radius parameters must be >= 0");
}

// Pieces of <n|G_y|m> = P_nm sum_j C(m, n-j) w_j |y|^(2j) e^{-a|y|^2} (y*)^(m-n) / j!
// for n <= m, where the thermal factors nbar^n / b^j have been folded into
// w_j = nbar^(n-j) / (eta_d (1 + nbar))^j so that nbar = 0 is harmless.
struct Kernel {
    LD eta, nbar, a;
    explicit Kernel(const TrustedDetector& det)
        : eta(det.eta_d), nbar(det.n_bar()), a(1.0L / (LD(det.eta_d) * (1.0L + LD(det.n_bar())))) {}

    LD prefactor(int n, int m) const {
        LD lg = 0.5L * (std::lgamma(LD(n) + 1) - std::lgamma(LD(m) + 1));
        return std::exp(lg) / (std::numbers::pi_v<LD> * std::pow(eta, LD(m - n) / 2 + 1) *
                               std::pow(1 + nbar, LD(m + 1)));
    }
    LD weight(int n, int j) const { return std::pow(nbar, LD(n - j)) / std::pow(eta * (1 + nbar), LD(j)); }
};

RegionOperators finish(std::vector<Matrix> regions) {
    RegionOperators out;
    out.regions = std::move(regions);
    Eigen::Index d = out.regions.front().rows();
    out.discard = hermitian_part(Matrix::Identity(d, d) - out.total());
    return out;
}

Complex ipow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

}  // namespace

TrustedDetector::TrustedDetector(double eta_d_, double nu_el_) : eta_d(eta_d_), nu_el(nu_el_) {
    if (!(eta_d > 0 && eta_d <= 1)) throw std::invalid_argument("TrustedDetector: eta_d must be in (0, 1]");
    if (!(nu_el >= 0)) throw std::invalid_argument("TrustedDetector: nu_el must be >= 0");
}

RegionOperators trusted_region_ops_wedge(int cutoff, int n_wedges, double center_offset, double delta_r,
                                         double delta_a, const TrustedDetector& det) {
    check_args(cutoff, delta_r);
    if (n_wedges < 2) throw std::invalid_argument("trusted_region_ops_wedge: need at least two wedges");
    const double half = std::numbers::pi / n_wedges;
    if (!(delta_a >= 0 && delta_a < half)) throw std::invalid_argument("trusted_region_ops_wedge: delta_a out of range");
    const double w = half - delta_a;
    Kernel K(det);
    const LD x = K.a * LD(delta_r) * delta_r;
    int d = cutoff + 1;
    std::vector<Matrix> regions(n_wedges, Matrix::Zero(d, d));
    for (int n = 0; n < d; ++n) {
        for (int m = n; m < d; ++m) {
            int k = m - n;
            // radial integral: (1/2) sum_j C(m, n-j) w_j Gamma(j+1+k/2, a dr^2) / (a^(j+1+k/2) j!)
            LD sum = 0;
            for (int j = 0; j <= n; ++j) {
                LD g = upper_incomplete_gamma<LD>(LD(j) + 1 + LD(k) / 2, x);
                sum += LD(binomial(m, n - j)) * K.weight(n, j) * g /
                       (std::pow(K.a, LD(j) + 1 + LD(k) / 2) * std::tgamma(LD(j) + 1));
            }
            LD radial = K.prefactor(n, m) * sum;
            for (int z = 0; z < n_wedges; ++z) {
                Complex v;
                if (k == 0) {
                    v = static_cast<double>(radial * w);
                } else {
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

RegionOperators trusted_region_ops_ra(int cutoff, double delta_r, double delta_a, const TrustedDetector& det) {
    return trusted_region_ops_wedge(cutoff, 4, std::numbers::pi / 4, delta_r, delta_a, det);
}

RegionOperators trusted_region_ops_8ra(int cutoff, double delta_r, double delta_a, const TrustedDetector& det) {
    return trusted_region_ops_wedge(cutoff, 8, 0.0, delta_r, delta_a, det);
}

RegionOperators trusted_region_ops_cross(int cutoff, double delta_c, const TrustedDetector& det) {
    check_args(cutoff, delta_c);
    Kernel K(det);
    const LD x = K.a * LD(delta_c) * delta_c;
    int d = cutoff + 1;
    // Gh[p] = Gamma((p+1)/2, a dc^2) for a Cartesian power p.
    std::vector<LD> Gh(4 * d + 2);
    for (std::size_t p = 0; p < Gh.size(); ++p) Gh[p] = upper_incomplete_gamma<LD>(LD(p + 1) / 2, x);
    std::vector<Matrix> regions(4, Matrix::Zero(d, d));
    for (int n = 0; n < d; ++n) {
        for (int m = n; m < d; ++m) {
            int k = m - n;
            // Quadrant z flips the sign of x (power 2l+q) and/or y (power 2(j-l)+k-q).
            LD re[4] = {0, 0, 0, 0}, im[4] = {0, 0, 0, 0};
            for (int j = 0; j <= n; ++j) {
                LD outer = LD(binomial(m, n - j)) * K.weight(n, j) /
                           (std::pow(K.a, LD(j) + 1) * std::tgamma(LD(j) + 1));
                for (int q = 0; q <= k; ++q) {
                    LD inner = 0;
                    for (int l = 0; l <= j; ++l) inner += LD(binomial(j, l)) * Gh[2 * l + q] * Gh[2 * (j - l) + k - q];
                    LD mag = outer * LD(binomial(k, q)) * inner;
                    // (x - i y)^k expansion gives (-i)^(k-q)
                    Complex ph = ipow(-(k - q));
                    int sx = (q % 2 == 0) ? 1 : -1;
                    int sy = ((k - q) % 2 == 0) ? 1 : -1;
                    int sgn[4] = {1, sx, sx * sy, sy};
                    for (int z = 0; z < 4; ++z) {
                        re[z] += sgn[z] * ph.real() * mag;
                        im[z] += sgn[z] * ph.imag() * mag;
                    }
                }
            }
            LD pre = K.prefactor(n, m) / (4 * std::pow(K.a, LD(k) / 2));
            for (int z = 0; z < 4; ++z) {
                Complex v(static_cast<double>(pre * re[z]), static_cast<double>(pre * im[z]));
                regions[z](n, m) = v;
                regions[z](m, n) = std::conj(v);
            }
        }
    }
    return finish(std::move(regions));
}

TrustedObservables trusted_observables(int cutoff, const TrustedDetector& det) {
    if (cutoff < 1) throw std::invalid_argument("trusted_observables: cutoff must be >= 1");
    Kernel K(det);
    int d = cutoff + 1;
    TrustedObservables o{Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d)};
    const LD pi = std::numbers::pi_v<LD>;
    for (int n = 0; n < d; ++n) {
        LD s0 = 0;
        for (int j = 0; j <= n; ++j)
            s0 += LD(binomial(n, n - j)) * (j + 1) * K.weight(n, j) / std::pow(K.a, LD(j + 2));
        double diag = static_cast<double>(pi * K.prefactor(n, n) * s0);
        o.sq(n, n) = diag;
        o.sp(n, n) = diag;
        if (n + 1 < d) {
            LD s1 = 0;
            for (int j = 0; j <= n; ++j)
                s1 += LD(binomial(n + 1, n - j)) * (j + 1) * K.weight(n, j) / std::pow(K.a, LD(j + 2));
            double f = static_cast<double>(pi / std::sqrt(2.0L) * K.prefactor(n, n + 1) * s1);
            o.fq(n, n + 1) = f;
            o.fq(n + 1, n) = f;
            o.fp(n, n + 1) = Complex(0, -f);
            o.fp(n + 1, n) = Complex(0, f);
        }
        if (n + 2 < d) {
            LD s2 = 0;
            for (int j = 0; j <= n; ++j)
                s2 += LD(binomial(n + 2, n - j)) * (j + 2) * (j + 1) * K.weight(n, j) / std::pow(K.a, LD(j + 3));
            double v = static_cast<double>(pi / 2 * K.prefactor(n, n + 2) * s2);
            o.sq(n, n + 2) = v;
            o.sq(n + 2, n) = v;
            o.sp(n, n + 2) = -v;
            o.sp(n + 2, n) = -v;
        }
    }
    return o;
}

}  // namespace pskqkd

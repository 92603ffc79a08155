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
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pskqkd/operators.hpp"
#include "test_util.hpp"

using namespace pskqkd;
using namespace pskqkd::testing;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRmax = 11.0;

Matrix ladder(int d) {
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

// Wedge [lo, hi] in angle, |gamma| >= r0, integrated in polar coordinates.
std::complex<double> wedge_integral(const std::function<std::complex<double>(std::complex<double>)>& k, double lo,
                                    double hi, double r0) {
    return integrate2d([&](double th, double r) { return r * k(std::polar(r, th)); }, lo, hi, r0, kRmax);
}

// Quadrant z of the cross strategy with the strip |x|,|y| < dc removed.
std::complex<double> quadrant_integral(const std::function<std::complex<double>(std::complex<double>)>& k, int z,
                                       double dc) {
    double sx = (z == 0 || z == 3) ? 1 : -1;
    double sy = (z == 0 || z == 1) ? 1 : -1;
    return integrate2d([&](double u, double v) { return k({sx * u, sy * v}); }, dc, kRmax, dc, kRmax);
}

}  // namespace

TEST(Observables, TruncatedCommutatorAndNumber) {
    const int nc = 10, d = nc + 1;
    auto o = build_observables(nc);
    Matrix comm = o.q * o.p - o.p * o.q;
    Matrix expect = Complex(0, 1) * Matrix::Identity(d, d);
    expect(nc, nc) = Complex(0, -nc);
    EXPECT_LT(max_abs(comm - expect), 1e-13);

    Matrix num = 0.5 * (o.q * o.q + o.p * o.p - Matrix::Identity(d, d));
    Matrix ne = o.n;
    ne(nc, nc) = (nc - 1) / 2.0;
    EXPECT_LT(max_abs(num - ne), 1e-13);

    Matrix a = ladder(d);
    EXPECT_LT(max_abs(o.d - (a * a + a.adjoint() * a.adjoint())), 1e-13);
    EXPECT_THROW(build_observables(0), std::invalid_argument);
}

TEST(RegionOps, RadialAngularMatchesQuadrature) {
    std::mt19937 rng(101);
    std::uniform_int_distribution<int> idx(0, 12);
    std::uniform_real_distribution<double> ur(0.0, 1.4), ua(0.0, kPi / 8);
    for (int t = 0; t < 20; ++t) {
        int n = idx(rng), m = idx(rng);
        double dr = ur(rng), da = ua(rng);
        auto ops = region_ops_ra(12, dr, da);
        int z = t % 4;
        double c = (z + 0.5) * kPi / 2;
        auto ref = wedge_integral([&](Complex g) { return coherent_kernel(n, m, g); }, c - kPi / 4 + da,
                                  c + kPi / 4 - da, dr);
        EXPECT_LT(std::abs(ops.regions[z](n, m) - ref), 1e-7) << n << "," << m << " z=" << z;
    }
}

TEST(RegionOps, EightWedgeMatchesQuadrature) {
    std::mt19937 rng(202);
    std::uniform_int_distribution<int> idx(0, 14);
    std::uniform_real_distribution<double> ur(0.0, 1.2), ua(0.0, kPi / 16);
    for (int t = 0; t < 20; ++t) {
        int n = idx(rng), m = idx(rng);
        double dr = ur(rng), da = ua(rng);
        auto ops = region_ops_8ra(14, dr, da);
        int z = t % 8;
        double c = z * kPi / 4;
        auto ref = wedge_integral([&](Complex g) { return coherent_kernel(n, m, g); }, c - kPi / 8 + da,
                                  c + kPi / 8 - da, dr);
        EXPECT_LT(std::abs(ops.regions[z](n, m) - ref), 1e-7) << n << "," << m << " z=" << z;
    }
}

TEST(RegionOps, CrossMatchesQuadrature) {
    std::mt19937 rng(303);
    std::uniform_int_distribution<int> idx(0, 12);
    std::uniform_real_distribution<double> uc(0.0, 0.9);
    for (int t = 0; t < 20; ++t) {
        int n = idx(rng), m = idx(rng);
        double dc = uc(rng);
        auto ops = region_ops_cross(12, dc);
        int z = t % 4;
        auto ref = quadrant_integral([&](Complex g) { return coherent_kernel(n, m, g); }, z, dc);
        EXPECT_LT(std::abs(ops.regions[z](n, m) - ref), 1e-7) << n << "," << m << " z=" << z;
    }
}

TEST(RegionOps, CompletenessAndPositivity) {
    for (int nc : {8, 12, 16}) {
        Matrix id = Matrix::Identity(nc + 1, nc + 1);
        for (const auto& ops : {region_ops_ra(nc, 0, 0), region_ops_8ra(nc, 0, 0), region_ops_cross(nc, 0)}) {
            EXPECT_LT(max_abs(ops.total() - id), 1e-10);
            EXPECT_LT(max_abs(ops.discard), 1e-10);
        }
        for (const auto& ops : {region_ops_ra(nc, 0.6, 0.1), region_ops_8ra(nc, 0.5, 0.05), region_ops_cross(nc, 0.3)}) {
            for (const auto& r : ops.regions) {
                EXPECT_TRUE(is_hermitian(r, 1e-13));
                EXPECT_GE(min_eigenvalue(r), -1e-12);
            }
            EXPECT_GE(min_eigenvalue(ops.discard), -1e-12);
            EXPECT_LE(std::abs(eigh(ops.total()).eigenvalues.maxCoeff()), 1 + 1e-12);
        }
    }
}

TEST(RegionOps, RejectsBadArguments) {
    EXPECT_THROW(region_ops_ra(0, 0, 0), std::invalid_argument);
    EXPECT_THROW(region_ops_ra(10, -0.1, 0), std::invalid_argument);
    EXPECT_THROW(region_ops_ra(10, 0.1, kPi / 4), std::invalid_argument);
    EXPECT_THROW(region_ops_cross(10, -1), std::invalid_argument);
    EXPECT_THROW(TrustedDetector(0.0, 0.1), std::invalid_argument);
    EXPECT_THROW(TrustedDetector(0.7, -0.1), std::invalid_argument);
}

TEST(NoisyPovm, LaguerreFormMatchesDisplacedThermalState) {
    const double eta = 0.72, nu = 0.04;
    const int dim = 90;
    for (Complex y : {Complex(0.3, -0.2), Complex(-1.1, 0.7), Complex(0.05, 1.6), Complex(1.3, 1.3)}) {
        Matrix g = noisy_povm_element(y, eta, nu, dim);
        for (int n = 0; n <= 12; ++n) {
            for (int m = 0; m <= 12; ++m) {
                auto lag = noisy_kernel(n, m, y, eta, nu);
                EXPECT_LT(std::abs(lag - g(n, m)), 1e-10) << n << "," << m;
                EXPECT_LT(std::abs(noisy_kernel_boost(n, m, y, eta, nu) - lag), 1e-12);
            }
        }
    }
}

TEST(TrustedRegionOps, WedgeMatchesQuadrature) {
    std::mt19937 rng(404);
    std::uniform_int_distribution<int> idx(0, 12);
    std::uniform_real_distribution<double> ur(0.0, 1.4), ua(0.0, kPi / 8);
    TrustedDetector det(0.72, 0.04);
    for (int t = 0; t < 20; ++t) {
        int n = idx(rng), m = idx(rng);
        double dr = ur(rng), da = ua(rng);
        auto ops = trusted_region_ops_ra(12, dr, da, det);
        int z = t % 4;
        double c = (z + 0.5) * kPi / 2;
        auto ref = wedge_integral([&](Complex y) { return noisy_kernel(n, m, y, det.eta_d, det.nu_el); },
                                  c - kPi / 4 + da, c + kPi / 4 - da, dr);
        EXPECT_LT(std::abs(ops.regions[z](n, m) - ref), 1e-7) << n << "," << m << " z=" << z;
    }
}

TEST(TrustedRegionOps, CrossMatchesQuadrature) {
    std::mt19937 rng(505);
    std::uniform_int_distribution<int> idx(0, 12);
    std::uniform_real_distribution<double> uc(0.0, 0.9);
    TrustedDetector det(0.6, 0.1);
    for (int t = 0; t < 20; ++t) {
        int n = idx(rng), m = idx(rng);
        if (t < 3) m = n;  // make sure the diagonal is exercised
        double dc = uc(rng);
        auto ops = trusted_region_ops_cross(12, dc, det);
        int z = t % 4;
        auto ref =
            quadrant_integral([&](Complex y) { return noisy_kernel(n, m, y, det.eta_d, det.nu_el); }, z, dc);
        EXPECT_LT(std::abs(ops.regions[z](n, m) - ref), 1e-7) << n << "," << m << " z=" << z;
    }
}

TEST(TrustedRegionOps, IdealDetectorLimit) {
    for (double eta : {1.0, 1.0 - 1e-9}) {
        TrustedDetector det(eta, eta == 1.0 ? 0.0 : 1e-9);
        auto a = trusted_region_ops_ra(12, 0.7, 0.1, det);
        auto b = region_ops_ra(12, 0.7, 0.1);
        auto c = trusted_region_ops_cross(12, 0.4, det);
        auto e = region_ops_cross(12, 0.4);
        for (int z = 0; z < 4; ++z) {
            EXPECT_LT(max_abs(a.regions[z] - b.regions[z]), 1e-6);
            EXPECT_LT(max_abs(c.regions[z] - e.regions[z]), 1e-6);
        }
    }
}

TEST(TrustedRegionOps, CompletenessAndPositivity) {
    TrustedDetector det(0.72, 0.04);
    for (const auto& ops : {trusted_region_ops_ra(12, 0, 0, det), trusted_region_ops_cross(12, 0, det)}) {
        EXPECT_LT(max_abs(ops.total() - Matrix::Identity(13, 13)), 1e-10);
    }
    for (const auto& ops : {trusted_region_ops_ra(12, 0.8, 0.2, det), trusted_region_ops_cross(12, 0.5, det)}) {
        for (const auto& r : ops.regions) EXPECT_GE(min_eigenvalue(r), -1e-12);
        EXPECT_GE(min_eigenvalue(ops.discard), -1e-12);
    }
}

TEST(TrustedObservables, MatchQuadratureOfDefiningIntegrals) {
    TrustedDetector det(0.72, 0.04);
    auto t = trusted_observables(8, det);
    const double s2 = std::sqrt(2.0);
    auto plane = [&](int n, int m, const std::function<double(Complex)>& w) {
        return integrate2d(
            [&](double x, double y) {
                Complex g(x, y);
                return w(g) * noisy_kernel(n, m, g, det.eta_d, det.nu_el);
            },
            -kRmax, kRmax, -kRmax, kRmax, 1e-10);
    };
    for (auto [n, m] : {std::pair{0, 0}, {0, 1}, {2, 3}, {1, 3}, {4, 4}, {5, 7}, {6, 7}, {3, 6}}) {
        EXPECT_LT(std::abs(t.fq(n, m) - plane(n, m, [&](Complex g) { return s2 * g.real(); })), 1e-7);
        EXPECT_LT(std::abs(t.fp(n, m) - plane(n, m, [&](Complex g) { return s2 * g.imag(); })), 1e-7);
        EXPECT_LT(std::abs(t.sq(n, m) - plane(n, m, [&](Complex g) { return 2 * g.real() * g.real(); })), 1e-7);
        EXPECT_LT(std::abs(t.sp(n, m) - plane(n, m, [&](Complex g) { return 2 * g.imag() * g.imag(); })), 1e-7);
    }
    EXPECT_NEAR(t.sq(0, 0).real(), 1.04, 1e-12);
}

TEST(TrustedObservables, IdealDetectorLimit) {
    const int nc = 10, d = nc + 1;
    auto t = trusted_observables(nc, TrustedDetector(1.0, 0.0));
    auto o = build_observables(nc);
    Matrix a = ladder(d);
    Matrix aad = Matrix::Zero(d, d);
    for (int n = 0; n < d; ++n) aad(n, n) = n + 1;
    Matrix dd = a * a + a.adjoint() * a.adjoint();
    EXPECT_LT(max_abs(t.fq - o.q), 1e-12);
    EXPECT_LT(max_abs(t.fp - o.p), 1e-12);
    EXPECT_LT(max_abs(t.sq - (aad + 0.5 * dd)), 1e-12);
    EXPECT_LT(max_abs(t.sp - (aad - 0.5 * dd)), 1e-12);
    auto t2 = trusted_observables(nc, TrustedDetector(1.0 - 1e-9, 1e-9));
    EXPECT_LT(max_abs(t2.fq - o.q), 1e-6);
    EXPECT_LT(max_abs(t2.sq - (aad + 0.5 * dd)), 1e-6);
}

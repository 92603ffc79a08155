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

// Independent reference computations used only by the tests: adaptive 2D
// quadrature of phase-space integrals and the noisy heterodyne POVM density.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/laguerre.hpp>

#include "pskqkd/linalg.hpp"

namespace pskqkd::testing {

using ComplexFn2 = std::function<std::complex<double>(double, double)>;

inline double integrate1d(const std::function<double(double)>& f, double a, double b, double tol = 1e-11) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol);
}

/// int_{x0}^{x1} int_{y0(x)}^{y1(x)} f(x, y) dy dx, real and imaginary parts separately.
inline std::complex<double> integrate2d(const ComplexFn2& f, double x0, double x1, double y0, double y1,
                                        double tol = 1e-11) {
    auto part = [&](bool im) {
        return integrate1d(
            [&](double x) {
                return integrate1d(
                    [&](double y) {
                        auto v = f(x, y);
                        return im ? v.imag() : v.real();
                    },
                    y0, y1, tol);
            },
            x0, x1, tol);
    };
    return {part(false), part(true)};
}

/// <n|gamma><gamma|m> / pi for the ideal heterodyne POVM.
inline std::complex<double> coherent_kernel(int n, int m, std::complex<double> g) {
    double lf = 0.5 * (std::lgamma(n + 1.0) + std::lgamma(m + 1.0));
    double r = std::abs(g);
    double th = std::arg(g);
    double mag = std::exp(-r * r + (n + m) * std::log(std::max(r, 1e-300)) - lf);
    if (n + m == 0) mag = std::exp(-r * r);
    return mag * std::polar(1.0, th * (n - m)) / std::numbers::pi;
}

/// <n|G_y|m> for a heterodyne detector with efficiency eta and electronic
/// noise nu, written with an associated Laguerre polynomial (n <= m branch,
/// Hermitian conjugate otherwise).
inline std::complex<double> noisy_kernel(int n, int m, std::complex<double> y, double eta, double nu) {
    if (n > m) return std::conj(noisy_kernel(m, n, y, eta, nu));
    double nbar = (1 - eta + nu) / eta;
    double a = 1 / (eta * (1 + nbar));
    double b = eta * nbar * (1 + nbar);
    int k = m - n;
    double y2 = std::norm(y);
    double lc = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)) - std::log(std::numbers::pi) -
                (k / 2.0 + 1) * std::log(eta) - (m + 1) * std::log1p(nbar);
    // nbar^n L_n^k(-y2/b) written term by term so nbar = 0 is allowed
    double lag = 0;
    for (int j = 0; j <= n; ++j) {
        double t = std::exp(std::lgamma(m + 1.0) - std::lgamma(n - j + 1.0) - std::lgamma(k + j + 1.0) -
                            std::lgamma(j + 1.0));
        lag += t * std::pow(nbar, n - j) * std::pow(y2 / (eta * (1 + nbar)), j);
    }
    return std::exp(lc - a * y2) * std::pow(std::conj(y), k) * lag;
}

/// Same kernel through Boost's associated Laguerre polynomial (nbar > 0).
inline std::complex<double> noisy_kernel_boost(int n, int m, std::complex<double> y, double eta, double nu) {
    if (n > m) return std::conj(noisy_kernel_boost(m, n, y, eta, nu));
    double nbar = (1 - eta + nu) / eta;
    double a = 1 / (eta * (1 + nbar));
    double b = eta * nbar * (1 + nbar);
    int k = m - n;
    double c = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0))) /
               (std::numbers::pi * std::pow(eta, k / 2.0 + 1)) * std::pow(nbar, n) / std::pow(1 + nbar, m + 1);
    double y2 = std::norm(y);
    return c * std::exp(-a * y2) * std::pow(std::conj(y), k) *
           boost::math::laguerre(static_cast<unsigned>(n), static_cast<unsigned>(k), -y2 / b);
}

/// Displacement operator D(beta) on a truncated space of dimension dim,
/// from the spectral decomposition of its Hermitian generator.
inline Matrix displacement(std::complex<double> beta, int dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    Matrix gen = std::complex<double>(0, -1) * (beta * a.adjoint() - std::conj(beta) * a);  // Hermitian
    Eigen::SelfAdjointEigenSolver<Matrix> es(gen);
    Vector ph(dim);
    for (int i = 0; i < dim; ++i) ph(i) = std::polar(1.0, es.eigenvalues()(i));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

/// (1 / (pi eta)) D(y/sqrt(eta)) rho_th(nbar) D(y/sqrt(eta))^dagger on dim levels.
inline Matrix noisy_povm_element(std::complex<double> y, double eta, double nu, int dim) {
    double nbar = (1 - eta + nu) / eta;
    Matrix th = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) th(k, k) = std::pow(nbar, k) / std::pow(1 + nbar, k + 1);
    Matrix d = displacement(y / std::sqrt(eta), dim);
    return d * th * d.adjoint() / (std::numbers::pi * eta);
}

}  // namespace pskqkd::testing

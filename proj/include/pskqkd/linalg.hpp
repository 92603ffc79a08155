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

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace pskqkd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Raised when a matrix that must be positive semidefinite is not.
class NonPsdError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised by relative_entropy when rho leaks out of the support of sigma.
class SupportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SpectralDecomposition {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns
};

bool is_hermitian(const Matrix& m, double tol = 1e-10);

/// (m + m^dagger) / 2
Matrix hermitian_part(const Matrix& m);

/// Eigendecomposition of a Hermitian matrix. Only the lower triangle is read.
SpectralDecomposition eigh(const Matrix& m);

double min_eigenvalue(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

/// U diag(f(lambda)) U^dagger for a Hermitian matrix.
template <typename F>
Matrix apply_spectral(const SpectralDecomposition& sd, F&& f) {
    RealVector v(sd.eigenvalues.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f(sd.eigenvalues(i));
    return sd.eigenvectors * v.asDiagonal() * sd.eigenvectors.adjoint();
}

/// Square root of a PSD matrix; tiny negative eigenvalues are clipped.
Matrix sqrt_psd(const Matrix& m);

/// Base-2 logarithm of a PSD matrix.
///
/// Eigenvalues below 1e-15 times the largest are raised to that floor.
/// Throws NonPsdError if an eigenvalue is below -1e-9 * trace.
Matrix matrix_log2(const Matrix& rho);

/// -Tr[rho log2 rho] with 0 log 0 = 0.
double von_neumann_entropy(const Matrix& rho);

/// Entropy in bits of a list of eigenvalues or probabilities.
double entropy_bits(const RealVector& p);
double entropy_bits(const std::vector<double>& p);

/// D(rho || sigma) in bits. Throws SupportError if more than 1e-8 of the
/// weight of rho lies outside the support of sigma.
double relative_entropy(const Matrix& rho, const Matrix& sigma);

/// Tr_B for a matrix on H_A (x) H_B with index a * dimB + b.
Matrix partial_trace_B(const Matrix& rho, int dimA, int dimB);

/// Tr_A with the same index convention.
Matrix partial_trace_A(const Matrix& rho, int dimA, int dimB);

struct PsdProjection {
    Matrix matrix;
    double violation = 0.0;  // |most negative eigenvalue| of the input, 0 if none
};

/// Clip negative eigenvalues and rescale to the input trace (when positive).
PsdProjection psd_project(const Matrix& m);

}  // namespace pskqkd

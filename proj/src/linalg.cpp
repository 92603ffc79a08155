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

#include "pskqkd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pskqkd {

bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

SpectralDecomposition eigh(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigh: matrix is not square");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigh: eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix sqrt_psd(const Matrix& m) {
    return apply_spectral(eigh(m), [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

Matrix matrix_log2(const Matrix& rho) {
    auto sd = eigh(rho);
    double tr = rho.trace().real();
    double lo = sd.eigenvalues(0);
    if (lo < -1e-9 * std::max(std::abs(tr), 1e-300)) {
        throw NonPsdError("matrix_log2: eigenvalue " + std::to_string(lo) + " is negative");
    }
    double top = sd.eigenvalues(sd.eigenvalues.size() - 1);
    double floor = 1e-15 * top;
    return apply_spectral(sd, [floor](double x) { return std::log2(std::max(x, floor)); });
}

double entropy_bits(const RealVector& p) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > 0) h -= p(i) * std::log2(p(i));
    return h;
}

double entropy_bits(const std::vector<double>& p) {
    return entropy_bits(RealVector(Eigen::Map<const RealVector>(p.data(), static_cast<Eigen::Index>(p.size()))));
}

double von_neumann_entropy(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    return entropy_bits(es.eigenvalues());
}

double relative_entropy(const Matrix& rho, const Matrix& sigma) {
    if (rho.rows() != sigma.rows()) throw std::invalid_argument("relative_entropy: dimension mismatch");
    auto ss = eigh(sigma);
    double top = std::max(ss.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
    double zero = 1e-14 * top * static_cast<double>(sigma.rows());
    double leak = 0.0;
    double cross = 0.0;
    for (Eigen::Index i = 0; i < ss.eigenvalues.size(); ++i) {
        auto v = ss.eigenvectors.col(i);
        double w = (v.adjoint() * rho * v)(0, 0).real();
        if (ss.eigenvalues(i) <= zero) {
            leak += w;
        } else {
            cross += w * std::log2(ss.eigenvalues(i));
        }
    }
    if (leak > 1e-8) throw SupportError("relative_entropy: rho is not supported on supp(sigma)");
    return -von_neumann_entropy(rho) - cross;
}

Matrix partial_trace_B(const Matrix& rho, int dimA, int dimB) {
    if (rho.rows() != dimA * dimB || rho.cols() != dimA * dimB)
        throw std::invalid_argument("partial_trace_B: dimension mismatch");
    Matrix out(dimA, dimA);
    for (int a = 0; a < dimA; ++a)
        for (int b = 0; b < dimA; ++b) out(a, b) = rho.block(a * dimB, b * dimB, dimB, dimB).trace();
    return out;
}

Matrix partial_trace_A(const Matrix& rho, int dimA, int dimB) {
    if (rho.rows() != dimA * dimB || rho.cols() != dimA * dimB)
        throw std::invalid_argument("partial_trace_A: dimension mismatch");
    Matrix out = Matrix::Zero(dimB, dimB);
    for (int a = 0; a < dimA; ++a) out += rho.block(a * dimB, a * dimB, dimB, dimB);
    return out;
}

PsdProjection psd_project(const Matrix& m) {
    Matrix h = hermitian_part(m);
    double tr = h.trace().real();
    auto sd = eigh(h);
    PsdProjection out;
    out.violation = std::max(0.0, -sd.eigenvalues(0));
    if (out.violation == 0.0) {
        out.matrix = h;
        return out;
    }
    out.matrix = apply_spectral(sd, [](double x) { return std::max(x, 0.0); });
    double tr2 = out.matrix.trace().real();
    if (tr2 > 0 && tr > 0) out.matrix *= tr / tr2;
    return out;
}

}  // namespace pskqkd

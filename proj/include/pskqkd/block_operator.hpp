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

#include <memory>
#include <vector>

#include "pskqkd/linalg.hpp"

namespace pskqkd {

/// Hermitian operator on H_A (x) H_B stored as sum_t c_t |a_t><b_t| (x) O_t.
///
/// Constraint operators are all of this shape with small dimA and shared O_t,
/// so products like W A W and Tr[A X] can skip the Kronecker expansion. A
/// plain dense matrix is the special case dimA = 1.
class BlockOperator {
  public:
    struct Term {
        int a = 0;
        int b = 0;
        Complex coef{1, 0};
        std::shared_ptr<const Matrix> op;
    };

    BlockOperator() = default;
    BlockOperator(int dimA, int dimB);

    static BlockOperator dense(const Matrix& m);

    /// Adds c |a><b| (x) O. Hermiticity of the total is the caller's job.
    void add_term(int a, int b, Complex coef, std::shared_ptr<const Matrix> op);

    int dimA() const { return dimA_; }
    int dimB() const { return dimB_; }
    int dim() const { return dimA_ * dimB_; }
    const std::vector<Term>& terms() const { return terms_; }

    Matrix to_dense() const;

    /// Re Tr[A X].
    double inner(const Matrix& x) const;

    /// acc += y A
    void add_to(Matrix& acc, Complex y) const;

    /// Copy with every coefficient multiplied by f.
    BlockOperator scaled(double f) const;

    /// W A W for Hermitian W.
    Matrix sandwich(const Matrix& w) const;

    double frobenius_norm() const;

  private:
    int dimA_ = 0;
    int dimB_ = 0;
    std::vector<Term> terms_;
};

}  // namespace pskqkd

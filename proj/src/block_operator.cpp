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

#include "pskqkd/block_operator.hpp"

#include <stdexcept>

namespace pskqkd {

BlockOperator::BlockOperator(int dimA, int dimB) : dimA_(dimA), dimB_(dimB) {
    if (dimA < 1 || dimB < 1) throw std::invalid_argument("BlockOperator: dimensions must be positive");
}

BlockOperator BlockOperator::dense(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("BlockOperator::dense: matrix must be square");
    BlockOperator out(1, static_cast<int>(m.rows()));
    out.add_term(0, 0, 1.0, std::make_shared<const Matrix>(m));
    return out;
}

void BlockOperator::add_term(int a, int b, Complex coef, std::shared_ptr<const Matrix> op) {
    if (a < 0 || a >= dimA_ || b < 0 || b >= dimA_) throw std::out_of_range("BlockOperator::add_term: block index");
    if (!op || op->rows() != dimB_ || op->cols() != dimB_)
        throw std::invalid_argument("BlockOperator::add_term: operator has the wrong size");
    terms_.push_back({a, b, coef, std::move(op)});
}

Matrix BlockOperator::to_dense() const {
    Matrix out = Matrix::Zero(dim(), dim());
    add_to(out, 1.0);
    return out;
}

double BlockOperator::inner(const Matrix& x) const {
    // Tr[(|a><b| (x) O) X] = Tr[O X_ba]
    Complex acc = 0;
    for (const auto& t : terms_) {
        auto blk = x.block(t.b * dimB_, t.a * dimB_, dimB_, dimB_);
        acc += t.coef * (t.op->cwiseProduct(blk.transpose())).sum();
    }
    return acc.real();
}

void BlockOperator::add_to(Matrix& acc, Complex y) const {
    for (const auto& t : terms_) acc.block(t.a * dimB_, t.b * dimB_, dimB_, dimB_) += (y * t.coef) * (*t.op);
}

Matrix BlockOperator::sandwich(const Matrix& w) const {
    Matrix out = Matrix::Zero(w.rows(), w.cols());
    for (const auto& t : terms_) {
        auto left = w.middleCols(t.a * dimB_, dimB_);
        auto right = w.middleRows(t.b * dimB_, dimB_);
        out.noalias() += t.coef * (left * (*t.op)) * right;
    }
    return out;
}

BlockOperator BlockOperator::scaled(double f) const {
    BlockOperator out = *this;
    for (auto& t : out.terms_) t.coef *= f;
    return out;
}

double BlockOperator::frobenius_norm() const { return to_dense().norm(); }

}  // namespace pskqkd

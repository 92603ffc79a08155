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

#include "pskqkd/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pskqkd {

std::string to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::MaxIter: return "max_iter";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inner(const Matrix& a, const Matrix& b) { return (a.cwiseProduct(b.conjugate())).sum().real(); }

// Largest t with X + t dX >= 0, given the Cholesky factor of X.
double max_step(const Eigen::LLT<Matrix>& llt, const Matrix& d) {
    Matrix t = llt.matrixL().solve(d);
    Matrix u = llt.matrixL().solve(t.adjoint());
    double lo = min_eigenvalue(hermitian_part(u));
    return lo < 0 ? -1.0 / lo : kInf;
}

double max_step(const RealVector& x, const RealVector& dx) {
    double a = kInf;
    for (Eigen::Index k = 0; k < x.size(); ++k)
        if (dx(k) < 0) a = std::min(a, -x(k) / dx(k));
    return a;
}

struct Workspace {
    int n = 0, m = 0, l = 0;
    std::vector<BlockOperator> A;
    RealMatrix Alp;  // m x l
    RealVector b;
    Matrix C;
    RealVector c;

    RealVector apply(const Matrix& X, const RealVector& x) const {
        RealVector out(m);
        for (int i = 0; i < m; ++i) out(i) = A[i].inner(X);
        if (l > 0) out += Alp * x;
        return out;
    }
    Matrix adjoint(const RealVector& y) const {
        Matrix out = Matrix::Zero(n, n);
        for (int i = 0; i < m; ++i)
            if (y(i) != 0) A[i].add_to(out, y(i));
        return out;
    }
    RealVector adjoint_lp(const RealVector& y) const {
        if (l == 0) return RealVector();
        return Alp.transpose() * y;
    }
};

}  // namespace

ConicSolution solve_conic(const ConicProblem& prob, const SdpOptions& opts) {
    Workspace ws;
    ws.n = static_cast<int>(prob.C.rows());
    ws.m = static_cast<int>(prob.A.size());
    ws.l = static_cast<int>(prob.c_lp.size());
    const int n = ws.n, m = ws.m, l = ws.l;
    if (prob.C.cols() != n || n == 0) throw std::invalid_argument("solve_conic: objective must be square and nonempty");
    if (static_cast<int>(prob.b.size()) != m) throw std::invalid_argument("solve_conic: rhs size mismatch");
    if (l > 0 && static_cast<int>(prob.a_lp.size()) != m)
        throw std::invalid_argument("solve_conic: a_lp must have one entry per constraint");
    for (const auto& a : prob.A)
        if (a.dim() != n) throw std::invalid_argument("solve_conic: constraint dimension mismatch");

    // Row-normalise constraints, then scale b and C to unit size.
    RealVector r(m);
    ws.Alp = RealMatrix::Zero(m, l);
    for (int i = 0; i < m; ++i) {
        if (l > 0)
            for (auto [k, v] : prob.a_lp[i]) ws.Alp(i, k) += v;
        double nrm = std::sqrt(std::pow(prob.A[i].frobenius_norm(), 2) + ws.Alp.row(i).squaredNorm());
        if (!(nrm > 0)) throw std::invalid_argument("solve_conic: zero constraint row");
        r(i) = 1.0 / nrm;
        ws.A.push_back(prob.A[i].scaled(r(i)));
        ws.Alp.row(i) *= r(i);
    }
    ws.b = RealVector(m);
    for (int i = 0; i < m; ++i) ws.b(i) = prob.b[i] * r(i);
    const double sc_b = std::max(1.0, ws.b.norm());
    ws.b /= sc_b;
    const double sc_c = std::max(1.0, std::sqrt(prob.C.squaredNorm() + (l > 0 ? prob.c_lp.squaredNorm() : 0.0)));
    ws.C = hermitian_part(prob.C) / sc_c;
    ws.c = l > 0 ? RealVector(prob.c_lp / sc_c) : RealVector();
    const double nb = ws.b.norm();
    const double nc = std::sqrt(ws.C.squaredNorm() + (l > 0 ? ws.c.squaredNorm() : 0.0));

    const double start = std::max(10.0, std::sqrt(static_cast<double>(n)));
    Matrix X = start * Matrix::Identity(n, n);
    Matrix S = start * Matrix::Identity(n, n);
    RealVector x = RealVector::Constant(l, start);
    RealVector s = RealVector::Constant(l, start);
    RealVector y = RealVector::Zero(m);

    ConicSolution sol;
    auto finish = [&](SdpStatus st, int it) {
        sol.status = st;
        sol.iterations = it;
        sol.X = sc_b * X;
        sol.x = sc_b * x;
        sol.S = sc_c * S;
        sol.s = sc_c * s;
        sol.y = RealVector(m);
        for (int i = 0; i < m; ++i) sol.y(i) = sc_c * y(i) * r(i);
        sol.primal_obj = inner(prob.C, sol.X) + (l > 0 ? prob.c_lp.dot(sol.x) : 0.0);
        sol.dual_obj = 0;
        for (int i = 0; i < m; ++i) sol.dual_obj += prob.b[i] * sol.y(i);
        return sol;
    };

    const double x0norm = X.norm();
    // Lack-of-progress guard for degenerate instances.
    double stall_ref = kInf;
    int stall_it = 0;
    for (int it = 0; it < opts.max_iters; ++it) {
        RealVector rp = ws.b - ws.apply(X, x);
        Matrix Rd = ws.C - S - ws.adjoint(y);
        Rd = hermitian_part(Rd);
        RealVector rd = l > 0 ? RealVector(ws.c - s - ws.adjoint_lp(y)) : RealVector();
        double gap = inner(X, S) + (l > 0 ? x.dot(s) : 0.0);
        double mu = gap / (n + l);
        double pobj = inner(ws.C, X) + (l > 0 ? ws.c.dot(x) : 0.0);
        double dobj = ws.b.dot(y);
        sol.primal_infeas = rp.norm() / (1 + nb);
        sol.dual_infeas = std::sqrt(Rd.squaredNorm() + (l > 0 ? rd.squaredNorm() : 0.0)) / (1 + nc);
        // Gap test on the caller's scale, feasibility on the normalised rows.
        const double f = sc_b * sc_c;
        sol.rel_gap = f * std::max(std::abs(pobj - dobj), gap) / (1 + f * std::abs(pobj) + f * std::abs(dobj));
        if (sol.primal_infeas < opts.feas_tol && sol.dual_infeas < opts.feas_tol && sol.rel_gap < opts.gap_tol) {
            return finish(SdpStatus::Optimal, it);
        }
        if (sol.primal_infeas < opts.feas_tol && sol.dual_infeas < opts.feas_tol) {
            if (sol.rel_gap < 0.5 * stall_ref) {
                stall_ref = sol.rel_gap;
                stall_it = it;
            } else if (it - stall_it >= 30) {
                return finish(SdpStatus::MaxIter, it);
            }
        }
        // Certificates of infeasibility once an iterate has run away.
        double ny = y.norm();
        if (ny > 1e8) {
            Matrix Ay = ws.adjoint(y) / ny;
            double lp_ok = l > 0 ? (-ws.adjoint_lp(y) / ny).minCoeff() : 0.0;
            if (ws.b.dot(y) / ny > 1e-8 && min_eigenvalue(hermitian_part(-Ay)) > -1e-8 && lp_ok > -1e-8) {
                return finish(SdpStatus::Infeasible, it);
            }
        }
        double nx = std::sqrt(X.squaredNorm() + (l > 0 ? x.squaredNorm() : 0.0));
        if (nx > 1e8 * x0norm) {
            RealVector ax = ws.apply(X, x) / nx;
            if (pobj / nx < -1e-8 && ax.norm() < 1e-6) return finish(SdpStatus::Infeasible, it);
        }

        // Nesterov-Todd scaling point W = G G^H with G^H S G = G^-1 X G^-H = V.
        Eigen::LLT<Matrix> lx(X);
        Eigen::LLT<Matrix> ls(S);
        if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return finish(SdpStatus::NumericalFailure, it);
        Matrix L = lx.matrixL();
        Matrix Mls = hermitian_part(L.adjoint() * S * L);
        auto sd = eigh(Mls);
        if (sd.eigenvalues(0) <= 0) return finish(SdpStatus::NumericalFailure, it);
        RealVector v = sd.eigenvalues.cwiseSqrt();
        RealVector qr = sd.eigenvalues.array().pow(-0.25);
        Matrix G = L * sd.eigenvectors * qr.asDiagonal();
        Matrix Ginv = qr.cwiseInverse().asDiagonal() * sd.eigenvectors.adjoint() * lx.matrixL().solve(Matrix::Identity(n, n));
        Matrix W = G * G.adjoint();
        RealVector wl = l > 0 ? RealVector(x.cwiseQuotient(s)) : RealVector();

        std::vector<Matrix> WAW(m);
        for (int j = 0; j < m; ++j) WAW[j] = ws.A[j].sandwich(W);
        RealMatrix M(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j <= i; ++j) {
                double v_ij = ws.A[i].inner(WAW[j]);
                if (l > 0) v_ij += (ws.Alp.row(i).array() * wl.transpose().array() * ws.Alp.row(j).array()).sum();
                M(i, j) = v_ij;
                M(j, i) = v_ij;
            }
        }
        Eigen::LLT<RealMatrix> lm(M);
        if (lm.info() != Eigen::Success) {
            M.diagonal().array() += 1e-14 * M.diagonal().maxCoeff();
            lm.compute(M);
            if (lm.info() != Eigen::Success) return finish(SdpStatus::NumericalFailure, it);
        }
        Matrix WRdW = W * Rd * W;

        struct Dir {
            Matrix dX, dS;
            RealVector dx, ds, dy;
        };
        auto solve_dir = [&](const Matrix& Rtil, const RealVector& rc) {
            Matrix T(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) T(i, j) = Rtil(i, j) / (v(i) + v(j));
            Matrix Rc = G * T * G.adjoint();
            Matrix base = Rc - WRdW;
            RealVector h = rp - ws.apply(base, l > 0 ? RealVector(rc - wl.cwiseProduct(rd)) : RealVector());
            Dir d;
            d.dy = lm.solve(h);
            d.dS = hermitian_part(Rd - ws.adjoint(d.dy));
            d.dX = Rc;
            for (int j = 0; j < m; ++j) d.dX += d.dy(j) * WAW[j];
            d.dX = hermitian_part(d.dX - WRdW);
            if (l > 0) {
                d.ds = rd - ws.adjoint_lp(d.dy);
                d.dx = rc - wl.cwiseProduct(d.ds);
            }
            // Iterative refinement: the Schur matrix loses accuracy as X
            // approaches the boundary, so re-measure A(dX) against rp.
            for (int pass = 0; pass < 2; ++pass) {
                RealVector e = rp - ws.apply(d.dX, l > 0 ? d.dx : RealVector());
                if (e.norm() <= 1e-3 * opts.feas_tol * (1 + nb)) break;
                RealVector dd = lm.solve(e);
                d.dy += dd;
                d.dS -= ws.adjoint(dd);
                for (int j = 0; j < m; ++j) d.dX += dd(j) * WAW[j];
                d.dS = hermitian_part(d.dS);
                d.dX = hermitian_part(d.dX);
                if (l > 0) {
                    RealVector t = ws.adjoint_lp(dd);
                    d.ds -= t;
                    d.dx += wl.cwiseProduct(t);
                }
            }
            return d;
        };

        // Predictor.
        Matrix R0 = -2.0 * Matrix(v.array().square().matrix().asDiagonal());
        RealVector rc0 = l > 0 ? RealVector(-x) : RealVector();
        Dir aff = solve_dir(R0, rc0);
        double ap = std::min(1.0, max_step(lx, aff.dX));
        double ad = std::min(1.0, max_step(ls, aff.dS));
        if (l > 0) {
            ap = std::min(ap, max_step(x, aff.dx));
            ad = std::min(ad, max_step(s, aff.ds));
        }
        double gap_aff = inner(X + ap * aff.dX, S + ad * aff.dS);
        if (l > 0) gap_aff += (x + ap * aff.dx).dot(s + ad * aff.ds);
        double sigma = std::clamp(std::pow(gap_aff / gap, 3.0), 0.0, 1.0);

        // Corrector.
        Matrix dXt = Ginv * aff.dX * Ginv.adjoint();
        Matrix dSt = G.adjoint() * aff.dS * G;
        Matrix R1 = 2.0 * sigma * mu * Matrix::Identity(n, n) + R0 - (dXt * dSt + dSt * dXt);
        RealVector rc1;
        if (l > 0) {
            RealVector num = (sigma * mu - x.array() * s.array() - aff.dx.array() * aff.ds.array()).matrix();
            rc1 = num.cwiseQuotient(s);
        }
        Dir dir = solve_dir(hermitian_part(R1), rc1);
        double tau = 0.9 + 0.09 * std::min(ap, ad);
        double sp = max_step(lx, dir.dX);
        double sd_ = max_step(ls, dir.dS);
        if (l > 0) {
            sp = std::min(sp, max_step(x, dir.dx));
            sd_ = std::min(sd_, max_step(s, dir.ds));
        }
        sp = std::min(1.0, tau * sp);
        sd_ = std::min(1.0, tau * sd_);
        X = hermitian_part(X + sp * dir.dX);
        S = hermitian_part(S + sd_ * dir.dS);
        y += sd_ * dir.dy;
        if (l > 0) {
            x += sp * dir.dx;
            s += sd_ * dir.ds;
        }
        if (sp < 1e-12 && sd_ < 1e-12) return finish(SdpStatus::NumericalFailure, it + 1);
    }
    return finish(SdpStatus::MaxIter, opts.max_iters);
}

SdpSolution solve_linear_sdp(const LinearSdp& prob, const SdpOptions& opts) {
    const Eigen::Index n = prob.objective.rows();
    if (prob.constraints.size() != prob.rhs.size()) throw std::invalid_argument("solve_linear_sdp: rhs size mismatch");
    bool has_offset = prob.psd_offset.size() > 0;
    if (has_offset && prob.psd_offset.rows() != n) throw std::invalid_argument("solve_linear_sdp: offset size mismatch");
    ConicProblem cp;
    cp.C = prob.objective;
    cp.A = prob.constraints;
    cp.b = prob.rhs;
    if (has_offset)
        for (std::size_t i = 0; i < cp.b.size(); ++i) cp.b[i] += cp.A[i].inner(prob.psd_offset);
    ConicSolution cs = solve_conic(cp, opts);
    SdpSolution out;
    out.status = cs.status;
    out.iterations = cs.iterations;
    out.primal = has_offset ? Matrix(cs.X - prob.psd_offset) : cs.X;
    out.dual = cs.y;
    out.primal_obj = inner(prob.objective, out.primal);
    // Dual bound for the shifted variable: b'.y - <C, offset>.
    out.dual_obj = cs.dual_obj - (has_offset ? inner(prob.objective, prob.psd_offset) : 0.0);
    for (std::size_t i = 0; i < prob.rhs.size(); ++i) {
        out.feasibility_residual = std::max(out.feasibility_residual, std::abs(prob.constraints[i].inner(out.primal) - prob.rhs[i]));
    }
    return out;
}

}  // namespace pskqkd

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

#include <string>
#include <utility>
#include <vector>

#include "pskqkd/block_operator.hpp"
#include "pskqkd/linalg.hpp"

namespace pskqkd {

enum class SdpStatus { Optimal, MaxIter, Infeasible, NumericalFailure };

std::string to_string(SdpStatus s);

struct SdpOptions {
    int max_iters = 100;
    double feas_tol = 1e-8;  // relative primal and dual residual
    double gap_tol = 1e-7;   // relative duality gap
};

/// Conic program over one Hermitian PSD block X and a nonnegative vector x:
///
///   min <C, X> + c.x   s.t.  <A_i, X> + a_i.x = b_i,  X >= 0, x >= 0
///   max b.y            s.t.  C - sum_i y_i A_i >= 0,  c - sum_i y_i a_i >= 0
///
/// a_lp[i] lists the nonzeros of a_i; leave c_lp empty for a pure SDP.
struct ConicProblem {
    Matrix C;
    std::vector<BlockOperator> A;
    std::vector<double> b;
    RealVector c_lp;
    std::vector<std::vector<std::pair<int, double>>> a_lp;
};

struct ConicSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    Matrix X;
    RealVector x;
    RealVector y;
    Matrix S;
    RealVector s;
    double primal_obj = 0;
    double dual_obj = 0;
    double primal_infeas = 0;
    double dual_infeas = 0;
    double rel_gap = 0;
    int iterations = 0;
};

/// Infeasible-start primal-dual interior point method, Nesterov-Todd
/// direction with Mehrotra predictor-corrector, working directly in complex
/// arithmetic.
ConicSolution solve_conic(const ConicProblem& prob, const SdpOptions& opts = {});

/// min Tr[objective X]  s.t.  Tr[A_i X] = b_i,  psd_offset + X >= 0.
///
/// With psd_offset = rho_k and b = 0 this is the direction-finding step of
/// Frank-Wolfe; with psd_offset = 0 it is an ordinary SDP in standard form.
struct LinearSdp {
    Matrix objective;
    std::vector<BlockOperator> constraints;
    std::vector<double> rhs;
    Matrix psd_offset;  // empty means zero
};

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    Matrix primal;      // X, not psd_offset + X
    RealVector dual;    // y
    double primal_obj = 0;
    double dual_obj = 0;
    double feasibility_residual = 0;  // max_i |Tr[A_i X] - b_i|
    int iterations = 0;
};

SdpSolution solve_linear_sdp(const LinearSdp& prob, const SdpOptions& opts = {});

/// max_y  gamma.y - eps' ||y||_1   s.t.  lmi_const - sum_i y_i Gamma_i >= 0.
///
/// The returned y is always certified: the LMI slack is recomputed and, if
/// needed, pushed back inside the cone along identity_combination (c with
/// sum_i c_i Gamma_i = I) or by shrinking toward y = 0.
struct LmiMaxProblem {
    std::vector<double> gamma;
    Matrix lmi_const;
    std::vector<BlockOperator> lmi_terms;
    double eps_prime = 0.0;
    std::vector<double> identity_combination;  // may be empty
};

struct LmiMaxSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    RealVector y;
    double value = 0;          // gamma.y - eps' ||y||_1 at the certified y
    double min_slack_eig = 0;  // smallest eigenvalue of the LMI slack at y
    bool repaired = false;
    int iterations = 0;
};

LmiMaxSolution solve_lmi_max(const LmiMaxProblem& prob, const SdpOptions& opts = {});

}  // namespace pskqkd

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
#include <limits>
#include <stdexcept>

#include "pskqkd/sdp.hpp"

namespace pskqkd {

namespace {

Matrix slack(const LmiMaxProblem& p, const RealVector& y) {
    Matrix s = p.lmi_const;
    for (std::size_t i = 0; i < p.lmi_terms.size(); ++i) p.lmi_terms[i].add_to(s, -y(static_cast<Eigen::Index>(i)));
    return hermitian_part(s);
}

double objective(const LmiMaxProblem& p, const RealVector& y) {
    double v = 0;
    for (std::size_t i = 0; i < p.gamma.size(); ++i) v += p.gamma[i] * y(static_cast<Eigen::Index>(i));
    return v - p.eps_prime * y.lpNorm<1>();
}

}  // namespace

LmiMaxSolution solve_lmi_max(const LmiMaxProblem& p, const SdpOptions& opts) {
    const std::size_t m = p.lmi_terms.size();
    if (p.gamma.size() != m) throw std::invalid_argument("solve_lmi_max: gamma size mismatch");
    if (!(p.eps_prime >= 0)) throw std::invalid_argument("solve_lmi_max: eps_prime must be >= 0");
    if (!p.identity_combination.empty() && p.identity_combination.size() != m)
        throw std::invalid_argument("solve_lmi_max: identity_combination size mismatch");

    // y = y+ - y-, both nonnegative; the LP block carries y+ and y- themselves.
    ConicProblem cp;
    cp.C = p.lmi_const;
    cp.c_lp = RealVector::Zero(static_cast<Eigen::Index>(2 * m));
    for (std::size_t i = 0; i < m; ++i) {
        cp.A.push_back(p.lmi_terms[i]);
        cp.b.push_back(p.gamma[i] - p.eps_prime);
        cp.a_lp.push_back({{static_cast<int>(i), -1.0}});
    }
    for (std::size_t i = 0; i < m; ++i) {
        cp.A.push_back(p.lmi_terms[i].scaled(-1.0));
        cp.b.push_back(-p.gamma[i] - p.eps_prime);
        cp.a_lp.push_back({{static_cast<int>(m + i), -1.0}});
    }
    ConicSolution cs = solve_conic(cp, opts);

    LmiMaxSolution out;
    out.status = cs.status;
    out.iterations = cs.iterations;
    out.y = cs.y.head(static_cast<Eigen::Index>(m)) - cs.y.tail(static_cast<Eigen::Index>(m));
    if (!out.y.allFinite()) out.y.setZero();

    const double delta = 1e-8 * std::max(1.0, p.lmi_const.norm());
    double lo = min_eigenvalue(slack(p, out.y));
    if (lo < 0) {
        out.repaired = true;
        if (!p.identity_combination.empty()) {
            // sum_i c_i Gamma_i = I, so moving y by t c shifts the slack by -t I.
            for (std::size_t i = 0; i < m; ++i) out.y(static_cast<Eigen::Index>(i)) += (lo - delta) * p.identity_combination[i];
        } else if (min_eigenvalue(hermitian_part(p.lmi_const)) >= 0) {
            // y = 0 is feasible; bisect along the segment toward it.
            double a = 0, b = 1;
            for (int k = 0; k < 60; ++k) {
                double t = 0.5 * (a + b);
                if (min_eigenvalue(slack(p, t * out.y)) >= 0) {
                    a = t;
                } else {
                    b = t;
                }
            }
            out.y *= a;
        } else {
            out.status = SdpStatus::Infeasible;
        }
    }
    out.min_slack_eig = min_eigenvalue(slack(p, out.y));
    if (out.min_slack_eig < 0 || cs.status == SdpStatus::Infeasible) {
        out.status = SdpStatus::Infeasible;
        out.value = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.value = objective(p, out.y);
    return out;
}

}  // namespace pskqkd

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

#include <optional>
#include <string>
#include <vector>

#include "pskqkd/channel.hpp"
#include "pskqkd/operators.hpp"
#include "pskqkd/protocol.hpp"
#include "pskqkd/sdp.hpp"

namespace pskqkd {

enum class Strategy { Radial, Cross, Radial8 };

std::string to_string(Strategy s);
/// Accepts "ra", "cross", "8ra". Throws std::invalid_argument otherwise.
Strategy parse_strategy(const std::string& s);

struct SolverOptions {
    int max_fw_iters = 150;
    double eps_fw = 1e-7;
    double eps_tilde = 1e-11;  // depolarising perturbation inside the objective
    double line_search_tol = 1e-10;
    SdpOptions sdp;
};

/// One point of the key-rate computation.
struct ScenarioConfig {
    int n_states = 4;
    double alpha = 0.7;
    ChannelParams channel;
    double beta = 0.95;  // reconciliation efficiency
    int cutoff = 12;
    std::optional<TrustedDetector> detector;  // empty means untrusted
    Strategy strategy = Strategy::Radial;
    double delta_r = 0.0;
    double delta_a = 0.0;
    double delta_c = 0.0;
    SolverOptions solver;

    /// Throws std::invalid_argument on an inconsistent or out-of-range field.
    void validate() const;
};

/// Default iteration budget: 150 for four states, 200 for eight.
int default_fw_iters(int n_states);

RegionOperators build_regions(const ScenarioConfig& cfg);

/// Key map G(rho) = K rho K^dagger with K = sum_z |z>_R (x) I_A (x) sqrt(R_z),
/// the pinching Z over R, and the perturbation D(X) = (1 - e) X + e I / d'.
struct PostprocessingMaps {
    int dimA = 0;
    int dimB = 0;
    double eps_tilde = 1e-11;
    std::vector<Matrix> sqrt_regions;  // sqrt(R_z) on H_B
    Matrix region_sum;                 // sum_z R_z on H_B

    int n_keys() const { return static_cast<int>(sqrt_regions.size()); }
    int dim() const { return dimA * dimB; }
    int dprime() const { return n_keys() * dim(); }
};

PostprocessingMaps build_maps(const RegionOperators& ops, int dimA, double eps_tilde);

struct ObjectiveValue {
    double value = 0;  // bits
    Matrix gradient;
};

/// f(rho) = D(D(G(rho)) || D(Z(G(rho)))) in bits, and its gradient.
///
/// The nonzero spectrum of G(rho) comes from rho^1/2 K^dagger K rho^1/2, so
/// nothing of size d' is ever formed; Z(G(rho)) splits into n_keys blocks.
ObjectiveValue objective_and_gradient(const Matrix& rho, const PostprocessingMaps& maps, bool with_gradient = true);

double objective(const Matrix& rho, const PostprocessingMaps& maps);

/// Dense d' x d' versions, for cross-checking on small sizes.
Matrix apply_key_map(const Matrix& rho, const PostprocessingMaps& maps);
Matrix apply_pinching(const Matrix& g, int n_blocks);

struct InitialPoint {
    Matrix rho;
    SdpStatus status = SdpStatus::NumericalFailure;
    double residual = 0;
};

/// Interior feasible point from the zero-objective SDP, projected back onto
/// the affine constraint space.
InitialPoint initial_point(const ConstraintSet& cs, const SdpOptions& opts);

struct FrankWolfeResult {
    Matrix rho;
    std::vector<double> objective_history;  // f at every iterate, non-increasing
    int iterations = 0;
    bool converged = false;      // stopped on the gap test rather than the budget
    double last_gap = 0;         // -Tr[Delta grad f] of the last direction
    int subproblem_failures = 0; // direction SDPs that did not reach "optimal"
    double psd_violation = 0;    // largest eigenvalue clipped by PSD repair
};

FrankWolfeResult frank_wolfe(const Matrix& rho0, const ConstraintSet& cs, const PostprocessingMaps& maps,
                             const SolverOptions& opts);

/// zeta = 2 e (d'-1) log2(d' / (e (d'-1))): the cost of the perturbation.
double perturbation_correction(double eps_tilde, int dprime);

struct Step2Result {
    double lower = 0;       // certified lower bound on min f, bits
    double eps_prime = 0;
    double zeta = 0;
    double linearisation = 0;  // f(rho) - Tr[rho grad f]
    LmiMaxSolution lmi;
};

/// Dual certificate at rho: f(rho) - Tr[rho grad f] + max_y {gamma.y - eps'|y|_1 :
/// sum y_i Gamma_i <= grad f} - zeta. lower = -inf if no feasible y exists.
Step2Result step2_lower_bound(const Matrix& rho, const ConstraintSet& cs, const PostprocessingMaps& maps,
                              double eps_prime, const SolverOptions& opts);

struct PostselectionStats {
    double p_pass = 0;
    double delta_ec = 0;  // (1-beta) H(Z) + beta H(Z|X) on the post-selected distribution
    RealMatrix joint;     // P(x, z), not conditioned
};

PostselectionStats postselection_stats(const Matrix& rho, const Constellation& c, const RegionOperators& ops,
                                       double beta);

struct KeyRateResult {
    double step1_upper = 0;  // f at the last Frank-Wolfe iterate
    double step2_lower = 0;  // certified lower bound on min f
    double p_pass = 0;
    double delta_ec = 0;
    double eps_prime = 0;
    double zeta_eps = 0;
    double final_rate = 0;     // step2_lower - p_pass delta_ec
    double reported_rate = 0;  // max(0, final_rate)
    int iterations = 0;
    std::string status;        // "optimal" or "degraded"
    double wallclock_s = 0;
    bool fw_converged = false;
    double fw_gap = 0;
    std::vector<double> objective_history;
    Matrix rho;           // last Frank-Wolfe iterate
    RealVector dual_y;    // step-2 dual point, one entry per constraint
    double min_slack_eig = 0;
};

KeyRateResult compute_key_rate(const ScenarioConfig& cfg);

}  // namespace pskqkd

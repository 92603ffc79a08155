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

#include "pskqkd/keyrate.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pskqkd {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double xlog2x(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

// (I_A (x) O) X (I_A (x) O) for Hermitian O, block by block.
Matrix apply_local(const Matrix& x, const Matrix& o, int dimA) {
    const Eigen::Index dB = o.rows();
    Matrix out(x.rows(), x.cols());
    for (int a = 0; a < dimA; ++a)
        for (int b = 0; b < dimA; ++b) out.block(a * dB, b * dB, dB, dB) = o * x.block(a * dB, b * dB, dB, dB) * o;
    return out;
}

// (I_A (x) O) X
Matrix left_local(const Matrix& o, const Matrix& x, int dimA) {
    const Eigen::Index dB = o.rows();
    Matrix out(x.rows(), x.cols());
    for (int a = 0; a < dimA; ++a) out.middleRows(a * dB, dB) = o * x.middleRows(a * dB, dB);
    return out;
}

// Orthogonal projection onto {X : Tr[Gamma_i X] = target_i}.
class AffineProjector {
  public:
    explicit AffineProjector(const ConstraintSet& cs) : cs_(cs) {
        const int m = static_cast<int>(cs.size());
        RealMatrix g(m, m);
        std::vector<Matrix> dense;
        for (const auto& op : cs.ops) dense.push_back(op.to_dense());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j <= i; ++j) g(i, j) = g(j, i) = cs.ops[i].inner(dense[j]);
        ldlt_.compute(g);
    }
    void project(Matrix& x, const std::vector<double>& target) const {
        const int m = static_cast<int>(cs_.size());
        RealVector r(m);
        for (int i = 0; i < m; ++i) r(i) = cs_.ops[i].inner(x) - target[i];
        RealVector c = ldlt_.solve(r);
        for (int i = 0; i < m; ++i) cs_.ops[i].add_to(x, -c(i));
        x = hermitian_part(x);
    }

  private:
    const ConstraintSet& cs_;
    Eigen::LDLT<RealMatrix> ldlt_;
};

}  // namespace

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Radial: return "ra";
        case Strategy::Cross: return "cross";
        case Strategy::Radial8: return "8ra";
    }
    return "unknown";
}

Strategy parse_strategy(const std::string& s) {
    if (s == "ra" || s == "raPS") return Strategy::Radial;
    if (s == "cross" || s == "cPS") return Strategy::Cross;
    if (s == "8ra" || s == "8raPS") return Strategy::Radial8;
    throw std::invalid_argument("unknown strategy '" + s + "'");
}

int default_fw_iters(int n_states) { return n_states == 8 ? 200 : 150; }

void ScenarioConfig::validate() const {
    if (n_states != 4 && n_states != 8) throw std::invalid_argument("n_states must be 4 or 8");
    if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
    if (!(channel.distance_km >= 0)) throw std::invalid_argument("distance must be >= 0");
    if (!(channel.excess_noise >= 0)) throw std::invalid_argument("excess noise must be >= 0");
    if (!(beta >= 0 && beta <= 1)) throw std::invalid_argument("beta must lie in [0, 1]");
    if (cutoff < 2) throw std::invalid_argument("cutoff must be >= 2");
    if (!(delta_r >= 0 && delta_a >= 0 && delta_c >= 0)) throw std::invalid_argument("postselection parameters must be >= 0");
    if ((strategy == Strategy::Radial8) != (n_states == 8))
        throw std::invalid_argument("strategy " + to_string(strategy) + " does not fit " + std::to_string(n_states) + " states");
    if (delta_a >= std::numbers::pi / n_states) throw std::invalid_argument("delta_a must be below pi / n_states");
    if (solver.max_fw_iters < 1) throw std::invalid_argument("max_fw_iters must be >= 1");
    if (!(solver.eps_tilde > 0 && solver.eps_tilde < 1)) throw std::invalid_argument("eps_tilde must lie in (0, 1)");
    if (detector) TrustedDetector(detector->eta_d, detector->nu_el);
}

RegionOperators build_regions(const ScenarioConfig& cfg) {
    if (cfg.detector) {
        const auto& d = *cfg.detector;
        switch (cfg.strategy) {
            case Strategy::Radial: return trusted_region_ops_ra(cfg.cutoff, cfg.delta_r, cfg.delta_a, d);
            case Strategy::Radial8: return trusted_region_ops_8ra(cfg.cutoff, cfg.delta_r, cfg.delta_a, d);
            case Strategy::Cross: return trusted_region_ops_cross(cfg.cutoff, cfg.delta_c, d);
        }
    }
    switch (cfg.strategy) {
        case Strategy::Radial: return region_ops_ra(cfg.cutoff, cfg.delta_r, cfg.delta_a);
        case Strategy::Radial8: return region_ops_8ra(cfg.cutoff, cfg.delta_r, cfg.delta_a);
        case Strategy::Cross: return region_ops_cross(cfg.cutoff, cfg.delta_c);
    }
    throw std::logic_error("build_regions: unreachable");
}

PostprocessingMaps build_maps(const RegionOperators& ops, int dimA, double eps_tilde) {
    PostprocessingMaps m;
    m.dimA = dimA;
    m.dimB = static_cast<int>(ops.regions.front().rows());
    m.eps_tilde = eps_tilde;
    for (const auto& r : ops.regions) m.sqrt_regions.push_back(sqrt_psd(r));
    m.region_sum = Matrix::Zero(m.dimB, m.dimB);
    for (const auto& s : m.sqrt_regions) m.region_sum += s * s;
    return m;
}

ObjectiveValue objective_and_gradient(const Matrix& rho, const PostprocessingMaps& maps, bool with_gradient) {
    const int n = maps.dim();
    if (rho.rows() != n || rho.cols() != n) throw std::invalid_argument("objective: state has the wrong dimension");
    const double e = maps.eps_tilde;
    const double dp = maps.dprime();
    const double floor = e / dp;

    auto sd = eigh(hermitian_part(rho));
    Matrix half = apply_spectral(sd, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
    Matrix P = left_local(maps.region_sum, half, maps.dimA);  // K^dagger K rho^1/2
    auto ms = eigh(hermitian_part(half * P));

    ObjectiveValue out;
    double hg = (dp - n) * xlog2x(floor);
    for (int i = 0; i < n; ++i) hg += xlog2x((1 - e) * std::max(ms.eigenvalues(i), 0.0) + floor);

    double hz = 0;
    std::vector<SpectralDecomposition> blocks;
    for (const auto& s : maps.sqrt_regions) {
        auto bz = eigh(hermitian_part(apply_local(rho, s, maps.dimA)));
        for (int i = 0; i < n; ++i) hz += xlog2x((1 - e) * std::max(bz.eigenvalues(i), 0.0) + floor);
        if (with_gradient) blocks.push_back(std::move(bz));
    }
    out.value = hg - hz;
    if (!with_gradient) return out;

    // K^dagger log D(G) K = log(e/d') K^dagger K + P V diag(log1p(c s)/s) V^dagger P^dagger
    const double c = (1 - e) / floor;
    RealVector phi(n);
    for (int i = 0; i < n; ++i) {
        double s = std::max(ms.eigenvalues(i), 0.0);
        phi(i) = s > 0 ? std::log1p(c * s) / s : c;
    }
    Matrix PV = P * ms.eigenvectors;
    Matrix grad = PV * phi.asDiagonal() * PV.adjoint();
    Matrix kk = Matrix::Zero(n, n);
    for (int a = 0; a < maps.dimA; ++a) kk.block(a * maps.dimB, a * maps.dimB, maps.dimB, maps.dimB) = maps.region_sum;
    grad += std::log(floor) * kk;
    for (std::size_t z = 0; z < maps.sqrt_regions.size(); ++z) {
        Matrix lz = apply_spectral(blocks[z], [&](double x) { return std::log((1 - e) * std::max(x, 0.0) + floor); });
        grad -= apply_local(lz, maps.sqrt_regions[z], maps.dimA);
    }
    out.gradient = hermitian_part(grad) * ((1 - e) / kLn2);
    return out;
}

double objective(const Matrix& rho, const PostprocessingMaps& maps) {
    return objective_and_gradient(rho, maps, false).value;
}

Matrix apply_key_map(const Matrix& rho, const PostprocessingMaps& maps) {
    const int n = maps.dim();
    const int nk = maps.n_keys();
    Matrix K = Matrix::Zero(nk * n, n);
    Matrix id = Matrix::Identity(maps.dimA, maps.dimA);
    for (int z = 0; z < nk; ++z) K.middleRows(z * n, n) = kron(id, maps.sqrt_regions[z]);
    return K * rho * K.adjoint();
}

Matrix apply_pinching(const Matrix& g, int n_blocks) {
    const Eigen::Index b = g.rows() / n_blocks;
    Matrix out = Matrix::Zero(g.rows(), g.cols());
    for (int z = 0; z < n_blocks; ++z) out.block(z * b, z * b, b, b) = g.block(z * b, z * b, b, b);
    return out;
}

InitialPoint initial_point(const ConstraintSet& cs, const SdpOptions& opts) {
    const int n = cs.dimA * cs.dimB;
    LinearSdp lp;
    lp.objective = Matrix::Zero(n, n);
    lp.constraints = cs.ops;
    lp.rhs = cs.values;
    auto s = solve_linear_sdp(lp, opts);
    InitialPoint out;
    out.status = s.status;
    out.rho = s.primal;
    if (out.rho.size() == 0 || !out.rho.allFinite()) {
        out.status = SdpStatus::NumericalFailure;
        out.rho = Matrix::Identity(n, n) / n;
    }
    AffineProjector proj(cs);
    proj.project(out.rho, cs.values);
    out.residual = cs.max_residual(out.rho);
    return out;
}

FrankWolfeResult frank_wolfe(const Matrix& rho0, const ConstraintSet& cs, const PostprocessingMaps& maps,
                             const SolverOptions& opts) {
    FrankWolfeResult res;
    res.rho = rho0;
    AffineProjector proj(cs);
    const std::vector<double> zeros(cs.size(), 0.0);

    auto deriv = [&](const Matrix& r, const Matrix& d) {
        return (objective_and_gradient(r, maps).gradient.cwiseProduct(d.conjugate())).sum().real();
    };

    ObjectiveValue cur = objective_and_gradient(res.rho, maps);
    res.objective_history.push_back(cur.value);
    for (int k = 0; k < opts.max_fw_iters; ++k) {
        LinearSdp lp;
        lp.objective = cur.gradient;
        lp.constraints = cs.ops;
        lp.rhs = zeros;
        lp.psd_offset = res.rho;
        auto sub = solve_linear_sdp(lp, opts.sdp);
        if (sub.status != SdpStatus::Optimal) ++res.subproblem_failures;
        if (sub.primal.size() == 0 || !sub.primal.allFinite()) break;
        Matrix delta = sub.primal;
        proj.project(delta, zeros);
        double gap = -(cur.gradient.cwiseProduct(delta.conjugate())).sum().real();
        res.last_gap = gap;
        res.iterations = k + 1;
        if (gap < opts.eps_fw) {
            res.converged = true;
            break;
        }
        // Root of g(t) = d/dt f(rho + t delta) on [0, 1]. g is increasing
        // (f is convex along the segment) and g(0) = -gap < 0. The bracket
        // [lo, hi] always has g(lo) < 0 <= g(hi); Illinois false-position
        // steps shrink it, with a bisection fallback.
        double lo = 0, hi = 1;
        double glo = -gap, ghi = deriv(res.rho + delta, delta);
        if (ghi <= 0) {
            lo = 1;
        } else {
            int side = 0;
            for (int it = 0; it < 200 && hi - lo > opts.line_search_tol; ++it) {
                double t = (lo * ghi - hi * glo) / (ghi - glo);
                if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
                double g = deriv(res.rho + t * delta, delta);
                if (std::abs(g) <= 1e-13 * gap) {
                    lo = t;
                    break;
                }
                if (g < 0) {
                    lo = t;
                    glo = g;
                    if (side == -1) ghi *= 0.5;
                    side = -1;
                } else {
                    hi = t;
                    ghi = g;
                    if (side == 1) glo *= 0.5;
                    side = 1;
                }
            }
        }
        if (lo <= 0) break;
        Matrix next = hermitian_part(res.rho + lo * delta);
        if (min_eigenvalue(next) < 0) {
            auto pr = psd_project(next);
            res.psd_violation = std::max(res.psd_violation, pr.violation);
            next = pr.matrix;
        }
        ObjectiveValue nv = objective_and_gradient(next, maps);
        if (nv.value > cur.value) break;  // no further numerical progress
        res.rho = std::move(next);
        cur = std::move(nv);
        res.objective_history.push_back(cur.value);
    }
    return res;
}

double perturbation_correction(double eps_tilde, int dprime) {
    double d = dprime;
    return 2 * eps_tilde * (d - 1) * std::log2(d / (eps_tilde * (d - 1)));
}

Step2Result step2_lower_bound(const Matrix& rho, const ConstraintSet& cs, const PostprocessingMaps& maps,
                              double eps_prime, const SolverOptions& opts) {
    ObjectiveValue ov = objective_and_gradient(rho, maps);
    Step2Result out;
    out.eps_prime = eps_prime;
    out.zeta = perturbation_correction(maps.eps_tilde, maps.dprime());
    out.linearisation = ov.value - (ov.gradient.cwiseProduct(rho.conjugate())).sum().real();
    LmiMaxProblem p;
    p.gamma = cs.values;
    p.lmi_const = ov.gradient;
    p.lmi_terms = cs.ops;
    p.eps_prime = eps_prime;
    p.identity_combination = cs.identity_combination;
    out.lmi = solve_lmi_max(p, opts.sdp);
    out.lower = std::isfinite(out.lmi.value) ? out.linearisation + out.lmi.value - out.zeta
                                             : -std::numeric_limits<double>::infinity();
    return out;
}

PostselectionStats postselection_stats(const Matrix& rho, const Constellation& c, const RegionOperators& ops,
                                       double beta) {
    const int N = c.n_states;
    const int nz = static_cast<int>(ops.regions.size());
    const Eigen::Index dB = ops.regions.front().rows();
    PostselectionStats st;
    st.joint = RealMatrix::Zero(N, nz);
    for (int x = 0; x < N; ++x)
        for (int z = 0; z < nz; ++z)
            st.joint(x, z) = std::max(0.0, (rho.block(x * dB, x * dB, dB, dB) * ops.regions[z]).trace().real());
    st.p_pass = st.joint.sum();
    if (st.p_pass <= 0) return st;
    RealMatrix pc = st.joint / st.p_pass;
    std::vector<double> pz(nz, 0.0), px(N, 0.0), pxz;
    for (int x = 0; x < N; ++x)
        for (int z = 0; z < nz; ++z) {
            pz[z] += pc(x, z);
            px[x] += pc(x, z);
            pxz.push_back(pc(x, z));
        }
    double hz = entropy_bits(pz);
    double hz_x = entropy_bits(pxz) - entropy_bits(px);
    st.delta_ec = (1 - beta) * hz + beta * hz_x;
    return st;
}

KeyRateResult compute_key_rate(const ScenarioConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    KeyRateResult out;
    auto c = build_constellation(cfg.n_states, cfg.alpha);
    auto cs = build_constraint_set(c, cfg.cutoff, cfg.channel, cfg.detector);
    auto ops = build_regions(cfg);
    auto maps = build_maps(ops, cfg.n_states, cfg.solver.eps_tilde);

    auto init = initial_point(cs, cfg.solver.sdp);
    Matrix rho0 = init.rho;
    double violation = 0;
    if (min_eigenvalue(rho0) < 0) {
        auto pr = psd_project(rho0);
        violation = pr.violation;
        rho0 = pr.matrix;
    }
    auto fw = frank_wolfe(rho0, cs, maps, cfg.solver);
    violation = std::max(violation, fw.psd_violation);

    double residual = cs.max_residual(fw.rho);
    out.eps_prime = std::max({residual, violation, cfg.solver.sdp.feas_tol});
    auto s2 = step2_lower_bound(fw.rho, cs, maps, out.eps_prime, cfg.solver);
    auto st = postselection_stats(fw.rho, c, ops, cfg.beta);

    out.step1_upper = fw.objective_history.back();
    out.step2_lower = s2.lower;
    out.p_pass = st.p_pass;
    out.delta_ec = st.delta_ec;
    out.final_rate = s2.lower - st.p_pass * st.delta_ec;
    out.reported_rate = std::isfinite(out.final_rate) ? std::max(0.0, out.final_rate) : 0.0;
    out.iterations = fw.iterations;
    out.fw_converged = fw.converged;
    out.fw_gap = fw.last_gap;
    out.objective_history = fw.objective_history;
    out.zeta_eps = s2.zeta;
    out.rho = fw.rho;
    out.dual_y = s2.lmi.y;
    out.min_slack_eig = s2.lmi.min_slack_eig;
    if (!std::isfinite(s2.lower) || init.status != SdpStatus::Optimal || s2.lmi.status != SdpStatus::Optimal) {
        out.status = "degraded";
    } else {
        out.status = "optimal";
    }
    out.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace pskqkd

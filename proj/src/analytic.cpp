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


#include "pskqkd/analytic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pskqkd/protocol.hpp"

namespace pskqkd {

namespace {

constexpr double kPi = std::numbers::pi;

double first_phase(int n_states) {
    if (n_states == 4) return kPi / 4.0;
    if (n_states == 8) return 0.0;
    throw std::invalid_argument("analytic: n_states must be 4 or 8");
}

// Radial integral of r exp(-|r e^{i theta} - c|^2) over r in [0, inf).
double radial_marginal(double theta, double c_abs, double c_arg) {
    const double u = c_abs * std::cos(theta - c_arg);
    const double c2 = c_abs * c_abs;
    return 0.5 * std::exp(-c2) +
           0.5 * std::sqrt(kPi) * u * std::exp(u * u - c2) * std::erfc(-u);
}

double integrate_angle(double lo, double hi, double c_abs, double c_arg) {
    auto f = [&](double t) { return radial_marginal(t, c_abs, c_arg); };
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-14,
                                                                         &err);
}

}  // namespace

EveBasis eve_basis(int n_states, double eve_amp) {
    if (eve_amp < 0.0 || !std::isfinite(eve_amp))
        throw std::invalid_argument("eve_basis: amplitude must be finite and >= 0");
    first_phase(n_states);  // validates n_states
    EveBasis eb;
    eb.n_states = n_states;
    eb.norms.assign(n_states, 0.0);

    const double a2 = eve_amp * eve_amp;
    double term = 1.0;  // a^(2m) / m!
    double total = 0.0;
    for (int m = 0;; ++m) {
        if (m > 0) term *= a2 / m;
        eb.norms[m % n_states] += term;
        total += term;
        if (m >= n_states && m > a2 && term < 1e-18 * total) break;
        if (term == 0.0 && m >= n_states) break;
    }

    eb.overlap_matrix = Matrix::Zero(n_states, n_states);
    const double pref = std::exp(-0.5 * a2);
    for (int x = 0; x < n_states; ++x) {
        const double dtheta = 2.0 * kPi * x / n_states;
        for (int k = 0; k < n_states; ++k)
            eb.overlap_matrix(k, x) = pref * std::sqrt(eb.norms[k]) * std::polar(1.0, k * dtheta);
    }
    return eb;
}

double wedge_probability(Complex state_center, int wedge_index, int n_states) {
    const double theta0 = first_phase(n_states);
    if (wedge_index < 0 || wedge_index >= n_states)
        throw std::invalid_argument("wedge_probability: wedge index out of range");
    const double width = 2.0 * kPi / n_states;
    const double mid = theta0 + wedge_index * width;
    double lo = mid - 0.5 * width;
    double hi = mid + 0.5 * width;
    const double c_abs = std::abs(state_center);
    const double c_arg = std::arg(state_center);

    // Split at the peak direction when it falls inside the wedge.
    double peak = c_arg;
    while (peak < lo) peak += 2.0 * kPi;
    while (peak >= lo + 2.0 * kPi) peak -= 2.0 * kPi;
    double sum = 0.0;
    if (c_abs > 0.0 && peak > lo && peak < hi) {
        sum = integrate_angle(lo, peak, c_abs, c_arg) + integrate_angle(peak, hi, c_abs, c_arg);
    } else {
        sum = integrate_angle(lo, hi, c_abs, c_arg);
    }
    return sum / kPi;
}

LossOnlyRate lossonly_terms(int n_states, double amplitude, double eta, double beta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("lossonly_keyrate: eta in (0, 1]");
    const Constellation c = build_constellation(n_states, amplitude);
    const int n = n_states;
    const double px = 1.0 / n;

    // P(z = j | x = i)
    RealMatrix cond(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cond(i, j) = wedge_probability(std::sqrt(eta) * c.alphas[i], j, n);

    std::vector<double> pz(n, 0.0);
    double h_z_given_x = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(n);
        for (int j = 0; j < n; ++j) {
            row[j] = cond(i, j);
            pz[j] += px * cond(i, j);
        }
        h_z_given_x += px * entropy_bits(row);
    }
    LossOnlyRate out;
    out.mutual_info = entropy_bits(pz) - h_z_given_x;

    const EveBasis eb = eve_basis(n, std::sqrt(1.0 - eta) * amplitude);
    const Matrix& v = eb.overlap_matrix;
    Matrix rho_e = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) rho_e += px * v.col(i) * v.col(i).adjoint();
    double cond_entropy = 0.0;
    for (int j = 0; j < n; ++j) {
        if (pz[j] <= 0.0) continue;
        Matrix rj = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) rj += (px * cond(i, j) / pz[j]) * v.col(i) * v.col(i).adjoint();
        cond_entropy += pz[j] * von_neumann_entropy(rj);
    }
    out.holevo = von_neumann_entropy(rho_e) - cond_entropy;
    out.rate = beta * out.mutual_info - out.holevo;
    return out;
}

double lossonly_keyrate(int n_states, double amplitude, double eta, double beta) {
    return lossonly_terms(n_states, amplitude, eta, beta).rate;
}

double find_optimal_alpha(int n_states, double eta, double beta, double step, double alpha_max) {
    if (!(step > 0.0)) throw std::invalid_argument("find_optimal_alpha: step must be > 0");
    double best_alpha = step;
    double best_rate = -std::numeric_limits<double>::infinity();
    for (int k = 1; k * step <= alpha_max + 1e-12; ++k) {
        const double a = k * step;
        const double r = lossonly_keyrate(n_states, a, eta, beta);
        if (r > best_rate) {
            best_rate = r;
            best_alpha = a;
        }
    }
    return best_alpha;
}

double ber_at(const BerConfig& cfg, Complex gamma) {
    const int n = static_cast<int>(cfg.weights.size());
    const Constellation c = build_constellation(n, cfg.amplitude);
    const double width = 2.0 * kPi / n;
    // Decided sector: nearest constellation phase.
    double rel = (std::arg(gamma) - c.phases[0]) / width;
    int sector = static_cast<int>(std::lround(rel)) % n;
    if (sector < 0) sector += n;

    // Shift exponents by the smallest distance so far-out points do not underflow.
    std::vector<double> d2(n);
    double dmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        d2[k] = std::norm(c.alphas[k] - gamma);
        dmin = std::min(dmin, d2[k]);
    }
    double num = 0.0;
    double den = 0.0;
    for (int k = 0; k < n; ++k) {
        const double e = std::exp(-(d2[k] - dmin));
        num += cfg.weights[((k - sector) % n + n) % n] * e;
        den += e;
    }
    return 0.5 * num / den;
}

BerGrid ber_map(const BerConfig& cfg) {
    const int n = static_cast<int>(cfg.weights.size());
    if (n != 4 && n != 8) throw std::invalid_argument("ber_map: weights must have 4 or 8 entries");
    if (cfg.resolution < 2) throw std::invalid_argument("ber_map: resolution must be >= 2");
    if (!(cfg.amplitude > 0.0)) throw std::invalid_argument("ber_map: amplitude must be > 0");
    const double hw = cfg.half_width < 0.0 ? 3.0 * cfg.amplitude : cfg.half_width;
    const int r = cfg.resolution;
    BerGrid g;
    g.axis.resize(r);
    // Exactly antisymmetric about the centre.
    for (int i = 0; i < r; ++i) g.axis[i] = hw * (2.0 * i - (r - 1)) / (r - 1);
    g.values.resize(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) g.values(i, j) = ber_at(cfg, Complex(g.axis[j], g.axis[i]));
    return g;
}

}  // namespace pskqkd

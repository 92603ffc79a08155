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

#include "pskqkd/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace pskqkd {

double transmittance(double distance_km, double loss_exponent) {
    if (!(distance_km >= 0)) throw std::invalid_argument("transmittance: distance must be >= 0");
    return std::pow(10.0, -loss_exponent * distance_km);
}

double ChannelParams::transmittance() const { return pskqkd::transmittance(distance_km, loss_exponent); }

std::vector<std::array<double, 4>> expected_moments_untrusted(const Constellation& c, const ChannelParams& ch) {
    double eta = ch.transmittance();
    double xi = ch.excess_noise;
    std::vector<std::array<double, 4>> out;
    for (Complex a : c.alphas) {
        out.push_back({std::sqrt(2 * eta) * a.real(), std::sqrt(2 * eta) * a.imag(),
                       eta * std::norm(a) + eta * xi / 2, 2 * eta * (a * a).real()});
    }
    return out;
}

std::vector<std::array<double, 4>> expected_moments_trusted(const Constellation& c, const ChannelParams& ch,
                                                            const TrustedDetector& det) {
    double eta = ch.transmittance();
    double xi = ch.excess_noise;
    double ed = det.eta_d;
    std::vector<std::array<double, 4>> out;
    for (Complex a : c.alphas) {
        double base = 1 + 0.5 * ed * eta * xi + det.nu_el;
        out.push_back({std::sqrt(2 * ed * eta) * a.real(), std::sqrt(2 * ed * eta) * a.imag(),
                       2 * ed * eta * a.real() * a.real() + base, 2 * ed * eta * a.imag() * a.imag() + base});
    }
    return out;
}

double ConstraintSet::max_residual(const Matrix& rho) const {
    double r = 0;
    for (std::size_t i = 0; i < ops.size(); ++i) r = std::max(r, std::abs(ops[i].inner(rho) - values[i]));
    return r;
}

ConstraintSet build_constraint_set(const Constellation& c, int cutoff, const ChannelParams& ch,
                                   const std::optional<TrustedDetector>& detector) {
    if (cutoff < 1) throw std::invalid_argument("build_constraint_set: cutoff must be >= 1");
    if (!(ch.excess_noise >= 0)) throw std::invalid_argument("build_constraint_set: excess noise must be >= 0");
    const int N = c.n_states;
    const int dB = cutoff + 1;
    ConstraintSet cs;
    cs.dimA = N;
    cs.dimB = dB;

    std::array<std::shared_ptr<const Matrix>, 4> obs;
    std::vector<std::array<double, 4>> moments;
    std::array<const char*, 4> names;
    if (detector) {
        auto t = trusted_observables(cutoff, *detector);
        obs = {std::make_shared<const Matrix>(t.fq), std::make_shared<const Matrix>(t.fp),
               std::make_shared<const Matrix>(t.sq), std::make_shared<const Matrix>(t.sp)};
        moments = expected_moments_trusted(c, ch, *detector);
        names = {"FQ", "FP", "SQ", "SP"};
    } else {
        auto o = build_observables(cutoff);
        obs = {std::make_shared<const Matrix>(o.q), std::make_shared<const Matrix>(o.p),
               std::make_shared<const Matrix>(o.n), std::make_shared<const Matrix>(o.d)};
        moments = expected_moments_untrusted(c, ch);
        names = {"q", "p", "n", "d"};
    }
    for (int x = 0; x < N; ++x) {
        for (int k = 0; k < 4; ++k) {
            BlockOperator op(N, dB);
            op.add_term(x, x, 1.0, obs[k]);
            cs.ops.push_back(std::move(op));
            cs.values.push_back(c.probs[x] * moments[x][k]);
            cs.labels.push_back(std::string(names[k]) + "[" + std::to_string(x) + "]");
            cs.identity_combination.push_back(0.0);
        }
    }

    auto id = std::make_shared<const Matrix>(Matrix::Identity(dB, dB));
    Matrix gram = alice_gram(c);
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < N; ++i) {
        BlockOperator op(N, dB);
        op.add_term(i, i, 1.0, id);
        cs.ops.push_back(std::move(op));
        cs.values.push_back(gram(i, i).real());
        cs.labels.push_back("tomo[" + std::to_string(i) + "," + std::to_string(i) + "]");
        cs.identity_combination.push_back(1.0);
    }
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) {
            BlockOperator re(N, dB), im(N, dB);
            re.add_term(i, j, s, id);
            re.add_term(j, i, s, id);
            im.add_term(i, j, Complex(0, s), id);
            im.add_term(j, i, Complex(0, -s), id);
            cs.ops.push_back(std::move(re));
            cs.values.push_back(std::sqrt(2.0) * gram(i, j).real());
            cs.labels.push_back("tomo_re[" + std::to_string(i) + "," + std::to_string(j) + "]");
            cs.identity_combination.push_back(0.0);
            cs.ops.push_back(std::move(im));
            cs.values.push_back(std::sqrt(2.0) * gram(i, j).imag());
            cs.labels.push_back("tomo_im[" + std::to_string(i) + "," + std::to_string(j) + "]");
            cs.identity_combination.push_back(0.0);
        }
    }
    return cs;
}

}  // namespace pskqkd

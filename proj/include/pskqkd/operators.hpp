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

#include <vector>

#include "pskqkd/linalg.hpp"

namespace pskqkd {

/// Truncated quadrature, number and second-moment operators on span{|0>..|Nc>}.
///
/// d = q^2 - p^2, which equals a^2 + a^dagger^2 exactly even after truncation.
struct Observables {
    Matrix q, p, n, d;
};

Observables build_observables(int cutoff);

/// Key-map regions R_z (one per symbol) and the discard operator
/// R_perp = I - sum_z R_z, all as truncated (Nc+1)-dimensional matrices.
struct RegionOperators {
    std::vector<Matrix> regions;
    Matrix discard;
    Matrix total() const;  // sum_z R_z
};

/// N equal wedges, wedge z centred on offset + 2 pi z / N with half-width
/// pi/N - delta_a, restricted to |gamma| >= delta_r. Heterodyne POVM.
RegionOperators region_ops_wedge(int cutoff, int n_wedges, double center_offset, double delta_r, double delta_a);

/// Four wedges centred on (z + 1/2) pi/2.
RegionOperators region_ops_ra(int cutoff, double delta_r, double delta_a);

/// Eight wedges centred on z pi/4.
RegionOperators region_ops_8ra(int cutoff, double delta_r, double delta_a);

/// Quadrants with a cross of half-width delta_c removed around both axes.
/// Region order: (+,+), (-,+), (-,-), (+,-).
RegionOperators region_ops_cross(int cutoff, double delta_c);

/// Heterodyne detector with efficiency eta_d and electronic noise nu_el
/// (shot-noise units), modelled as trusted.
struct TrustedDetector {
    double eta_d = 1.0;
    double nu_el = 0.0;

    TrustedDetector() = default;
    /// Throws std::invalid_argument unless 0 < eta_d <= 1 and nu_el >= 0.
    TrustedDetector(double eta_d, double nu_el);

    double n_bar() const { return (1.0 - eta_d + nu_el) / eta_d; }
    double a() const { return 1.0 / (eta_d * (1.0 + n_bar())); }
    double b() const { return eta_d * n_bar() * (1.0 + n_bar()); }
};

RegionOperators trusted_region_ops_wedge(int cutoff, int n_wedges, double center_offset, double delta_r,
                                         double delta_a, const TrustedDetector& det);
RegionOperators trusted_region_ops_ra(int cutoff, double delta_r, double delta_a, const TrustedDetector& det);
RegionOperators trusted_region_ops_8ra(int cutoff, double delta_r, double delta_a, const TrustedDetector& det);
RegionOperators trusted_region_ops_cross(int cutoff, double delta_c, const TrustedDetector& det);

/// First and second moment operators of the noisy heterodyne outcome y:
/// F_Q, F_P integrate sqrt(2) Re y, sqrt(2) Im y against the POVM; S_Q, S_P
/// integrate their squares. They reduce to q, p, aa^dagger + (a^2 + a^dagger^2)/2
/// and aa^dagger - (a^2 + a^dagger^2)/2 for an ideal detector.
struct TrustedObservables {
    Matrix fq, fp, sq, sp;
};

TrustedObservables trusted_observables(int cutoff, const TrustedDetector& det);

}  // namespace pskqkd

// Copyright 2026 The qkvp Authors
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
/**
 * @file
 * Coupled-channel reference solver: Johnson log-derivative propagation.
 *
 * The radial equations are written psi'' = W(R) psi with
 * W = 2 mu (V(R) + eps - E), and Y = psi' psi^{-1} is carried from a hard
 * wall at r_min to r_max using Simpson-weighted sectors. At r_max Y is matched
 * to sin/cos waves (open) and decaying exponentials (closed).
 */
#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "qkvp/core.hpp"
#include "qkvp/kvp.hpp"
#include "qkvp/matelem.hpp"

namespace qkvp {

struct CcGrid {
    double r_min = 0.0;
    double r_max = 40.0;
    int n_steps = 8000; ///< rounded up to even

    double step() const { return (r_max - r_min) / n_steps; }

    void validate() const {
        if (!(r_min >= 0.0) || !(r_max > r_min) || n_steps <= 0) {
            throw Error("CcGrid: need 0 <= r_min < r_max and n_steps > 0");
        }
    }
};

struct CcSettings {
    CcGrid grid;
    int n_channels = 8;         ///< vibrational channels in the expansion; ignored for 1D
    double wall = 1e10;         ///< initial log-derivative at r_min
};

/// Channel count actually used for a problem.
inline int cc_channel_count(const ScatteringProblem &prob, int requested) {
    if (prob.kind == ProblemKind::OneChannelExpWell) {
        return 1;
    }
    return std::max(requested, prob.channels.n_open);
}

/// Potential plus thresholds, V(R) + diag(eps), in Hamiltonian units.
inline RealMatrix coupling_matrix(const ScatteringProblem &prob, double r, int n_channels = 8) {
    const int n = cc_channel_count(prob, n_channels);
    const ScatteringProblem p = with_channel_count(prob, n);
    RealMatrix w = prob.radial_potential(r) * channel_coupling(p);
    for (int c = 0; c < n; ++c) {
        w(c, c) += p.channels.thresholds[c];
    }
    return w;
}

/// Grid with step small enough for both the wavelength and 5e-3 absolute.
inline CcGrid default_cc_grid(const ScatteringProblem &prob) {
    CcGrid g;
    g.r_min = 0.0;
    g.r_max = prob.quadrature.r_max;
    double k_max = 0.0;
    for (double k : prob.channels.wavenumbers) {
        k_max = std::max(k_max, k);
    }
    const double h = std::min(0.005, k_max > 0.0 ? 0.1 / k_max : 0.005);
    g.n_steps = static_cast<int>(std::ceil((g.r_max - g.r_min) / h));
    return g;
}

inline CcSettings default_cc_settings(const ScatteringProblem &prob) {
    CcSettings s;
    s.grid = default_cc_grid(prob);
    return s;
}

inline SMatrixResult solve_cc(const ScatteringProblem &prob, const CcSettings &settings) {
    settings.grid.validate();
    const int n = cc_channel_count(prob, settings.n_channels);
    const ScatteringProblem p = with_channel_count(prob, n);
    const ChannelSet &ch = p.channels;
    if (ch.n_open == 0) {
        throw Error("solve_cc: no open channel at energy " + std::to_string(ch.energy));
    }
    const RealMatrix coupling = channel_coupling(p);
    const double two_mu = 2.0 * p.mu;
    const double e = ch.hamiltonian_energy;
    auto w_at = [&](double r) {
        RealMatrix w = two_mu * p.radial_potential(r) * coupling;
        for (int c = 0; c < n; ++c) {
            w(c, c) += two_mu * (ch.thresholds[c] - e);
        }
        return w;
    };

    int steps = settings.grid.n_steps;
    steps += steps % 2;
    const double r0 = settings.grid.r_min;
    const double h = (settings.grid.r_max - r0) / steps;
    const RealMatrix id = RealMatrix::Identity(n, n);

    RealMatrix y = settings.wall * id + (h / 3.0) * w_at(r0);
    Eigen::PartialPivLU<RealMatrix> lu;
    for (int j = 1; j <= steps; ++j) {
        const double r = r0 + j * h;
        const RealMatrix w = w_at(r);
        RealMatrix u;
        double weight;
        if (j == steps) {
            u = w;
            weight = 1.0;
        } else if (j % 2 == 1) {
            lu.compute(id - (h * h / 6.0) * w);
            u = lu.solve(w);
            weight = 4.0;
        } else {
            u = w;
            weight = 2.0;
        }
        lu.compute(id + h * y);
        y = lu.solve(y);
        y += (h / 3.0) * weight * u;
    }

    // psi = J + N K at r_max
    const double rm = settings.grid.r_max;
    const int no = ch.n_open;
    RealMatrix jm = RealMatrix::Zero(n, no), jp = RealMatrix::Zero(n, no);
    RealMatrix nm = RealMatrix::Zero(n, n), np = RealMatrix::Zero(n, n);
    for (int c = 0; c < n; ++c) {
        const double k2 = two_mu * (e - ch.thresholds[c]);
        if (c < no) {
            const double k = std::sqrt(k2);
            const double sk = std::sqrt(k);
            jm(c, c) = std::sin(k * rm) / sk;
            jp(c, c) = std::cos(k * rm) * sk;
            nm(c, c) = std::cos(k * rm) / sk;
            np(c, c) = -std::sin(k * rm) * sk;
        } else {
            // exponentially decaying, scaled to unit value at r_max
            nm(c, c) = 1.0;
            np(c, c) = -std::sqrt(-k2);
        }
    }
    Eigen::FullPivLU<RealMatrix> match(y * nm - np);
    if (!match.isInvertible()) {
        throw Error("solve_cc: matching matrix singular, r_max inside interaction region");
    }
    const RealMatrix k_full = match.solve(jp - y * jm);
    const ComplexMatrix k = k_full.topRows(no).cast<Complex>();
    const ComplexMatrix ido = ComplexMatrix::Identity(no, no);
    SMatrixResult out;
    out.s = (ido + kI * k) * (ido - kI * k).inverse();
    out.unitarity_defect = unitarity_defect(out.s);
    out.symmetry_defect = symmetry_defect(out.s);
    out.inverter_label = InverterKind::CoupledChannel;
    return out;
}

inline SMatrixResult solve_cc(const ScatteringProblem &prob) { return solve_cc(prob, default_cc_settings(prob)); }

} // namespace qkvp

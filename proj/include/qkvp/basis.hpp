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
 * Radial and vibrational basis functions for the S-matrix Kohn method.
 *
 * Radial functions come in two families. Continuum functions
 * u0_n(r) = (1 - e^{-gamma r}) e^{-i k_n r} / sqrt(v_n) carry the asymptotic
 * incoming wave of open channel n; their conjugate u1_n is the outgoing wave.
 * Square-integrable functions u_l(r) = F_l r^{l-1} e^{-gamma r}, l = 2..n_l(),
 * describe the collision complex and are normalized to one on [0, inf).
 *
 * The product basis |u_l phi_n> is flattened with index (l - 2) * N + n, so
 * the channel is the fastest-running index.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qkvp/core.hpp"
#include "qkvp/quadrature.hpp"

namespace qkvp {

/// Exponent and size of the square-integrable radial set.
///
/// `n_radial` counts the L^2 functions; they carry indices l = 2..n_l().
struct RadialBasisSpec {
    double gamma = 1.0;
    int n_radial = 1;
    std::vector<double> normalization; ///< F_l, stored at position l - 2

    static RadialBasisSpec make(double gamma, int n_radial) {
        if (!(gamma > 0.0)) {
            throw Error("RadialBasisSpec: gamma must be positive");
        }
        if (n_radial < 1) {
            throw Error("RadialBasisSpec: need at least one square-integrable function");
        }
        RadialBasisSpec spec;
        spec.gamma = gamma;
        spec.n_radial = n_radial;
        spec.normalization.resize(n_radial);
        for (int l = 2; l <= n_radial + 1; ++l) {
            // F_l^2 = (2 gamma)^{2l-1} / (2l-2)!
            const double log_f2 = (2.0 * l - 1.0) * std::log(2.0 * gamma) - std::lgamma(2.0 * l - 1.0);
            spec.normalization[l - 2] = std::exp(0.5 * log_f2);
        }
        return spec;
    }

    /// Highest function index N_l.
    int n_l() const { return n_radial + 1; }

    double norm_factor(int l) const {
        if (l < 2 || l > n_l()) {
            throw Error("radial index l=" + std::to_string(l) + " outside 2.." + std::to_string(n_l()));
        }
        return normalization[l - 2];
    }
};

/// Asymptotic channel data at one total energy.
struct ChannelSet {
    int n_channels = 0;
    int n_open = 0;
    std::vector<double> thresholds; ///< Hamiltonian units, ascending
    double mu = 1.0;
    double energy = 0.0;             ///< energy in the problem's own convention
    double hamiltonian_energy = 0.0; ///< energy entering H - E
    std::vector<double> wavenumbers; ///< open channels only
    std::vector<double> velocities;  ///< open channels only

    /// `energy_scale` maps the problem's energy onto Hamiltonian units.
    static ChannelSet make(std::vector<double> thresholds, double mu, double energy, double energy_scale = 1.0) {
        if (!(mu > 0.0)) {
            throw Error("ChannelSet: reduced mass must be positive");
        }
        if (thresholds.empty()) {
            throw Error("ChannelSet: no channels");
        }
        if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
            throw Error("ChannelSet: thresholds must be sorted ascending");
        }
        ChannelSet set;
        set.n_channels = static_cast<int>(thresholds.size());
        set.thresholds = std::move(thresholds);
        set.mu = mu;
        set.energy = energy;
        set.hamiltonian_energy = energy * energy_scale;
        for (double t : set.thresholds) {
            const double kinetic = set.hamiltonian_energy - t;
            if (kinetic <= 0.0) {
                break;
            }
            const double k = std::sqrt(2.0 * mu * kinetic);
            set.wavenumbers.push_back(k);
            set.velocities.push_back(k / mu);
        }
        set.n_open = static_cast<int>(set.wavenumbers.size());
        return set;
    }

    bool is_open(int n) const { return n >= 0 && n < n_open; }
};

namespace detail {

inline void require_open(int channel, const ChannelSet &channels) {
    if (!channels.is_open(channel)) {
        throw Error("continuum function requested for closed or invalid channel " + std::to_string(channel));
    }
}

} // namespace detail

/// Continuum function u0_n(r); u1_n is its complex conjugate.
inline Complex eval_u0(int channel, double r, const ChannelSet &channels, const RadialBasisSpec &spec) {
    detail::require_open(channel, channels);
    const double k = channels.wavenumbers[channel];
    const double f = -std::expm1(-spec.gamma * r);
    return f * std::exp(Complex(0.0, -k * r)) / std::sqrt(channels.velocities[channel]);
}

/// d^2/dr^2 of u0_n, analytic.
inline Complex eval_u0_d2(int channel, double r, const ChannelSet &channels, const RadialBasisSpec &spec) {
    detail::require_open(channel, channels);
    const double k = channels.wavenumbers[channel];
    const double g = spec.gamma;
    const double e = std::exp(-g * r);
    const double f = -std::expm1(-g * r);
    const Complex phase = std::exp(Complex(0.0, -k * r)) / std::sqrt(channels.velocities[channel]);
    return (Complex(-g * g * e - k * k * f, -2.0 * k * g * e)) * phase;
}

inline double eval_ul(int l, double r, const RadialBasisSpec &spec) {
    const double f = spec.norm_factor(l);
    return f * std::pow(r, l - 1) * std::exp(-spec.gamma * r);
}

/// d^2/dr^2 of u_l, analytic.
inline double eval_ul_d2(int l, double r, const RadialBasisSpec &spec) {
    const double f = spec.norm_factor(l);
    const int n = l - 1;
    const double g = spec.gamma;
    double poly = g * g * std::pow(r, n) - 2.0 * g * n * std::pow(r, n - 1);
    if (n >= 2) {
        poly += n * (n - 1.0) * std::pow(r, n - 2);
    }
    return f * poly * std::exp(-g * r);
}

/// Unit-mass, unit-frequency oscillator eigenfunction phi_v(r), energy v + 1/2.
inline double eval_ho(int v, double r) {
    if (v < 0) {
        throw Error("eval_ho: negative quantum number");
    }
    return orthonormal_hermite(v, r)[v] * std::exp(-0.5 * r * r);
}

inline double ho_energy(int v) { return v + 0.5; }

/// Closed-form <u_l|u_l'> = F_l F_l' (l+l'-2)! / (2 gamma)^{l+l'-1}, as an
/// n_radial x n_radial matrix.
inline RealMatrix radial_overlap(const RadialBasisSpec &spec) {
    const int n = spec.n_radial;
    RealMatrix s(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int l = a + 2;
            const int lp = b + 2;
            const double log_val = std::lgamma(l + lp - 1.0) - (l + lp - 1.0) * std::log(2.0 * spec.gamma);
            s(a, b) = spec.normalization[a] * spec.normalization[b] * std::exp(log_val);
        }
    }
    return s;
}

/// O_{ln,l'n'} = delta_{nn'} <u_l|u_l'> over the full product basis.
inline RealMatrix overlap_matrix(const RadialBasisSpec &spec, const ChannelSet &channels) {
    const RealMatrix radial = radial_overlap(spec);
    const int nch = channels.n_channels;
    const int dim = spec.n_radial * nch;
    RealMatrix o = RealMatrix::Zero(dim, dim);
    for (int a = 0; a < spec.n_radial; ++a) {
        for (int b = 0; b < spec.n_radial; ++b) {
            for (int n = 0; n < nch; ++n) {
                o(a * nch + n, b * nch + n) = radial(a, b);
            }
        }
    }
    return o;
}

/// Rectangular map X onto the symmetrically orthogonalized basis.
struct OrthoTransform {
    RealMatrix x;                     ///< primitive dim x n_q, columns eigvec / sqrt(lambda)
    std::vector<double> eigenvalues;  ///< retained, descending
    double cutoff = 0.0;
    int n_q = 0;
};

/// Keeps eigenpairs of `o` with lambda > cutoff. Each eigenvector is signed so
/// its largest-magnitude component is positive.
inline OrthoTransform orthogonalize(const RealMatrix &o, double cutoff) {
    if (!(cutoff > 0.0)) {
        throw Error("orthogonalize: cutoff must be positive");
    }
    if (o.rows() != o.cols() || o.rows() == 0) {
        throw Error("orthogonalize: overlap matrix must be square and nonempty");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(o);
    if (solver.info() != Eigen::Success) {
        throw Error("orthogonalize: eigensolver failed");
    }
    const RealVector &lambda = solver.eigenvalues(); // ascending
    const RealMatrix &vecs = solver.eigenvectors();
    OrthoTransform t;
    t.cutoff = cutoff;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = lambda.size() - 1; i >= 0; --i) {
        if (lambda(i) > cutoff) {
            kept.push_back(i);
        }
    }
    if (kept.empty()) {
        throw Error("orthogonalize: cutoff too large, no eigenvalue retained");
    }
    t.n_q = static_cast<int>(kept.size());
    t.x.resize(o.rows(), t.n_q);
    for (int c = 0; c < t.n_q; ++c) {
        const Eigen::Index i = kept[c];
        RealVector v = vecs.col(i);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
        }
        t.x.col(c) = v / std::sqrt(lambda(i));
        t.eigenvalues.push_back(lambda(i));
    }
    return t;
}

/// Cutoff that retains exactly `n_q` eigenvalues: the geometric mean of the
/// n_q-th and (n_q+1)-th largest. Rejects targets that split a degenerate group.
inline double cutoff_for_count(const RealMatrix &o, int n_q) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(o, Eigen::EigenvaluesOnly);
    const RealVector lambda = solver.eigenvalues().reverse();
    if (n_q < 1 || n_q > lambda.size()) {
        throw Error("cutoff_for_count: target outside 1.." + std::to_string(lambda.size()));
    }
    const double kept = lambda(n_q - 1);
    if (!(kept > 0.0)) {
        throw Error("cutoff_for_count: target reaches non-positive eigenvalues");
    }
    if (n_q == lambda.size()) {
        return 0.5 * kept;
    }
    const double dropped = std::max(lambda(n_q), kept * 1e-16);
    if (kept <= dropped * (1.0 + 1e-8)) {
        throw Error("cutoff_for_count: target N_q=" + std::to_string(n_q) + " splits a degenerate eigenvalue group");
    }
    return std::sqrt(kept * dropped);
}

} // namespace qkvp

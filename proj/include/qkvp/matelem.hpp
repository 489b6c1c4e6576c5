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
 * Model scattering problems and the Kohn matrix blocks M00, M10, M0, M.
 *
 * Both supported problems have a separable interaction
 * V_{nn'}(R) = g(R) C_{nn'}: the single-channel exponential well uses
 * g = -e^{-R}, C = [1]; the collinear atom-oscillator model uses
 * g = A e^{-alpha R} and C_{nn'} = <phi_n|e^{beta r}|phi_n'>.
 *
 * Continuum bras are not conjugated: <u0|O|u0> means the integral of
 * u0 (O u0). The kinetic operator always acts on the ket.
 */
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qkvp/basis.hpp"
#include "qkvp/core.hpp"
#include "qkvp/quadrature.hpp"

namespace qkvp {

enum class ProblemKind { OneChannelExpWell, SecrestJohnson };

inline std::string to_string(ProblemKind kind) {
    return kind == ProblemKind::OneChannelExpWell ? "exp_well" : "secrest_johnson";
}

struct RadialQuadrature {
    double r_max = 40.0;
    int panels = 64;
    int points = 16;
};

/// How the orthogonalized basis is selected; an explicit cutoff wins.
struct OrthoSelection {
    std::optional<double> cutoff;
    std::optional<int> target_n_q;

    bool enabled() const { return cutoff.has_value() || target_n_q.has_value(); }
};

struct ScatteringProblem {
    ProblemKind kind = ProblemKind::OneChannelExpWell;
    double mu = 1.0;
    double m = 1.0; ///< oscillator mass (collinear model)
    double a = 0.0;
    double alpha = 0.0; ///< decay of the interaction in R
    double beta = 0.0;  ///< oscillator-coordinate dependence of the interaction
    RadialBasisSpec basis;
    ChannelSet channels;
    RadialQuadrature quadrature;
    int hermite_order = 0; ///< 0 selects max(2 v_max + 16, 48)
    OrthoSelection ortho;

    /// Radial factor g(R) of the interaction.
    double radial_potential(double r) const {
        if (kind == ProblemKind::OneChannelExpWell) {
            return -std::exp(-r);
        }
        return a * std::exp(-alpha * r);
    }
};

struct ExpWellParams {
    double energy = 0.55 * 0.55 / 2.0; ///< Hamiltonian units, E = k^2 / 2mu
    double mu = 1.0;
    double gamma = 1.5;
    int n_radial = 2;
    RadialQuadrature quadrature{40.0, 64, 16};
};

/// Collinear atom + harmonic oscillator with V = A e^{-alpha R + beta r}.
/// Energy is in units of the oscillator zero-point energy.
struct SecrestJohnsonParams {
    double energy = 3.8;
    double mu = 0.6667;
    double m = 1.0;
    double a = 10.0;
    double alpha = 2.0;
    double beta = 0.3;
    double gamma = 0.5;
    int n_channels = 2;
    int n_radial = 6;
    RadialQuadrature quadrature{60.0, 64, 16};
    int hermite_order = 0;
    OrthoSelection ortho{std::nullopt, 8};
};

inline double oscillator_frequency(double mass) { return 1.0 / std::sqrt(mass); }

inline ScatteringProblem make_exp_well(const ExpWellParams &p) {
    if (!(p.energy > 0.0)) {
        throw Error("exp_well: energy must be positive (no open channel)");
    }
    ScatteringProblem prob;
    prob.kind = ProblemKind::OneChannelExpWell;
    prob.mu = p.mu;
    prob.basis = RadialBasisSpec::make(p.gamma, p.n_radial);
    prob.channels = ChannelSet::make({0.0}, p.mu, p.energy);
    prob.quadrature = p.quadrature;
    return prob;
}

inline ScatteringProblem make_secrest_johnson(const SecrestJohnsonParams &p) {
    if (p.n_channels < 1) {
        throw Error("secrest_johnson: need at least one vibrational channel");
    }
    if (!(p.m > 0.0)) {
        throw Error("secrest_johnson: oscillator mass must be positive");
    }
    ScatteringProblem prob;
    prob.kind = ProblemKind::SecrestJohnson;
    prob.mu = p.mu;
    prob.m = p.m;
    prob.a = p.a;
    prob.alpha = p.alpha;
    prob.beta = p.beta;
    prob.basis = RadialBasisSpec::make(p.gamma, p.n_radial);
    const double omega = oscillator_frequency(p.m);
    std::vector<double> thresholds;
    for (int v = 0; v < p.n_channels; ++v) {
        thresholds.push_back(omega * ho_energy(v));
    }
    prob.channels = ChannelSet::make(std::move(thresholds), p.mu, p.energy, 0.5 * omega);
    prob.quadrature = p.quadrature;
    prob.hermite_order = p.hermite_order;
    prob.ortho = p.ortho;
    return prob;
}

/// The same physical problem with a different number of vibrational channels.
inline ScatteringProblem with_channel_count(const ScatteringProblem &prob, int n_channels) {
    if (prob.kind != ProblemKind::SecrestJohnson) {
        if (n_channels != 1) {
            throw Error("exp_well problem has exactly one channel");
        }
        return prob;
    }
    ScatteringProblem out = prob;
    const double omega = oscillator_frequency(prob.m);
    std::vector<double> thresholds;
    for (int v = 0; v < n_channels; ++v) {
        thresholds.push_back(omega * ho_energy(v));
    }
    out.channels = ChannelSet::make(std::move(thresholds), prob.mu, prob.channels.energy, 0.5 * omega);
    return out;
}

inline int default_hermite_order(int v_max) { return std::max(2 * v_max + 16, 48); }

/// <phi_v| e^{beta r} |phi_v'> for the unit-mass, unit-frequency oscillator.
inline double vib_coupling(int v, int v_prime, double beta, int order = 0) {
    if (v < 0 || v_prime < 0) {
        throw Error("vib_coupling: negative quantum number");
    }
    const int vmax = std::max(v, v_prime);
    const QuadratureRule rule = gauss_hermite(order > 0 ? order : default_hermite_order(vmax));
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto p = orthonormal_hermite(vmax, rule.nodes[i]);
        sum += rule.weights[i] * p[v] * p[v_prime] * std::exp(beta * rule.nodes[i]);
    }
    return sum;
}

/// Full coupling matrix C_{vv'} for channels 0..n-1 of an oscillator with
/// mass `mass` and unit force constant (length scale mass^{-1/4}).
inline RealMatrix vib_coupling_matrix(int n, double beta, double mass = 1.0, int order = 0) {
    const QuadratureRule rule = gauss_hermite(order > 0 ? order : default_hermite_order(n - 1));
    const double scaled_beta = beta * std::pow(mass, -0.25);
    RealMatrix c = RealMatrix::Zero(n, n);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto p = orthonormal_hermite(n - 1, rule.nodes[i]);
        const double g = rule.weights[i] * std::exp(scaled_beta * rule.nodes[i]);
        for (int v = 0; v < n; ++v) {
            for (int w = 0; w < n; ++w) {
                c(v, w) += g * p[v] * p[w];
            }
        }
    }
    return c;
}

/// Channel coupling matrix C of the separable interaction.
inline RealMatrix channel_coupling(const ScatteringProblem &prob) {
    if (prob.kind == ProblemKind::OneChannelExpWell) {
        return RealMatrix::Ones(1, 1);
    }
    return vib_coupling_matrix(prob.channels.n_channels, prob.beta, prob.m, prob.hermite_order);
}

enum class BasisLabel { Primitive, Orthogonalized };

struct KvpMatrices {
    ComplexMatrix m00; ///< N_o x N_o
    ComplexMatrix m10; ///< N_o x N_o
    ComplexMatrix m0;  ///< L^2 dim x N_o
    RealMatrix m;      ///< L^2 dim square, symmetric
    BasisLabel basis_label = BasisLabel::Primitive;
};

namespace detail {

/// Radial functions tabulated on the quadrature grid.
struct RadialTables {
    Eigen::ArrayXd weights;
    Eigen::ArrayXd potential;                 // g(R)
    std::vector<Eigen::ArrayXd> bound;         // u_l
    std::vector<Eigen::ArrayXd> bound_d2;      // u_l''
    std::vector<Eigen::ArrayXcd> continuum;    // u0_n, open channels
    std::vector<Eigen::ArrayXcd> continuum_d2; // u0_n''
};

inline RadialTables tabulate(const ScatteringProblem &prob) {
    const auto &q = prob.quadrature;
    const QuadratureRule rule = composite_gauss_legendre(0.0, q.r_max, q.panels, q.points);
    const Eigen::Index n = static_cast<Eigen::Index>(rule.size());
    RadialTables t;
    t.weights = Eigen::Map<const Eigen::ArrayXd>(rule.weights.data(), n);
    t.potential.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        t.potential(i) = prob.radial_potential(rule.nodes[i]);
    }
    for (int l = 2; l <= prob.basis.n_l(); ++l) {
        Eigen::ArrayXd u(n), d2(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            u(i) = eval_ul(l, rule.nodes[i], prob.basis);
            d2(i) = eval_ul_d2(l, rule.nodes[i], prob.basis);
        }
        t.bound.push_back(std::move(u));
        t.bound_d2.push_back(std::move(d2));
    }
    for (int c = 0; c < prob.channels.n_open; ++c) {
        Eigen::ArrayXcd u(n), d2(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            u(i) = eval_u0(c, rule.nodes[i], prob.channels, prob.basis);
            d2(i) = eval_u0_d2(c, rule.nodes[i], prob.channels, prob.basis);
        }
        t.continuum.push_back(std::move(u));
        t.continuum_d2.push_back(std::move(d2));
    }
    return t;
}

/// Channel-diagonal operator -1/(2 mu) d^2/dR^2 + (eps_n - E) applied to a ket.
template <typename Values, typename Second>
auto channel_diagonal(const Values &u, const Second &d2, double mu, double shift) {
    return (-0.5 / mu) * d2 + shift * u;
}

} // namespace detail

/// Blocks for any separable problem; one- and multi-channel cases share this.
inline KvpMatrices assemble_separable(const ScatteringProblem &prob, const RealMatrix &coupling) {
    const ChannelSet &ch = prob.channels;
    const int nch = ch.n_channels;
    const int no = ch.n_open;
    const int nrad = prob.basis.n_radial;
    if (no == 0) {
        throw Error("no open channel at energy " + std::to_string(ch.energy));
    }
    if (coupling.rows() != nch || coupling.cols() != nch) {
        throw Error("assemble: coupling matrix does not match channel count");
    }
    const detail::RadialTables t = detail::tabulate(prob);
    const double mu = prob.mu;
    const double e = ch.hamiltonian_energy;
    const Eigen::ArrayXd &w = t.weights;

    // radial integrals, bound x bound
    RealMatrix kin(nrad, nrad), ovl(nrad, nrad), pot(nrad, nrad);
    for (int a = 0; a < nrad; ++a) {
        for (int b = 0; b < nrad; ++b) {
            kin(a, b) = (w * t.bound[a] * (-0.5 / mu) * t.bound_d2[b]).sum();
            ovl(a, b) = (w * t.bound[a] * t.bound[b]).sum();
            pot(a, b) = (w * t.bound[a] * t.potential * t.bound[b]).sum();
        }
    }

    KvpMatrices out;
    const int dim = nrad * nch;
    out.m = RealMatrix::Zero(dim, dim);
    for (int a = 0; a < nrad; ++a) {
        for (int b = 0; b < nrad; ++b) {
            for (int n = 0; n < nch; ++n) {
                for (int np = 0; np < nch; ++np) {
                    double v = coupling(n, np) * pot(a, b);
                    if (n == np) {
                        v += kin(a, b) + (ch.thresholds[n] - e) * ovl(a, b);
                    }
                    out.m(a * nch + n, b * nch + np) = v;
                }
            }
        }
    }

    // bound bra, continuum ket
    out.m0 = ComplexMatrix::Zero(dim, no);
    for (int c = 0; c < no; ++c) {
        const Eigen::ArrayXcd diag_ket =
            detail::channel_diagonal(t.continuum[c], t.continuum_d2[c], mu, ch.thresholds[c] - e);
        const Eigen::ArrayXcd pot_ket = t.potential * t.continuum[c];
        for (int a = 0; a < nrad; ++a) {
            const Complex diag = (w * t.bound[a] * diag_ket).sum();
            const Complex coup = (w * t.bound[a] * pot_ket).sum();
            for (int n = 0; n < nch; ++n) {
                Complex v = coupling(n, c) * coup;
                if (n == c) {
                    v += diag;
                }
                out.m0(a * nch + n, c) = v;
            }
        }
    }

    // continuum bra (u0 and its conjugate u1), continuum ket
    out.m00 = ComplexMatrix::Zero(no, no);
    out.m10 = ComplexMatrix::Zero(no, no);
    for (int c = 0; c < no; ++c) {
        const Eigen::ArrayXcd diag_ket =
            detail::channel_diagonal(t.continuum[c], t.continuum_d2[c], mu, ch.thresholds[c] - e);
        const Eigen::ArrayXcd pot_ket = t.potential * t.continuum[c];
        for (int r = 0; r < no; ++r) {
            const Eigen::ArrayXcd bra0 = t.continuum[r];
            const Eigen::ArrayXcd bra1 = t.continuum[r].conjugate();
            Complex v0 = coupling(r, c) * (w * bra0 * pot_ket).sum();
            Complex v1 = coupling(r, c) * (w * bra1 * pot_ket).sum();
            if (r == c) {
                v0 += (w * bra0 * diag_ket).sum();
                v1 += (w * bra1 * diag_ket).sum();
            }
            out.m00(r, c) = v0;
            out.m10(r, c) = v1;
        }
    }
    out.basis_label = BasisLabel::Primitive;
    return out;
}

inline KvpMatrices assemble_1d(const ScatteringProblem &prob) {
    if (prob.kind != ProblemKind::OneChannelExpWell) {
        throw Error("assemble_1d: problem is not the single-channel exponential well");
    }
    if (!(prob.channels.hamiltonian_energy > 0.0)) {
        throw Error("assemble_1d: energy must be positive (no open channel)");
    }
    return assemble_separable(prob, channel_coupling(prob));
}

inline KvpMatrices assemble_sj(const ScatteringProblem &prob) {
    if (prob.kind != ProblemKind::SecrestJohnson) {
        throw Error("assemble_sj: problem is not the collinear atom-oscillator model");
    }
    if (prob.channels.n_open == 0) {
        throw Error("assemble_sj: no open channels at E=" + std::to_string(prob.channels.energy));
    }
    return assemble_separable(prob, channel_coupling(prob));
}

inline KvpMatrices assemble(const ScatteringProblem &prob) {
    return prob.kind == ProblemKind::OneChannelExpWell ? assemble_1d(prob) : assemble_sj(prob);
}

/// M~ = X^T M X, M~0 = X^T M0; the continuum-continuum blocks are unchanged.
inline KvpMatrices to_ortho(const KvpMatrices &mats, const OrthoTransform &x) {
    if (mats.basis_label != BasisLabel::Primitive) {
        throw Error("to_ortho: matrices are already orthogonalized");
    }
    if (x.x.rows() != mats.m.rows() || mats.m0.rows() != mats.m.rows()) {
        throw Error("to_ortho: transform has " + std::to_string(x.x.rows()) + " rows, basis has " +
                    std::to_string(mats.m.rows()));
    }
    KvpMatrices out;
    out.m00 = mats.m00;
    out.m10 = mats.m10;
    out.m = x.x.transpose() * mats.m * x.x;
    out.m0 = x.x.transpose().cast<Complex>() * mats.m0;
    out.basis_label = BasisLabel::Orthogonalized;
    return out;
}

/// Orthogonal transform requested by the problem's selection, if any.
inline std::optional<OrthoTransform> problem_transform(const ScatteringProblem &prob) {
    if (!prob.ortho.enabled()) {
        return std::nullopt;
    }
    const RealMatrix o = overlap_matrix(prob.basis, prob.channels);
    const double cutoff = prob.ortho.cutoff ? *prob.ortho.cutoff : cutoff_for_count(o, *prob.ortho.target_n_q);
    return orthogonalize(o, cutoff);
}

/// Blocks in the basis the solver works in (orthogonalized when requested).
inline KvpMatrices solver_matrices(const ScatteringProblem &prob) {
    KvpMatrices mats = assemble(prob);
    if (auto x = problem_transform(prob)) {
        return to_ortho(mats, *x);
    }
    return mats;
}

} // namespace qkvp

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
 * Variational quantum linear solver on the embedded statevector simulator.
 *
 * A real symmetric 2^n x 2^n matrix M is expanded in Pauli strings,
 * M = sum_l c_l P_l. For each unit vector b_k the ansatz parameters are
 * tuned until M|x(theta)> is parallel to |b_k>; the norm 1/||M|x>|| and a
 * sign recover column k of M^{-1}.
 *
 * Expectation values are exact contractions of the statevector; there is no
 * sampling and no Hadamard-test circuit.
 */
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "qkvp/core.hpp"
#include "qkvp/optimize.hpp"
#include "qkvp/qsim.hpp"

namespace qkvp::vqls {

using qsim::Amplitudes;
using qsim::PauliString;
using qsim::StateVector;

struct PauliTerm {
    double coefficient;
    PauliString string;
};

struct PauliDecomposition {
    int n_qubits = 0;
    std::vector<PauliTerm> terms;
    double drop_tolerance = 0.0;

    std::size_t dim() const { return std::size_t{1} << n_qubits; }

    /// Dense sum_l c_l P_l.
    RealMatrix reconstruct() const {
        const std::size_t d = dim();
        ComplexMatrix out = ComplexMatrix::Zero(d, d);
        for (const auto &t : terms) {
            const std::size_t xm = t.string.x_mask();
            for (std::size_t j = 0; j < d; ++j) {
                out(j ^ xm, j) += t.coefficient * qsim::pauli_phase(t.string, j);
            }
        }
        return out.real();
    }

    /// out = sum_l c_l P_l in.
    void apply(std::span<const Complex> in, std::span<Complex> out) const {
        std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
        for (const auto &t : terms) {
            qsim::accumulate_pauli(in, t.string, t.coefficient, out);
        }
    }
};

/// c_l = Tr(M P_l) / 2^n over all 4^n strings; |c_l| <= drop_tol is dropped.
inline PauliDecomposition decompose(const RealMatrix &m, double drop_tol = 1e-12) {
    if (m.rows() != m.cols()) {
        throw Error("decompose: matrix must be square");
    }
    const std::size_t d = static_cast<std::size_t>(m.rows());
    if (!is_power_of_two(d)) {
        throw Error("decompose: dimension " + std::to_string(d) +
                    " is not a power of two; pad with an identity block first");
    }
    const int n = log2_exact(d);
    if (n > qsim::kMaxQubits) {
        throw Error("decompose: matrix too large for the simulator");
    }
    PauliDecomposition out;
    out.n_qubits = n;
    out.drop_tolerance = drop_tol;
    const std::size_t n_strings = std::size_t{1} << (2 * n);
    const double scale = 1.0 / static_cast<double>(d);
    for (std::size_t code = 0; code < n_strings; ++code) {
        PauliString p = PauliString::from_index(code, n);
        const std::size_t xm = p.x_mask();
        Complex trace{0.0, 0.0};
        for (std::size_t j = 0; j < d; ++j) {
            trace += m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j ^ xm)) * qsim::pauli_phase(p, j);
        }
        const Complex c = trace * scale;
        // odd-Y strings are imaginary antisymmetric; for real M they only
        // pick up the antisymmetric part
        if (p.y_count() % 2 == 1) {
            if (std::abs(c) > 1e-12 * (1.0 + max_abs(m))) {
                throw Error("decompose: odd-Y coefficient on " + p.str() + "; matrix is not symmetric");
            }
            continue;
        }
        if (std::abs(c) <= drop_tol) {
            continue;
        }
        if (std::abs(c.imag()) > 1e-12 * (1.0 + std::abs(c.real()))) {
            throw Error("decompose: imaginary Pauli coefficient on " + p.str() + "; matrix is not real symmetric");
        }
        out.terms.push_back({c.real(), std::move(p)});
    }
    if (out.terms.empty()) {
        throw Error("decompose: matrix is numerically zero");
    }
    return out;
}

/// Pads to the next power of two with an identity block.
inline RealMatrix pad_to_power_of_two(const RealMatrix &m) {
    const std::size_t d = static_cast<std::size_t>(m.rows());
    std::size_t p = 1;
    while (p < d) {
        p <<= 1;
    }
    if (p == d) {
        return m;
    }
    RealMatrix out = RealMatrix::Identity(p, p);
    out.topLeftCorner(d, d) = m;
    return out;
}

struct OptimizerConfig {
    int restarts = 8;
    int max_iterations = 2000; ///< per restart
    double target = 1e-6;      ///< local-cost threshold for convergence
    std::uint64_t seed = 20240521;
    double initial_step = 0.5;
};

struct VqlsConfig {
    int depth = 3;
    OptimizerConfig optimizer;
    double drop_tolerance = 1e-12;
    int jobs = 1; ///< worker threads for the column solves
};

struct VqlsSolution {
    StateVector x_state{0};
    std::vector<double> theta;
    double norm_q = 0.0;      ///< 1 / ||M|x(theta)>||
    double cost_final = 1.0;  ///< minimized local cost
    double cost_global = 1.0; ///< global cost at the same parameters
    int iterations = 0;
    int restarts_used = 0;
    bool converged = false;
};

namespace detail {

struct CostParts {
    Amplitudes phi; // M|x>
    double phi_norm2 = 0.0;
    StateVector x{0};
};

inline CostParts evaluate_phi(std::span<const double> theta, const PauliDecomposition &decomp, int depth) {
    CostParts parts;
    parts.x = qsim::run(qsim::ansatz(decomp.n_qubits, depth, theta));
    parts.phi.assign(decomp.dim(), Complex{0.0, 0.0});
    decomp.apply(parts.x.amplitudes(), parts.phi);
    for (const auto &a : parts.phi) {
        parts.phi_norm2 += std::norm(a);
    }
    double scale = 0.0;
    for (const auto &t : decomp.terms) {
        scale += t.coefficient * t.coefficient;
    }
    if (parts.phi_norm2 <= 1e-28 * scale) {
        throw Error("vqls cost: M annihilates ansatz state");
    }
    return parts;
}

inline void check_b(std::size_t b_index, const PauliDecomposition &decomp) {
    if (b_index >= decomp.dim()) {
        throw Error("vqls cost: b index out of range");
    }
}

} // namespace detail

/// C_G = 1 - |<b|M|x>|^2 / <x|M^T M|x>.
inline double cost_global(std::span<const double> theta, const PauliDecomposition &decomp, std::size_t b_index,
                          int depth) {
    detail::check_b(b_index, decomp);
    const auto parts = detail::evaluate_phi(theta, decomp, depth);
    const StateVector b = qsim::run(qsim::prepare_b(b_index, decomp.n_qubits));
    const Complex overlap = qsim::inner(b.amplitudes(), parts.phi);
    return 1.0 - std::norm(overlap) / parts.phi_norm2;
}

/// C_L = 1 - <Phi|U O U^dag|Phi> / <Phi|Phi> with O = 1/2 + (1/2n) sum_j Z_j.
inline double cost_local(std::span<const double> theta, const PauliDecomposition &decomp, std::size_t b_index,
                         int depth) {
    detail::check_b(b_index, decomp);
    auto parts = detail::evaluate_phi(theta, decomp, depth);
    const int n = decomp.n_qubits;
    // U^dag |Phi>, then local Z expectations
    qsim::apply_inverse(parts.phi, qsim::prepare_b(b_index, n));
    double z_sum = 0.0;
    for (int j = 0; j < n; ++j) {
        std::vector<qsim::Pauli> letters(n, qsim::Pauli::I);
        letters[j] = qsim::Pauli::Z;
        z_sum += qsim::expectation_raw(parts.phi, PauliString(std::move(letters))).real();
    }
    const double o = 0.5 * parts.phi_norm2 + (n > 0 ? z_sum / (2.0 * n) : 0.5 * parts.phi_norm2);
    return 1.0 - o / parts.phi_norm2;
}

/// |<x_q|x_c>|^2.
inline double fidelity(const StateVector &x_q, std::span<const Complex> x_c) {
    if (x_c.size() != x_q.dim()) {
        throw Error("fidelity: dimension mismatch");
    }
    double norm2 = 0.0;
    for (const auto &a : x_c) {
        norm2 += std::norm(a);
    }
    if (std::abs(norm2 - 1.0) > 1e-8) {
        throw Error("fidelity: reference vector is not normalized");
    }
    return std::norm(qsim::inner(x_q.amplitudes(), x_c));
}

inline double fidelity(const StateVector &x_q, const RealVector &x_c) {
    Amplitudes c(x_c.size());
    for (Eigen::Index i = 0; i < x_c.size(); ++i) {
        c[i] = x_c(i);
    }
    return fidelity(x_q, c);
}

inline std::uint64_t column_seed(std::uint64_t seed, std::size_t column) {
    // splitmix64 step so neighbouring columns get unrelated streams
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (column + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Minimizes the local cost for one right-hand side with random restarts.
inline VqlsSolution solve_column(const PauliDecomposition &decomp, std::size_t b_index, int depth,
                                 const OptimizerConfig &opt) {
    detail::check_b(b_index, decomp);
    const std::size_t n_params = qsim::ansatz_parameter_count(decomp.n_qubits, depth);
    std::mt19937_64 rng(column_seed(opt.seed, b_index));
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

    const Objective objective = [&](const std::vector<double> &theta) {
        return cost_local(theta, decomp, b_index, depth);
    };
    NelderMeadOptions nm;
    nm.target = opt.target;
    nm.initial_step = opt.initial_step;

    VqlsSolution sol;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, opt.restarts); ++r) {
        std::vector<double> theta0(n_params);
        for (auto &t : theta0) {
            t = angle(rng);
        }
        // a collapsed simplex is re-opened around its best vertex until the
        // per-restart iteration budget is spent
        int budget = opt.max_iterations;
        NelderMeadResult res;
        res.x = theta0;
        res.f = std::numeric_limits<double>::infinity();
        while (budget > 0) {
            nm.max_iterations = budget;
            NelderMeadResult step = nelder_mead(objective, res.x, nm);
            budget -= std::max(step.iterations, 1);
            sol.iterations += std::max(step.iterations, 1);
            const bool improved = step.f < res.f - 1e-15;
            res = std::move(step);
            if (res.reached_target || !improved) {
                break;
            }
            nm.initial_step = std::max(opt.initial_step * 0.1, 1e-3);
        }
        nm.initial_step = opt.initial_step;
        sol.restarts_used = r + 1;
        if (res.f < best) {
            best = res.f;
            sol.theta = res.x;
        }
        if (best <= opt.target) {
            break;
        }
    }
    sol.cost_final = best;
    sol.converged = best <= opt.target;
    sol.cost_global = cost_global(sol.theta, decomp, b_index, depth);
    auto parts = detail::evaluate_phi(sol.theta, decomp, depth);
    sol.x_state = std::move(parts.x);
    sol.norm_q = 1.0 / std::sqrt(parts.phi_norm2);
    return sol;
}

struct VqlsInverse {
    RealMatrix m_inverse;
    std::vector<double> fidelities; ///< empty unless an oracle was supplied
    std::vector<double> norms_q;
    std::vector<VqlsSolution> columns;
    bool all_converged = true;
    std::size_t padded_dim = 0;
};

/// Column-by-column inverse. Non-power-of-two inputs are padded with an
/// identity block; padding columns invert to themselves and are not solved.
inline VqlsInverse invert(const RealMatrix &m, const VqlsConfig &config,
                          const std::optional<RealMatrix> &oracle = std::nullopt) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error("vqls invert: matrix must be square and nonempty");
    }
    if (max_abs(RealMatrix(m - m.transpose())) > 1e-8 * (1.0 + max_abs(m))) {
        throw Error("vqls invert: matrix is not symmetric");
    }
    if (oracle && (oracle->rows() != m.rows() || oracle->cols() != m.cols())) {
        throw Error("vqls invert: oracle inverse has the wrong shape");
    }
    const Eigen::Index dim = m.rows();
    const RealMatrix padded = pad_to_power_of_two(m);
    const PauliDecomposition decomp = decompose(padded, config.drop_tolerance);

    VqlsInverse out;
    out.padded_dim = static_cast<std::size_t>(padded.rows());
    out.columns.resize(dim);

    std::atomic<Eigen::Index> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (Eigen::Index k = next++; k < dim; k = next++) {
            try {
                out.columns[k] = solve_column(decomp, static_cast<std::size_t>(k), config.depth, config.optimizer);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(dim)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    out.m_inverse = RealMatrix::Zero(dim, dim);
    const Eigen::Index pd = padded.rows();
    for (Eigen::Index k = 0; k < dim; ++k) {
        const VqlsSolution &sol = out.columns[k];
        RealVector x(pd);
        for (Eigen::Index i = 0; i < pd; ++i) {
            x(i) = sol.x_state[i].real();
        }
        // sign makes (M M_q^{-1})_kk closest to +1
        const double diag = padded.row(k).dot(x);
        const double sign = diag >= 0.0 ? 1.0 : -1.0;
        out.m_inverse.col(k) = sign * sol.norm_q * x.head(dim);
        out.norms_q.push_back(sol.norm_q);
        out.all_converged = out.all_converged && sol.converged;
        if (oracle) {
            RealVector xc = RealVector::Zero(pd);
            xc.head(dim) = oracle->col(k);
            xc.normalize();
            out.fidelities.push_back(fidelity(sol.x_state, xc));
        }
    }
    return out;
}

} // namespace qkvp::vqls

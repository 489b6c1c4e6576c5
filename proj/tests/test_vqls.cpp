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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qkvp/vqls.hpp"

using namespace qkvp;
using namespace qkvp::vqls;

namespace {

// Trace formula over dense Kronecker Pauli words.
Complex trace_coefficient(const RealMatrix &m, const std::string &word) {
    const Eigen::MatrixXcd p = oracle::pauli_word_matrix(word);
    return (m.cast<Complex>() * p).trace() / static_cast<double>(m.rows());
}

OptimizerConfig tight() {
    OptimizerConfig o;
    o.target = 1e-9;
    return o;
}

} // namespace

TEST(Decompose, IdentityIsSingleTerm) {
    const PauliDecomposition d = decompose(RealMatrix::Identity(2, 2));
    ASSERT_EQ(d.terms.size(), 1u);
    EXPECT_EQ(d.terms[0].string.str(), "I");
    EXPECT_DOUBLE_EQ(d.terms[0].coefficient, 1.0);
}

TEST(Decompose, TwoByTwoArithmetic) {
    const double a = 1.3, b = -0.4, dd = 0.2;
    RealMatrix m(2, 2);
    m << a, b, b, dd;
    const PauliDecomposition d = decompose(m, 0.0);
    double c[4] = {0, 0, 0, 0};
    for (const auto &t : d.terms) {
        c[std::string("IXYZ").find(t.string.str()[0])] = t.coefficient;
    }
    EXPECT_NEAR(c[0], (a + dd) / 2, 1e-15);
    EXPECT_NEAR(c[1], b, 1e-15);
    EXPECT_NEAR(c[2], 0.0, 1e-15);
    EXPECT_NEAR(c[3], (a - dd) / 2, 1e-15);
}

TEST(Decompose, CoefficientsMatchDenseTrace) {
    std::mt19937_64 rng(1);
    const RealMatrix m = oracle::random_symmetric(rng, 8);
    const PauliDecomposition d = decompose(m, 0.0);
    for (const auto &t : d.terms) {
        const Complex c = trace_coefficient(m, t.string.str());
        EXPECT_NEAR(t.coefficient, c.real(), 1e-14);
        EXPECT_NEAR(c.imag(), 0.0, 1e-14);
    }
}

TEST(Decompose, ReconstructionAndOddY) {
    std::mt19937_64 rng(2);
    for (int n : {1, 2, 3, 4}) {
        const RealMatrix m = oracle::random_symmetric(rng, 1 << n);
        const PauliDecomposition d = decompose(m, 0.0);
        EXPECT_LT(max_abs(RealMatrix(d.reconstruct() - m)), 1e-12);
        std::size_t even_y = 0;
        for (std::size_t code = 0; code < (std::size_t{1} << (2 * n)); ++code) {
            const auto p = qsim::PauliString::from_index(code, n);
            if (p.y_count() % 2 == 0) {
                ++even_y;
            } else {
                EXPECT_LT(std::abs(trace_coefficient(m, p.str())), 1e-14);
            }
        }
        for (const auto &t : d.terms) {
            EXPECT_EQ(t.string.y_count() % 2, 0);
        }
        EXPECT_LE(d.terms.size(), even_y);
    }
}

TEST(Decompose, Errors) {
    EXPECT_THROW(decompose(RealMatrix::Identity(3, 3)), Error);
    EXPECT_THROW(decompose(RealMatrix::Zero(4, 4)), Error);
    EXPECT_THROW(decompose(RealMatrix::Identity(2, 4)), Error);
    RealMatrix skew = RealMatrix::Zero(2, 2);
    skew(0, 1) = 1.0;
    skew(1, 0) = -1.0;
    EXPECT_THROW(decompose(skew), Error);
}

TEST(Cost, VanishAtTrivialSolution) {
    const PauliDecomposition d = decompose(RealMatrix::Identity(4, 4));
    const std::vector<double> theta(6, 0.0);
    EXPECT_NEAR(cost_global(theta, d, 0, 2), 0.0, 1e-15);
    EXPECT_NEAR(cost_local(theta, d, 0, 2), 0.0, 1e-15);
}

TEST(Cost, ExactSolutionStateHasZeroGlobalCost) {
    // diagonal M: the solution of M x = e_k is e_k; the CX chain is idle on
    // |00>, so the last RotY column alone sets the bits
    RealMatrix m = RealMatrix::Zero(4, 4);
    m.diagonal() << 2.0, 3.0, 0.5, 1.5;
    const PauliDecomposition d = decompose(m);
    for (std::size_t k = 0; k < 4; ++k) {
        std::vector<double> theta(4, 0.0);
        theta[2] = (k & 1) ? std::numbers::pi : 0.0;
        theta[3] = (k & 2) ? std::numbers::pi : 0.0;
        EXPECT_NEAR(cost_global(theta, d, k, 1), 0.0, 1e-10);
        EXPECT_NEAR(cost_local(theta, d, k, 1), 0.0, 1e-10);
    }
}

TEST(Cost, LocalBoundedByGlobal) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const PauliDecomposition d = decompose(oracle::random_spd(rng, 4));
        std::vector<double> theta(4);
        for (auto &t : theta) {
            t = u(rng);
        }
        const std::size_t k = trial % 4;
        const double cl = cost_local(theta, d, k, 1);
        const double cg = cost_global(theta, d, k, 1);
        violations += cl > cg + 1e-14 ? 1 : 0;
        EXPECT_GE(cl, -1e-14);
        EXPECT_LE(cg, 1.0 + 1e-14);
        // and the standard converse with n qubits
        EXPECT_LE(cg, 2.0 * cl + 1e-12);
    }
    EXPECT_EQ(violations, 0);
}

TEST(Cost, GlobalMatchesDenseFormula) {
    std::mt19937_64 rng(17);
    const RealMatrix m = oracle::random_spd(rng, 8);
    const PauliDecomposition d = decompose(m);
    std::vector<double> theta(9);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] = 0.3 * i - 1.0;
    }
    const qsim::StateVector x = qsim::run(qsim::ansatz(3, 2, theta));
    Eigen::VectorXd xv(8);
    for (int i = 0; i < 8; ++i) {
        xv(i) = x[i].real();
    }
    const Eigen::VectorXd phi = m * xv;
    for (std::size_t k = 0; k < 8; ++k) {
        const double expect = 1.0 - phi(k) * phi(k) / phi.squaredNorm();
        EXPECT_NEAR(cost_global(theta, d, k, 2), expect, 1e-13);
    }
}

TEST(Cost, AnnihilatedStateRejected) {
    RealMatrix m = RealMatrix::Zero(2, 2);
    m(1, 1) = 1.0;
    const PauliDecomposition d = decompose(m);
    const std::vector<double> theta(2, 0.0);
    EXPECT_THROW(cost_local(theta, d, 0, 1), Error);
    EXPECT_THROW(cost_global(theta, d, 5, 1), Error);
}

TEST(Fidelity, TrivialCases) {
    qsim::Circuit c(2);
    c.add(qsim::RotY{0, 0.7}).add(qsim::CX{0, 1});
    const qsim::StateVector s = qsim::run(c);
    const std::vector<Complex> same(s.amplitudes().begin(), s.amplitudes().end());
    std::vector<Complex> flipped = same;
    for (auto &a : flipped) {
        a = -a;
    }
    EXPECT_NEAR(fidelity(s, same), 1.0, 1e-15);
    EXPECT_NEAR(fidelity(s, flipped), 1.0, 1e-15);
    const std::vector<Complex> orth = {0, 1, 0, 0};
    EXPECT_NEAR(fidelity(s, orth), 0.0, 1e-15);
    EXPECT_THROW(fidelity(s, std::vector<Complex>{1, 0}), Error);
    EXPECT_THROW(fidelity(s, std::vector<Complex>{1, 1, 0, 0}), Error);
}

TEST(Invert, Identity) {
    VqlsConfig cfg;
    cfg.depth = 1;
    cfg.optimizer = tight();
    const RealMatrix id = RealMatrix::Identity(4, 4);
    const VqlsInverse inv = invert(id, cfg, id);
    EXPECT_LT(max_abs(RealMatrix(inv.m_inverse - id)), 1e-4);
    for (double f : inv.fidelities) {
        EXPECT_NEAR(f, 1.0, 1e-8);
    }
}

TEST(Invert, Diagonal) {
    RealMatrix m = RealMatrix::Zero(2, 2);
    m.diagonal() << 2.0, 4.0;
    VqlsConfig cfg;
    cfg.depth = 1;
    cfg.optimizer = tight();
    const VqlsInverse inv = invert(m, cfg);
    EXPECT_NEAR(inv.m_inverse(0, 0), 0.5, 1e-4);
    EXPECT_NEAR(inv.m_inverse(1, 1), 0.25, 1e-4);
    EXPECT_NEAR(inv.m_inverse(0, 1), 0.0, 1e-4);
    EXPECT_TRUE(inv.fidelities.empty());
    EXPECT_NEAR(inv.norms_q[0], 0.5, 1e-4);
}

TEST(Invert, RandomSpdFourByFour) {
    std::mt19937_64 rng(23);
    const RealMatrix m = oracle::random_spd(rng, 4);
    VqlsConfig cfg;
    cfg.depth = 3;
    cfg.optimizer = tight();
    const RealMatrix oracle_inv = m.inverse();
    const VqlsInverse inv = invert(m, cfg, oracle_inv);
    EXPECT_TRUE(inv.all_converged);
    EXPECT_LT(max_abs(RealMatrix(m * inv.m_inverse - RealMatrix::Identity(4, 4))), 1e-3);
    for (double f : inv.fidelities) {
        EXPECT_GT(f, 0.999);
    }
}

TEST(Invert, ResidualBoundedByGlobalCost) {
    std::mt19937_64 rng(29);
    const RealMatrix m = oracle::random_spd(rng, 4);
    VqlsConfig cfg;
    cfg.depth = 2;
    const VqlsInverse inv = invert(m, cfg);
    for (Eigen::Index k = 0; k < 4; ++k) {
        const auto &col = inv.columns[k];
        if (!col.converged) {
            continue;
        }
        const double residual = (m * inv.m_inverse.col(k) - RealVector::Unit(4, k)).norm();
        EXPECT_LE(residual, std::sqrt(2.0 * col.cost_global) + 1e-8);
        EXPECT_GE(col.cost_final, 0.0);
        EXPECT_LE(col.cost_final, 1.0);
        EXPECT_GT(col.norm_q, 0.0);
    }
}

TEST(Invert, PadsNonPowerOfTwo) {
    std::mt19937_64 rng(31);
    const RealMatrix m = oracle::random_spd(rng, 3);
    VqlsConfig cfg;
    cfg.depth = 3;
    cfg.optimizer = tight();
    const VqlsInverse inv = invert(m, cfg, RealMatrix(m.inverse()));
    EXPECT_EQ(inv.padded_dim, 4u);
    EXPECT_EQ(inv.m_inverse.rows(), 3);
    EXPECT_LT(max_abs(RealMatrix(m * inv.m_inverse - RealMatrix::Identity(3, 3))), 1e-3);
    RealMatrix padded = pad_to_power_of_two(m);
    EXPECT_EQ(padded(3, 3), 1.0);
    EXPECT_EQ(padded(0, 3), 0.0);
}

TEST(Invert, DeterministicAcrossRunsAndThreads) {
    std::mt19937_64 rng(37);
    const RealMatrix m = oracle::random_spd(rng, 4);
    VqlsConfig a;
    a.depth = 2;
    VqlsConfig b = a;
    b.jobs = 3;
    const VqlsInverse x = invert(m, a), y = invert(m, a), z = invert(m, b);
    for (int k = 0; k < 4; ++k) {
        EXPECT_EQ(x.columns[k].theta, y.columns[k].theta);
        EXPECT_EQ(x.columns[k].theta, z.columns[k].theta);
    }
    EXPECT_EQ(x.m_inverse, z.m_inverse);
    VqlsConfig c = a;
    c.optimizer.seed += 1;
    EXPECT_NE(invert(m, c).columns[0].theta, x.columns[0].theta);
}

TEST(Invert, RejectsAsymmetric) {
    RealMatrix m = RealMatrix::Identity(2, 2);
    m(0, 1) = 0.5;
    EXPECT_THROW(invert(m, VqlsConfig{}), Error);
}

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
 * S-matrix assembly from the Kohn blocks with a pluggable inverse of M.
 *
 *   B = M00 - M0^T M^{-1} M0
 *   C = M10 - M0^{*T} M^{-1} M0
 *   S = i (B - C^T (B^*)^{-1} C)
 *
 * Only M may be inverted by VQLS; B is always inverted classically.
 */
#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/LU>

#include "qkvp/core.hpp"
#include "qkvp/matelem.hpp"
#include "qkvp/vqls.hpp"

namespace qkvp {

enum class InverterKind { Classical, Vqls, CoupledChannel };

inline std::string to_string(InverterKind k) {
    switch (k) {
    case InverterKind::Classical:
        return "classical";
    case InverterKind::Vqls:
        return "vqls";
    case InverterKind::CoupledChannel:
        return "cc";
    }
    return "unknown";
}

struct SMatrixResult {
    ComplexMatrix s;
    double unitarity_defect = 0.0; ///< ||S^dag S - I||_max
    double symmetry_defect = 0.0;  ///< ||S - S^T||_max
    InverterKind inverter_label = InverterKind::Classical;
    std::optional<std::vector<double>> fidelities;
    std::vector<double> norms_q;
    double inverse_residual = 0.0; ///< ||M M^{-1} - I||_max
    bool inverter_converged = true;
};

inline constexpr double kClassicalInverseGate = 1e-10;
inline constexpr double kQuantumInverseGate = 1e-3;

inline double unitarity_defect(const ComplexMatrix &s) {
    const Eigen::Index n = s.rows();
    return max_abs(ComplexMatrix(s.adjoint() * s - ComplexMatrix::Identity(n, n)));
}

inline double symmetry_defect(const ComplexMatrix &s) { return max_abs(ComplexMatrix(s - s.transpose())); }

inline double inverse_residual(const RealMatrix &m, const RealMatrix &m_inverse) {
    const Eigen::Index n = m.rows();
    return max_abs(RealMatrix(m * m_inverse - RealMatrix::Identity(n, n)));
}

/// S from the blocks and a candidate inverse. Throws when ||M Q - I||_max
/// exceeds `gate`.
inline SMatrixResult assemble_s(const KvpMatrices &mats, const RealMatrix &m_inverse,
                                double gate = kClassicalInverseGate) {
    const Eigen::Index dim = mats.m.rows();
    if (m_inverse.rows() != dim || m_inverse.cols() != dim) {
        throw Error("assemble_s: inverse has the wrong shape");
    }
    if (mats.m0.rows() != dim || mats.m0.cols() != mats.m00.rows()) {
        throw Error("assemble_s: inconsistent block dimensions");
    }
    SMatrixResult out;
    out.inverse_residual = inverse_residual(mats.m, m_inverse);
    if (!(out.inverse_residual < gate)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "residual %.3e >= %.1e", out.inverse_residual, gate);
        throw Error(std::string("assemble_s: inverse quality gate failed, ") + buf);
    }
    const ComplexMatrix q = m_inverse.cast<Complex>();
    const ComplexMatrix b = mats.m00 - mats.m0.transpose() * q * mats.m0;
    const ComplexMatrix c = mats.m10 - mats.m0.adjoint() * q * mats.m0;
    Eigen::FullPivLU<ComplexMatrix> lu(b.conjugate());
    if (!lu.isInvertible()) {
        throw Error("assemble_s: degenerate open-channel block");
    }
    out.s = kI * (b - c.transpose() * lu.solve(c));
    out.unitarity_defect = unitarity_defect(out.s);
    out.symmetry_defect = symmetry_defect(out.s);
    return out;
}

inline RealMatrix classical_inverse(const RealMatrix &m) {
    Eigen::FullPivLU<RealMatrix> lu(m);
    if (!lu.isInvertible()) {
        throw Error("classical_inverse: M is singular");
    }
    return lu.inverse();
}

struct ClassicalInverter {};

struct VqlsInverter {
    vqls::VqlsConfig config;
    bool with_fidelities = true; ///< compare each column against the classical inverse
    double gate = kQuantumInverseGate;
};

using Inverter = std::variant<ClassicalInverter, VqlsInverter>;

/// basis -> blocks -> (orthogonalize) -> invert M -> S.
inline SMatrixResult solve(const ScatteringProblem &problem, const Inverter &inverter = ClassicalInverter{}) {
    const KvpMatrices mats = solver_matrices(problem);
    if (std::holds_alternative<ClassicalInverter>(inverter)) {
        SMatrixResult r = assemble_s(mats, classical_inverse(mats.m), kClassicalInverseGate);
        r.inverter_label = InverterKind::Classical;
        return r;
    }
    const auto &vq = std::get<VqlsInverter>(inverter);
    std::optional<RealMatrix> oracle;
    if (vq.with_fidelities) {
        oracle = classical_inverse(mats.m);
    }
    const vqls::VqlsInverse inv = vqls::invert(mats.m, vq.config, oracle);
    SMatrixResult r = assemble_s(mats, inv.m_inverse, vq.gate);
    r.inverter_label = InverterKind::Vqls;
    r.norms_q = inv.norms_q;
    r.inverter_converged = inv.all_converged;
    if (!inv.fidelities.empty()) {
        r.fidelities = inv.fidelities;
    }
    return r;
}

/// P_fi = |S_fi|^2.
inline RealMatrix probabilities(const SMatrixResult &r) { return r.s.cwiseAbs2(); }

} // namespace qkvp

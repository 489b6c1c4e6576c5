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
 * Resource counts for simulating reaction-path scattering Hamiltonians:
 * vibrational modes, qubits and Pauli terms. Counting only.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qkvp/core.hpp"

namespace qkvp::scaling {

struct MoleculePair {
    std::string name;
    int n_atoms_total = 0;          ///< N_a, both molecules
    int n_angular = 8;              ///< N_A
    int n_scatter_qubits = 2;       ///< n_S
    std::int64_t n_scatter_terms = 16; ///< N_T^R
    int n_vib_basis = 2;            ///< N_v
    int n_vib_qubits_per_mode = 1;  ///< n_v
    int anharmonic_order = 2;       ///< m
    std::optional<double> reference_n_p; ///< printed value to compare against, if any
};

/// ceil(log2 n) for n >= 1.
inline int ceil_log2(std::int64_t n) {
    if (n < 1) {
        throw Error("ceil_log2: argument must be positive");
    }
    int bits = 0;
    while ((std::int64_t{1} << bits) < n) {
        ++bits;
    }
    return bits;
}

inline void validate(const MoleculePair &pair) {
    if (pair.n_vib_basis < 1 || pair.n_scatter_terms < 0 || pair.n_scatter_qubits < 0) {
        throw Error("scaling: invalid basis sizes for " + pair.name);
    }
    if (pair.n_vib_qubits_per_mode != ceil_log2(pair.n_vib_basis)) {
        throw Error("scaling: n_v must equal ceil(log2 N_v) for " + pair.name);
    }
    if (pair.anharmonic_order < 2) {
        throw Error("scaling: anharmonic order must be at least 2");
    }
}

/// N_M = (3 N_a - 3) - 1 - N_A.
inline int vib_modes(const MoleculePair &pair) {
    const int n_m = (3 * pair.n_atoms_total - 3) - 1 - pair.n_angular;
    if (n_m <= 0) {
        throw Error("scaling: no vibrational modes left for " + pair.name);
    }
    return n_m;
}

/// n_q = n_S + N_M n_v.
inline std::int64_t qubit_count(const MoleculePair &pair) {
    validate(pair);
    return pair.n_scatter_qubits + static_cast<std::int64_t>(vib_modes(pair)) * pair.n_vib_qubits_per_mode;
}

inline std::int64_t checked_pow(std::int64_t base, int exp) {
    std::int64_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && out > INT64_MAX / base) {
            throw Error("scaling: term count overflows 64 bits");
        }
        out *= base;
    }
    return out;
}

/// N_P = N_T^R N_M^m N_v^{2m}.
inline std::int64_t pauli_term_count(const MoleculePair &pair) {
    validate(pair);
    const int m = pair.anharmonic_order;
    const std::int64_t a = checked_pow(vib_modes(pair), m);
    const std::int64_t b = checked_pow(pair.n_vib_basis, 2 * m);
    if (a > INT64_MAX / b || pair.n_scatter_terms > INT64_MAX / (a * b)) {
        throw Error("scaling: term count overflows 64 bits");
    }
    return pair.n_scatter_terms * a * b;
}

struct ScalingRow {
    std::string name;
    int n_m = 0;
    std::int64_t n_q = 0;
    std::int64_t n_p = 0;
    std::optional<double> reference_n_p;
    std::optional<double> delta; ///< n_p - reference
};

inline ScalingRow estimate(const MoleculePair &pair) {
    ScalingRow row;
    row.name = pair.name;
    row.n_m = vib_modes(pair);
    row.n_q = qubit_count(pair);
    row.n_p = pauli_term_count(pair);
    if (pair.reference_n_p) {
        row.reference_n_p = pair.reference_n_p;
        row.delta = static_cast<double>(row.n_p) - *pair.reference_n_p;
    }
    return row;
}

/// Dimer pairs of the table: ethylene, benzene, naphthalene, with the printed
/// term counts attached as references.
inline std::vector<MoleculePair> table_pairs() {
    auto make = [](std::string name, int atoms, double printed) {
        MoleculePair p;
        p.name = std::move(name);
        p.n_atoms_total = atoms;
        p.reference_n_p = printed;
        return p;
    };
    return {make("C2H4+C2H4", 12, 147.5e3), make("C6H6+C6H6", 24, 921.6e3), make("C10H8+C10H8", 36, 2560.0e3)};
}

} // namespace qkvp::scaling

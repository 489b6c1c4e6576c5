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
 * Exact statevector simulation for the small gate set the linear solver needs:
 * RotY, CX and X, plus Pauli-string action and expectation values.
 *
 * Qubit j is bit j of the basis-state index (qubit 0 is least significant).
 */
#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qkvp/core.hpp"

namespace qkvp::qsim {

inline constexpr int kMaxQubits = 14;

using Amplitudes = std::vector<Complex>;

struct RotY {
    int qubit;
    double angle;
};
struct CX {
    int control;
    int target;
};
struct X {
    int qubit;
};
using Gate = std::variant<RotY, CX, X>;

class StateVector {
  public:
    /// |0...0> on n qubits.
    explicit StateVector(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 0 || n_qubits > kMaxQubits) {
            throw Error("StateVector: qubit count " + std::to_string(n_qubits) + " outside 0.." +
                        std::to_string(kMaxQubits));
        }
        amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
        amplitudes_[0] = 1.0;
    }

    /// Wraps amplitudes; they must already have unit norm.
    static StateVector from_amplitudes(Amplitudes amps) {
        if (!is_power_of_two(amps.size())) {
            throw Error("StateVector: amplitude count must be a power of two");
        }
        StateVector s(log2_exact(amps.size()));
        double norm2 = 0.0;
        for (const auto &a : amps) {
            norm2 += std::norm(a);
        }
        if (std::abs(norm2 - 1.0) > 1e-10) {
            throw Error("StateVector: amplitudes are not normalized");
        }
        s.amplitudes_ = std::move(amps);
        return s;
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amplitudes_.size(); }
    std::span<const Complex> amplitudes() const { return amplitudes_; }
    std::span<Complex> mutable_amplitudes() { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_[i]; }

    double norm() const {
        double s = 0.0;
        for (const auto &a : amplitudes_) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }

  private:
    int n_qubits_;
    Amplitudes amplitudes_;
};

class Circuit {
  public:
    explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 0 || n_qubits > kMaxQubits) {
            throw Error("Circuit: qubit count outside 0.." + std::to_string(kMaxQubits));
        }
    }

    int n_qubits() const { return n_qubits_; }
    const std::vector<Gate> &gates() const { return gates_; }

    Circuit &add(Gate g) {
        validate(g);
        gates_.push_back(g);
        return *this;
    }

    std::size_t count_cx() const {
        std::size_t n = 0;
        for (const auto &g : gates_) {
            n += std::holds_alternative<CX>(g) ? 1 : 0;
        }
        return n;
    }

    std::size_t count_roty() const {
        std::size_t n = 0;
        for (const auto &g : gates_) {
            n += std::holds_alternative<RotY>(g) ? 1 : 0;
        }
        return n;
    }

  private:
    void check_qubit(int q) const {
        if (q < 0 || q >= n_qubits_) {
            throw Error("Circuit: qubit index " + std::to_string(q) + " out of range");
        }
    }

    void validate(const Gate &g) const {
        std::visit(
            [this](const auto &gate) {
                using T = std::decay_t<decltype(gate)>;
                if constexpr (std::is_same_v<T, CX>) {
                    check_qubit(gate.control);
                    check_qubit(gate.target);
                    if (gate.control == gate.target) {
                        throw Error("Circuit: CX control equals target");
                    }
                } else {
                    check_qubit(gate.qubit);
                }
            },
            g);
    }

    int n_qubits_;
    std::vector<Gate> gates_;
};

/// Applies one gate in place to a 2^n amplitude buffer.
inline void apply_gate(std::span<Complex> amps, const Gate &gate) {
    std::visit(
        [amps](const auto &g) {
            using T = std::decay_t<decltype(g)>;
            const std::size_t dim = amps.size();
            if constexpr (std::is_same_v<T, RotY>) {
                const std::size_t bit = std::size_t{1} << g.qubit;
                const double c = std::cos(0.5 * g.angle);
                const double s = std::sin(0.5 * g.angle);
                for (std::size_t i = 0; i < dim; ++i) {
                    if (i & bit) {
                        continue;
                    }
                    const Complex a0 = amps[i];
                    const Complex a1 = amps[i | bit];
                    amps[i] = c * a0 - s * a1;
                    amps[i | bit] = s * a0 + c * a1;
                }
            } else if constexpr (std::is_same_v<T, CX>) {
                const std::size_t cbit = std::size_t{1} << g.control;
                const std::size_t tbit = std::size_t{1} << g.target;
                for (std::size_t i = 0; i < dim; ++i) {
                    if ((i & cbit) && !(i & tbit)) {
                        std::swap(amps[i], amps[i | tbit]);
                    }
                }
            } else {
                const std::size_t bit = std::size_t{1} << g.qubit;
                for (std::size_t i = 0; i < dim; ++i) {
                    if (!(i & bit)) {
                        std::swap(amps[i], amps[i | bit]);
                    }
                }
            }
        },
        gate);
}

inline void apply_circuit(std::span<Complex> amps, const Circuit &circuit) {
    if (amps.size() != (std::size_t{1} << circuit.n_qubits())) {
        throw Error("apply_circuit: buffer size does not match circuit width");
    }
    for (const auto &g : circuit.gates()) {
        apply_gate(amps, g);
    }
}

/// Inverse circuit applied in place (gates reversed, rotations negated).
inline void apply_inverse(std::span<Complex> amps, const Circuit &circuit) {
    if (amps.size() != (std::size_t{1} << circuit.n_qubits())) {
        throw Error("apply_inverse: buffer size does not match circuit width");
    }
    const auto &gates = circuit.gates();
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        if (const auto *r = std::get_if<RotY>(&*it)) {
            apply_gate(amps, RotY{r->qubit, -r->angle});
        } else {
            apply_gate(amps, *it);
        }
    }
}

/// Runs the circuit on |0...0>.
inline StateVector run(const Circuit &circuit) {
    StateVector state(circuit.n_qubits());
    apply_circuit(state.mutable_amplitudes(), circuit);
    return state;
}

/// Hardware-efficient ansatz: a RotY column, then per layer a linear CX chain
/// followed by another RotY column. Takes n * (depth + 1) angles, column-major
/// by layer.
inline Circuit ansatz(int n, int depth, std::span<const double> theta) {
    if (depth < 1) {
        throw Error("ansatz: depth must be at least 1");
    }
    const std::size_t expected = static_cast<std::size_t>(n) * (depth + 1);
    if (theta.size() != expected) {
        throw Error("ansatz: expected " + std::to_string(expected) + " parameters, got " +
                    std::to_string(theta.size()));
    }
    Circuit c(n);
    std::size_t p = 0;
    for (int q = 0; q < n; ++q) {
        c.add(RotY{q, theta[p++]});
    }
    for (int layer = 0; layer < depth; ++layer) {
        for (int q = 0; q + 1 < n; ++q) {
            c.add(CX{q, q + 1});
        }
        for (int q = 0; q < n; ++q) {
            c.add(RotY{q, theta[p++]});
        }
    }
    return c;
}

inline std::size_t ansatz_parameter_count(int n, int depth) { return static_cast<std::size_t>(n) * (depth + 1); }

/// X on every qubit whose bit of k is set; prepares |k>.
inline Circuit prepare_b(std::size_t k, int n) {
    if (k >= (std::size_t{1} << n)) {
        throw Error("prepare_b: basis index " + std::to_string(k) + " out of range for " + std::to_string(n) +
                    " qubits");
    }
    Circuit c(n);
    for (int q = 0; q < n; ++q) {
        if ((k >> q) & 1U) {
            c.add(X{q});
        }
    }
    return c;
}

enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

/// Tensor product of single-qubit Paulis; letter j acts on qubit j.
class PauliString {
  public:
    PauliString() = default;

    explicit PauliString(std::vector<Pauli> letters) : letters_(std::move(letters)) {}

    /// Parses e.g. "IXZ"; character j is qubit j.
    static PauliString parse(std::string_view text) {
        std::vector<Pauli> letters;
        for (char c : text) {
            switch (c) {
            case 'I':
            case 'X':
            case 'Y':
            case 'Z':
                letters.push_back(static_cast<Pauli>(c));
                break;
            default:
                throw Error(std::string("PauliString: invalid letter '") + c + "'");
            }
        }
        return PauliString(std::move(letters));
    }

    /// String number `code` in base 4 (I=0, X=1, Y=2, Z=3), qubit 0 lowest digit.
    static PauliString from_index(std::size_t code, int n) {
        static constexpr Pauli table[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
        std::vector<Pauli> letters(n);
        for (int q = 0; q < n; ++q) {
            letters[q] = table[code & 3U];
            code >>= 2;
        }
        return PauliString(std::move(letters));
    }

    int n_qubits() const { return static_cast<int>(letters_.size()); }
    Pauli operator[](int q) const { return letters_[q]; }

    std::size_t x_mask() const {
        std::size_t m = 0;
        for (int q = 0; q < n_qubits(); ++q) {
            if (letters_[q] == Pauli::X || letters_[q] == Pauli::Y) {
                m |= std::size_t{1} << q;
            }
        }
        return m;
    }

    std::size_t z_mask() const {
        std::size_t m = 0;
        for (int q = 0; q < n_qubits(); ++q) {
            if (letters_[q] == Pauli::Z || letters_[q] == Pauli::Y) {
                m |= std::size_t{1} << q;
            }
        }
        return m;
    }

    int y_count() const {
        int n = 0;
        for (auto p : letters_) {
            n += p == Pauli::Y ? 1 : 0;
        }
        return n;
    }

    std::string str() const {
        std::string s;
        for (auto p : letters_) {
            s.push_back(static_cast<char>(p));
        }
        return s;
    }

    bool operator==(const PauliString &) const = default;

  private:
    std::vector<Pauli> letters_;
};

/// P|j> = phase(j) |j xor x_mask>. Returns phase(j).
inline Complex pauli_phase(const PauliString &p, std::size_t j) {
    // Y = i X Z, so each Y contributes i and a Z sign on its bit of j
    static constexpr Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int parity = std::popcount(j & p.z_mask()) & 1;
    const Complex base = ipow[p.y_count() & 3];
    return parity ? -base : base;
}

/// out += coeff * P in, for 2^n buffers.
inline void accumulate_pauli(std::span<const Complex> in, const PauliString &p, Complex coeff,
                             std::span<Complex> out) {
    if (in.size() != (std::size_t{1} << p.n_qubits()) || out.size() != in.size()) {
        throw Error("accumulate_pauli: buffer size does not match string length");
    }
    const std::size_t xm = p.x_mask();
    const std::size_t zm = p.z_mask();
    static constexpr Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex base = coeff * ipow[p.y_count() & 3];
    for (std::size_t j = 0; j < in.size(); ++j) {
        const Complex ph = (std::popcount(j & zm) & 1) ? -base : base;
        out[j ^ xm] += ph * in[j];
    }
}

inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw Error("inner: size mismatch");
    }
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

/// <psi|P|psi> for an arbitrary (not necessarily normalized) buffer.
inline Complex expectation_raw(std::span<const Complex> psi, const PauliString &p) {
    Amplitudes tmp(psi.size(), Complex{0.0, 0.0});
    accumulate_pauli(psi, p, 1.0, tmp);
    return inner(psi, tmp);
}

/// <psi|P|psi>; real because P is Hermitian.
inline double expectation(const StateVector &state, const PauliString &p) {
    if (state.n_qubits() != p.n_qubits()) {
        throw Error("expectation: state has " + std::to_string(state.n_qubits()) + " qubits, string has " +
                    std::to_string(p.n_qubits()));
    }
    return expectation_raw(state.amplitudes(), p).real();
}

} // namespace qkvp::qsim

// Copyright 2026 The Qeyboard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense statevector simulator.
//
// Conventions used everywhere in this library:
//  * qubit 0 is the leftmost tensor factor, i.e. A (x) B (x) C acts with A on
//    qubit 0 and C on qubit 2;
//  * the leftmost character of a bitstring is qubit 0;
//  * qubit k is bit (q - 1 - k) of an amplitude index, so amplitude index i
//    printed in binary with q digits is exactly the bitstring.

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#ifndef QEYBOARD_MAX_QUBITS
#define QEYBOARD_MAX_QUBITS 12
#endif

namespace qeyboard {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = QEYBOARD_MAX_QUBITS;

inline void check_qubit_count(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                                    std::to_string(kMaxQubits) + "]");
    }
}

// ---------------------------------------------------------------------------
// Random numbers

/// The library's only generator. Seeded through std::seed_seq so that a
/// (seed, stream...) tuple always maps to the same sequence.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {}) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * stream.size());
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (auto s : stream) {
        push(s);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

/// SplitMix64 finalizer chain: a fixed, portable way to derive independent
/// sub-seeds such as (run seed, frame index, observable index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(seed);
    for (auto s : stream) {
        h = mix(h ^ mix(s));
    }
    return h;
}

/// Uniform double in [0, 1) built from the top 53 bits; unlike
/// std::uniform_real_distribution this is identical across standard libraries.
inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Pauli strings

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline Pauli pauli_from_char(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'I':
        return Pauli::I;
    case 'X':
        return Pauli::X;
    case 'Y':
        return Pauli::Y;
    case 'Z':
        return Pauli::Z;
    default:
        throw std::invalid_argument(std::string("not a Pauli label: '") + c + "'");
    }
}

/// Single-qubit Pauli product a*b = phase * result.
inline std::pair<Complex, Pauli> multiply(Pauli a, Pauli b) {
    if (a == Pauli::I) {
        return {1.0, b};
    }
    if (b == Pauli::I) {
        return {1.0, a};
    }
    if (a == b) {
        return {1.0, Pauli::I};
    }
    const int ia = static_cast<int>(a);
    const int ib = static_cast<int>(b);
    // XY = iZ, YZ = iX, ZX = iY; the reversed orders pick up -i.
    const int ic = 6 - ia - ib;
    const bool cyclic = (ib - ia + 3) % 3 == 1;
    return {cyclic ? Complex(0, 1) : Complex(0, -1), static_cast<Pauli>(ic)};
}

/// Tensor product of single-qubit Paulis, factor k acting on qubit k.
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(std::vector<Pauli> factors) : factors_(std::move(factors)) {}
    static PauliString identity(int n_qubits) {
        return PauliString(std::vector<Pauli>(static_cast<std::size_t>(n_qubits), Pauli::I));
    }
    static PauliString from_string(std::string_view text) {
        std::vector<Pauli> f;
        f.reserve(text.size());
        for (char c : text) {
            f.push_back(pauli_from_char(c));
        }
        return PauliString(std::move(f));
    }
    /// Single non-identity factor `p` on `qubit`.
    static PauliString single(int n_qubits, int qubit, Pauli p) {
        auto s = identity(n_qubits);
        s.factors_.at(static_cast<std::size_t>(qubit)) = p;
        return s;
    }

    int n_qubits() const { return static_cast<int>(factors_.size()); }
    Pauli operator[](std::size_t k) const { return factors_[k]; }
    std::span<const Pauli> factors() const { return factors_; }
    bool is_identity() const {
        return std::all_of(factors_.begin(), factors_.end(), [](Pauli p) { return p == Pauli::I; });
    }

    /// Index bits flipped by the string (X or Y factors).
    std::uint64_t x_mask() const { return mask_where([](Pauli p) { return p == Pauli::X || p == Pauli::Y; }); }
    /// Index bits contributing a sign (Y or Z factors).
    std::uint64_t z_mask() const { return mask_where([](Pauli p) { return p == Pauli::Y || p == Pauli::Z; }); }
    int y_count() const { return static_cast<int>(std::count(factors_.begin(), factors_.end(), Pauli::Y)); }

    /// P|i> = phase(i) |i ^ x_mask>, with phase(i) = i^{#Y} (-1)^{popcount(i & z_mask)}.
    Complex base_phase() const {
        static constexpr std::array<Complex, 4> powers{Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)};
        return powers[static_cast<std::size_t>(y_count() % 4)];
    }

    std::string to_string() const {
        std::string s;
        s.reserve(factors_.size());
        for (auto p : factors_) {
            s.push_back(to_char(p));
        }
        return s;
    }

    friend PauliString tensor(const PauliString &a, const PauliString &b) {
        std::vector<Pauli> f(a.factors_);
        f.insert(f.end(), b.factors_.begin(), b.factors_.end());
        return PauliString(std::move(f));
    }

    /// a*b = phase * string.
    friend std::pair<Complex, PauliString> multiply(const PauliString &a, const PauliString &b) {
        if (a.n_qubits() != b.n_qubits()) {
            throw std::invalid_argument("Pauli string length mismatch");
        }
        Complex phase = 1.0;
        std::vector<Pauli> f(a.factors_.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            auto [ph, p] = multiply(a.factors_[k], b.factors_[k]);
            phase *= ph;
            f[k] = p;
        }
        return {phase, PauliString(std::move(f))};
    }

    friend auto operator<=>(const PauliString &, const PauliString &) = default;
    friend bool operator==(const PauliString &, const PauliString &) = default;

  private:
    template <class Pred> std::uint64_t mask_where(Pred pred) const {
        std::uint64_t m = 0;
        const auto n = factors_.size();
        for (std::size_t k = 0; k < n; ++k) {
            if (pred(factors_[k])) {
                m |= std::uint64_t{1} << (n - 1 - k);
            }
        }
        return m;
    }

    std::vector<Pauli> factors_;
};

// ---------------------------------------------------------------------------
// Statevector

class Statevector {
  public:
    /// |0...0> on `n_qubits` qubits.
    explicit Statevector(int n_qubits) : n_qubits_(n_qubits) {
        check_qubit_count(n_qubits);
        amps_.assign(std::size_t{1} << n_qubits, Complex(0.0, 0.0));
        amps_[0] = 1.0;
    }

    /// Computational basis state; `index` read as a bitstring with qubit 0 leftmost.
    static Statevector basis(int n_qubits, std::size_t index) {
        Statevector s(n_qubits);
        if (index >= s.dim()) {
            throw std::out_of_range("basis index out of range");
        }
        s.amps_[0] = 0.0;
        s.amps_[index] = 1.0;
        return s;
    }

    static Statevector from_bitstring(std::string_view bits) {
        std::size_t index = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') {
                throw std::invalid_argument("bitstring must contain only 0 and 1");
            }
            index = (index << 1) | static_cast<std::size_t>(c == '1');
        }
        return basis(static_cast<int>(bits.size()), index);
    }

    /// Takes ownership of `amplitudes`; length must be 2^q and the norm 1 within 1e-10.
    static Statevector from_amplitudes(std::vector<Complex> amplitudes) {
        const auto n = amplitudes.size();
        if (n < 2 || !std::has_single_bit(n)) {
            throw std::invalid_argument("amplitude count must be a power of two >= 2");
        }
        Statevector s(std::countr_zero(n));
        s.amps_ = std::move(amplitudes);
        if (std::abs(s.norm_squared() - 1.0) > 1e-10) {
            throw std::invalid_argument("amplitudes are not normalized");
        }
        return s;
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }

    /// Index bit holding qubit k.
    std::uint64_t qubit_mask(int k) const { return std::uint64_t{1} << (n_qubits_ - 1 - k); }

    double norm_squared() const {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        std::transform(amps_.begin(), amps_.end(), p.begin(), [](const Complex &a) { return std::norm(a); });
        return p;
    }

    /// <this|other>
    Complex inner(const Statevector &other) const {
        if (other.n_qubits_ != n_qubits_) {
            throw std::invalid_argument("inner product of states with different qubit counts");
        }
        Complex s = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            s += std::conj(amps_[i]) * other.amps_[i];
        }
        return s;
    }

    // In-place kernels. Callers own the state exclusively.

    void apply_1q(int qubit, const std::array<Complex, 4> &m) {
        check_target(qubit);
        const auto mask = qubit_mask(qubit);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & mask) {
                continue;
            }
            const Complex a = amps_[i];
            const Complex b = amps_[i | mask];
            amps_[i] = m[0] * a + m[1] * b;
            amps_[i | mask] = m[2] * a + m[3] * b;
        }
    }

    void apply_cnot(int control, int target) {
        check_pair(control, target);
        const auto mc = qubit_mask(control);
        const auto mt = qubit_mask(target);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & mc) && !(i & mt)) {
                std::swap(amps_[i], amps_[i | mt]);
            }
        }
    }

    void apply_swap(int a, int b) {
        check_pair(a, b);
        const auto ma = qubit_mask(a);
        const auto mb = qubit_mask(b);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & ma) && !(i & mb)) {
                std::swap(amps_[i], amps_[(i & ~ma) | mb]);
            }
        }
    }

    /// |psi> <- P|psi>.
    void apply_pauli(const PauliString &p) {
        check_string(p);
        std::vector<Complex> out(amps_.size());
        const auto x = p.x_mask();
        const auto z = p.z_mask();
        const auto base = p.base_phase();
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            const double sign = (std::popcount(i & z) & 1) ? -1.0 : 1.0;
            out[i ^ x] = base * sign * amps_[i];
        }
        amps_ = std::move(out);
    }

    /// |psi> <- (cos(theta) I - i sin(theta) P)|psi> = exp(-i theta P)|psi>, valid because P^2 = I.
    void apply_pauli_rotation(const PauliString &p, double theta) {
        check_string(p);
        const auto x = p.x_mask();
        const auto z = p.z_mask();
        const Complex c = std::cos(theta);
        const Complex ms = Complex(0.0, -std::sin(theta)) * p.base_phase();
        std::vector<Complex> out(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            const double sign = (std::popcount(i & z) & 1) ? -1.0 : 1.0;
            out[i] += c * amps_[i];
            out[i ^ x] += ms * sign * amps_[i];
        }
        amps_ = std::move(out);
    }

  private:
    void check_target(int qubit) const {
        if (qubit < 0 || qubit >= n_qubits_) {
            throw std::out_of_range("qubit index " + std::to_string(qubit) + " out of range for " +
                                    std::to_string(n_qubits_) + " qubits");
        }
    }
    void check_pair(int a, int b) const {
        check_target(a);
        check_target(b);
        if (a == b) {
            throw std::invalid_argument("two-qubit gate targets must be distinct");
        }
    }
    void check_string(const PauliString &p) const {
        if (p.n_qubits() != n_qubits_) {
            throw std::invalid_argument("Pauli string length does not match qubit count");
        }
    }

    int n_qubits_;
    std::vector<Complex> amps_;
};

// ---------------------------------------------------------------------------
// Gates

enum class GateKind { X, Y, Z, H, CNOT, SWAP, RX, RY, RZ, EXP2 };

inline std::string_view to_string(GateKind k) {
    switch (k) {
    case GateKind::X:
        return "X";
    case GateKind::Y:
        return "Y";
    case GateKind::Z:
        return "Z";
    case GateKind::H:
        return "H";
    case GateKind::CNOT:
        return "CNOT";
    case GateKind::SWAP:
        return "SWAP";
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::EXP2:
        return "EXP2";
    }
    return "?";
}

inline GateKind gate_kind_from_string(std::string_view token) {
    std::string up(token);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    static const std::map<std::string, GateKind, std::less<>> table{
        {"X", GateKind::X},     {"Y", GateKind::Y},       {"Z", GateKind::Z},   {"H", GateKind::H},
        {"CNOT", GateKind::CNOT}, {"CX", GateKind::CNOT}, {"SWAP", GateKind::SWAP}, {"RX", GateKind::RX},
        {"RY", GateKind::RY},   {"RZ", GateKind::RZ},     {"EXP2", GateKind::EXP2}};
    auto it = table.find(up);
    if (it == table.end()) {
        throw std::invalid_argument("unknown gate '" + std::string(token) + "'");
    }
    return it->second;
}

inline bool is_parameterized(GateKind k) {
    return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ || k == GateKind::EXP2;
}

inline std::size_t arity(GateKind k) {
    return (k == GateKind::CNOT || k == GateKind::SWAP || k == GateKind::EXP2) ? 2 : 1;
}

struct GateOp {
    std::string id;
    GateKind kind = GateKind::X;
    std::vector<int> targets;
    std::optional<double> param;  // radians; present iff is_parameterized(kind)
    Pauli axis = Pauli::X;        // EXP2 only: exp(-i param sigma_a (x) sigma_a)

    /// Throws std::invalid_argument / std::out_of_range when the op cannot act on `n_qubits`.
    void validate(int n_qubits) const {
        const std::string name(to_string(kind));
        if (targets.size() != arity(kind)) {
            throw std::invalid_argument(name + " takes " + std::to_string(arity(kind)) + " target(s), got " +
                                        std::to_string(targets.size()));
        }
        for (std::size_t a = 0; a < targets.size(); ++a) {
            if (targets[a] < 0 || targets[a] >= n_qubits) {
                throw std::out_of_range(name + " target " + std::to_string(targets[a]) + " out of range for " +
                                        std::to_string(n_qubits) + " qubits");
            }
            for (std::size_t b = a + 1; b < targets.size(); ++b) {
                if (targets[a] == targets[b]) {
                    throw std::invalid_argument(name + " targets must be distinct");
                }
            }
        }
        if (is_parameterized(kind)) {
            if (!param) {
                throw std::invalid_argument(name + " requires a parameter");
            }
            if (!std::isfinite(*param)) {
                throw std::invalid_argument(name + " parameter must be finite");
            }
        } else if (param) {
            throw std::invalid_argument(name + " takes no parameter");
        }
        if (kind == GateKind::EXP2 && axis == Pauli::I) {
            throw std::invalid_argument("EXP2 axis must be X, Y or Z");
        }
    }

    friend bool operator==(const GateOp &, const GateOp &) = default;
};

/// exp(-i theta sigma_a (x) sigma_a) on qubits (i, j).
inline void apply_pair_exponential_inplace(Statevector &state, Pauli axis, int i, int j, double theta) {
    if (axis == Pauli::I) {
        throw std::invalid_argument("pair exponential axis must be X, Y or Z");
    }
    if (i == j) {
        throw std::invalid_argument("pair exponential targets must be distinct");
    }
    if (i < 0 || j < 0 || i >= state.n_qubits() || j >= state.n_qubits()) {
        throw std::out_of_range("pair exponential target out of range");
    }
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("pair exponential angle must be finite");
    }
    std::vector<Pauli> f(static_cast<std::size_t>(state.n_qubits()), Pauli::I);
    f[static_cast<std::size_t>(i)] = axis;
    f[static_cast<std::size_t>(j)] = axis;
    state.apply_pauli_rotation(PauliString(std::move(f)), theta);
}

inline Statevector apply_pair_exponential(Statevector state, Pauli axis, std::pair<int, int> targets, double theta) {
    apply_pair_exponential_inplace(state, axis, targets.first, targets.second, theta);
    return state;
}

inline void apply_gate_inplace(Statevector &state, const GateOp &op) {
    op.validate(state.n_qubits());
    using C = Complex;
    const int t = op.targets[0];
    const double th = op.param.value_or(0.0);
    const double c = std::cos(th / 2);
    const double s = std::sin(th / 2);
    const double r = 1.0 / std::sqrt(2.0);
    switch (op.kind) {
    case GateKind::X:
        state.apply_1q(t, {C(0), C(1), C(1), C(0)});
        break;
    case GateKind::Y:
        state.apply_1q(t, {C(0), C(0, -1), C(0, 1), C(0)});
        break;
    case GateKind::Z:
        state.apply_1q(t, {C(1), C(0), C(0), C(-1)});
        break;
    case GateKind::H:
        state.apply_1q(t, {C(r), C(r), C(r), C(-r)});
        break;
    case GateKind::RX:
        state.apply_1q(t, {C(c), C(0, -s), C(0, -s), C(c)});
        break;
    case GateKind::RY:
        state.apply_1q(t, {C(c), C(-s), C(s), C(c)});
        break;
    case GateKind::RZ:
        state.apply_1q(t, {std::polar(1.0, -th / 2), C(0), C(0), std::polar(1.0, th / 2)});
        break;
    case GateKind::CNOT:
        state.apply_cnot(op.targets[0], op.targets[1]);
        break;
    case GateKind::SWAP:
        state.apply_swap(op.targets[0], op.targets[1]);
        break;
    case GateKind::EXP2:
        apply_pair_exponential_inplace(state, op.axis, op.targets[0], op.targets[1], th);
        break;
    }
}

/// U_op |psi>.
inline Statevector apply_gate(Statevector state, const GateOp &op) {
    apply_gate_inplace(state, op);
    return state;
}

// ---------------------------------------------------------------------------
// Circuit

/// Ordered gate list; gate ids are unique within a circuit.
class Circuit {
  public:
    explicit Circuit(int n_qubits) : n_qubits_(n_qubits) { check_qubit_count(n_qubits); }

    int n_qubits() const { return n_qubits_; }
    std::span<const GateOp> gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    /// Appends to the right end; assigns "g<N>" when `op.id` is empty. Returns the id.
    std::string add(GateOp op) {
        op.validate(n_qubits_);
        if (op.id.empty()) {
            do {
                op.id = "g" + std::to_string(next_auto_id_++);
            } while (find(op.id));
        } else if (find(op.id)) {
            throw std::invalid_argument("duplicate gate id '" + op.id + "'");
        }
        gates_.push_back(std::move(op));
        return gates_.back().id;
    }

    void remove(std::string_view id) { gates_.erase(gates_.begin() + index_of(id)); }

    void set_param(std::string_view id, double value) {
        auto &g = gates_[index_of(id)];
        if (!is_parameterized(g.kind)) {
            throw std::invalid_argument("gate '" + g.id + "' has no parameter");
        }
        if (!std::isfinite(value)) {
            throw std::invalid_argument("parameter must be finite");
        }
        g.param = value;
    }

    const GateOp *find(std::string_view id) const {
        auto it = std::find_if(gates_.begin(), gates_.end(), [&](const GateOp &g) { return g.id == id; });
        return it == gates_.end() ? nullptr : &*it;
    }

    void apply_to(Statevector &state) const {
        if (state.n_qubits() != n_qubits_) {
            throw std::invalid_argument("circuit and state qubit counts differ");
        }
        for (const auto &g : gates_) {
            apply_gate_inplace(state, g);
        }
    }

    /// U|0...0>.
    Statevector run() const {
        Statevector s(n_qubits_);
        apply_to(s);
        return s;
    }

    friend bool operator==(const Circuit &a, const Circuit &b) {
        return a.n_qubits_ == b.n_qubits_ && a.gates_ == b.gates_;
    }

  private:
    std::size_t index_of(std::string_view id) const {
        auto it = std::find_if(gates_.begin(), gates_.end(), [&](const GateOp &g) { return g.id == id; });
        if (it == gates_.end()) {
            throw std::invalid_argument("unknown gate id '" + std::string(id) + "'");
        }
        return static_cast<std::size_t>(it - gates_.begin());
    }

    int n_qubits_;
    std::vector<GateOp> gates_;
    std::uint64_t next_auto_id_ = 1;
};

// ---------------------------------------------------------------------------
// Sampling

struct CountsHistogram {
    int n_qubits = 0;
    std::uint64_t n_shots = 0;
    std::map<std::string, std::uint64_t> counts;  // q-character bitstrings, qubit 0 first

    std::uint64_t count(const std::string &bits) const {
        auto it = counts.find(bits);
        return it == counts.end() ? 0 : it->second;
    }
};

inline std::string to_bitstring(std::uint64_t index, int n_qubits) {
    std::string s(static_cast<std::size_t>(n_qubits), '0');
    for (int k = 0; k < n_qubits; ++k) {
        if (index & (std::uint64_t{1} << (n_qubits - 1 - k))) {
            s[static_cast<std::size_t>(k)] = '1';
        }
    }
    return s;
}

/// Draws indices from |a_i|^2 and flips each measured bit independently
/// with probability `readout_flip_p`.
inline std::vector<std::uint64_t> sample_indices(const Statevector &state, std::uint64_t n_shots, Rng &rng,
                                                 double readout_flip_p = 0.0) {
    if (!(readout_flip_p >= 0.0 && readout_flip_p <= 1.0)) {
        throw std::invalid_argument("readout flip probability must lie in [0, 1]");
    }
    std::vector<double> cumulative(state.dim());
    double total = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        total += std::norm(state[i]);
        cumulative[i] = total;
    }
    std::vector<std::uint64_t> out;
    out.reserve(n_shots);
    const int q = state.n_qubits();
    for (std::uint64_t shot = 0; shot < n_shots; ++shot) {
        const double u = uniform01(rng) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        auto idx = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                                       static_cast<std::ptrdiff_t>(state.dim()) - 1));
        if (readout_flip_p >= 1.0) {
            idx ^= (std::uint64_t{1} << q) - 1;
        } else if (readout_flip_p > 0.0) {
            for (int k = 0; k < q; ++k) {
                if (uniform01(rng) < readout_flip_p) {
                    idx ^= std::uint64_t{1} << k;
                }
            }
        }
        out.push_back(idx);
    }
    return out;
}

inline CountsHistogram sample_counts(const Statevector &state, std::uint64_t n_shots, std::uint64_t seed,
                                     double readout_flip_p = 0.0) {
    if (n_shots < 1) {
        throw std::invalid_argument("n_shots must be at least 1");
    }
    auto rng = make_rng(seed);
    CountsHistogram h;
    h.n_qubits = state.n_qubits();
    h.n_shots = n_shots;
    for (auto idx : sample_indices(state, n_shots, rng, readout_flip_p)) {
        ++h.counts[to_bitstring(idx, state.n_qubits())];
    }
    return h;
}

}  // namespace qeyboard

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

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qeyboard/qsim.hpp"

namespace qeyboard {

/// Largest number of observables a score or live session may measure per frame.
inline constexpr std::size_t kMaxSessionObservables = 16;

struct PauliTerm {
    double coeff = 0.0;
    PauliString string;

    friend bool operator==(const PauliTerm &, const PauliTerm &) = default;
};

/// Real-weighted sum of Pauli strings on a fixed number of qubits, kept in
/// canonical form: sorted by string, duplicates merged, zero terms dropped.
/// An observable on 0 qubits is a plain scalar.
class Observable {
  public:
    /// Zero operator on `n_qubits` qubits.
    explicit Observable(int n_qubits = 0) : n_qubits_(n_qubits) {
        if (n_qubits < 0) {
            throw std::invalid_argument("negative qubit count");
        }
    }

    Observable(int n_qubits, std::vector<PauliTerm> terms) : n_qubits_(n_qubits), terms_(std::move(terms)) {
        for (const auto &t : terms_) {
            if (t.string.n_qubits() != n_qubits_) {
                throw std::invalid_argument("term '" + t.string.to_string() + "' does not act on " +
                                            std::to_string(n_qubits_) + " qubits");
            }
            if (!std::isfinite(t.coeff)) {
                throw std::invalid_argument("observable coefficients must be finite");
            }
        }
        canonicalize();
    }

    static Observable scalar(double c) { return Observable(0, {{c, PauliString()}}); }
    static Observable identity(int n_qubits, double c = 1.0) {
        return Observable(n_qubits, {{c, PauliString::identity(n_qubits)}});
    }
    static Observable term(double c, PauliString s) {
        const int q = s.n_qubits();
        return Observable(q, {{c, std::move(s)}});
    }
    static Observable term(double c, std::string_view pauli_word) {
        return term(c, PauliString::from_string(pauli_word));
    }

    int n_qubits() const { return n_qubits_; }
    std::span<const PauliTerm> terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// Sum of |coefficients|; an upper bound on the spectral radius.
    double one_norm() const {
        double s = 0.0;
        for (const auto &t : terms_) {
            s += std::abs(t.coeff);
        }
        return s;
    }

    std::string to_string() const {
        if (terms_.empty()) {
            return "0";
        }
        std::ostringstream os;
        os.precision(17);
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            if (k) {
                os << " + ";
            }
            os << terms_[k].coeff;
            if (n_qubits_ > 0) {
                os << '*' << terms_[k].string.to_string();
            }
        }
        return os.str();
    }

    Observable &operator*=(double c) {
        for (auto &t : terms_) {
            t.coeff *= c;
        }
        canonicalize();
        return *this;
    }

    friend Observable operator*(double c, Observable o) { return o *= c; }
    friend Observable operator*(Observable o, double c) { return o *= c; }
    friend Observable operator-(Observable o) { return o *= -1.0; }

    friend Observable operator+(const Observable &a, const Observable &b) {
        auto [x, y] = promote(a, b);
        std::vector<PauliTerm> terms(x.terms_);
        terms.insert(terms.end(), y.terms_.begin(), y.terms_.end());
        return Observable(x.n_qubits_, std::move(terms));
    }
    friend Observable operator-(const Observable &a, const Observable &b) { return a + (-b); }

    /// Operator product. Throws std::domain_error when the product is not
    /// Hermitian (i.e. the factors do not commute term-wise up to cancellation).
    friend Observable operator*(const Observable &a, const Observable &b) {
        if (a.n_qubits_ == 0 || b.n_qubits_ == 0) {
            const Observable &s = a.n_qubits_ == 0 ? a : b;
            const Observable &o = a.n_qubits_ == 0 ? b : a;
            const double c = s.terms_.empty() ? 0.0 : s.terms_[0].coeff;
            return c * o;
        }
        if (a.n_qubits_ != b.n_qubits_) {
            throw std::invalid_argument("operator product of observables on different qubit counts");
        }
        std::map<PauliString, Complex> acc;
        for (const auto &ta : a.terms_) {
            for (const auto &tb : b.terms_) {
                auto [phase, s] = multiply(ta.string, tb.string);
                acc[s] += phase * ta.coeff * tb.coeff;
            }
        }
        std::vector<PauliTerm> terms;
        const double scale = std::max(1.0, a.one_norm() * b.one_norm());
        for (auto &[s, c] : acc) {
            if (std::abs(c.imag()) > 1e-12 * scale) {
                throw std::domain_error("operator product is not Hermitian");
            }
            terms.push_back({c.real(), s});
        }
        return Observable(a.n_qubits_, std::move(terms));
    }

    friend bool operator==(const Observable &, const Observable &) = default;

  private:
    static std::pair<Observable, Observable> promote(const Observable &a, const Observable &b) {
        if (a.n_qubits_ == b.n_qubits_) {
            return {a, b};
        }
        if (a.n_qubits_ == 0) {
            return {identity(b.n_qubits_, a.terms_.empty() ? 0.0 : a.terms_[0].coeff), b};
        }
        if (b.n_qubits_ == 0) {
            return {a, identity(a.n_qubits_, b.terms_.empty() ? 0.0 : b.terms_[0].coeff)};
        }
        throw std::invalid_argument("cannot add observables on " + std::to_string(a.n_qubits_) + " and " +
                                    std::to_string(b.n_qubits_) + " qubits");
    }

    void canonicalize() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const PauliTerm &x, const PauliTerm &y) { return x.string < y.string; });
        std::vector<PauliTerm> merged;
        for (auto &t : terms_) {
            if (!merged.empty() && merged.back().string == t.string) {
                merged.back().coeff += t.coeff;
            } else {
                merged.push_back(std::move(t));
            }
        }
        std::erase_if(merged, [](const PauliTerm &t) { return std::abs(t.coeff) < 1e-14; });
        terms_ = std::move(merged);
    }

    int n_qubits_;
    std::vector<PauliTerm> terms_;
};

/// Single-qubit sigma^axis (or I).
inline Observable pauli(Pauli axis) { return Observable::term(1.0, PauliString({axis})); }

/// Pi_axis = (I - sigma^axis) / 2, the projector onto the -1 eigenspace of sigma^axis.
inline Observable projector(Pauli axis) {
    if (axis == Pauli::I) {
        throw std::invalid_argument("projector axis must be X, Y or Z");
    }
    return 0.5 * (pauli(Pauli::I) - pauli(axis));
}

/// Tensor product, distributing over sums; parts[0] acts on the leftmost qubits.
inline Observable tensor(std::span<const Observable> parts) {
    if (parts.empty()) {
        throw std::invalid_argument("tensor product of an empty list");
    }
    Observable acc = parts[0];
    for (std::size_t k = 1; k < parts.size(); ++k) {
        const auto &rhs = parts[k];
        std::vector<PauliTerm> terms;
        terms.reserve(acc.terms().size() * rhs.terms().size());
        for (const auto &a : acc.terms()) {
            for (const auto &b : rhs.terms()) {
                terms.push_back({a.coeff * b.coeff, tensor(a.string, b.string)});
            }
        }
        acc = Observable(acc.n_qubits() + rhs.n_qubits(), std::move(terms));
    }
    return acc;
}

inline Observable tensor(std::initializer_list<Observable> parts) {
    return tensor(std::span<const Observable>(parts.begin(), parts.size()));
}

/// Every tensor product of {I, Pi_X, Pi_Y, Pi_Z} on q qubits except the
/// identity: 4^q - 1 observables, in lexicographic order of factor labels.
inline std::vector<Observable> tomography_set(int n_qubits) {
    check_qubit_count(n_qubits);
    if (n_qubits > 6) {
        throw std::invalid_argument("tomography set is limited to 6 qubits (4095 observables)");
    }
    const std::array<Observable, 4> factors{pauli(Pauli::I), projector(Pauli::X), projector(Pauli::Y),
                                            projector(Pauli::Z)};
    const std::size_t total = std::size_t{1} << (2 * n_qubits);
    std::vector<Observable> out;
    out.reserve(total - 1);
    std::vector<Observable> parts(static_cast<std::size_t>(n_qubits));
    for (std::size_t code = 1; code < total; ++code) {
        for (int k = 0; k < n_qubits; ++k) {
            parts[static_cast<std::size_t>(k)] = factors[(code >> (2 * (n_qubits - 1 - k))) & 3];
        }
        out.push_back(tensor(parts));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expectation values

/// <psi|P|psi> for a single Pauli string.
inline Complex pauli_expectation(const Statevector &state, const PauliString &p) {
    const auto x = p.x_mask();
    const auto z = p.z_mask();
    Complex s = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const double sign = (std::popcount(i & z) & 1) ? -1.0 : 1.0;
        s += std::conj(state[i ^ x]) * sign * state[i];
    }
    return s * p.base_phase();
}

/// Exact <psi|O|psi>; the (numerically tiny) imaginary residue is discarded.
inline double expectation(const Statevector &state, const Observable &obs) {
    if (obs.n_qubits() != state.n_qubits()) {
        throw std::invalid_argument("observable acts on " + std::to_string(obs.n_qubits()) +
                                    " qubits but the state has " + std::to_string(state.n_qubits()));
    }
    double e = 0.0;
    for (const auto &t : obs.terms()) {
        e += t.coeff * pauli_expectation(state, t.string).real();
    }
    return e;
}

/// Shot-based estimate of <psi|O|psi>: each non-identity term is measured in
/// its own rotated basis with `n_shots` shots (readout flips included).
/// Term k draws from the RNG stream (seed, k).
inline double estimate_expectation(const Statevector &state, const Observable &obs, std::uint64_t n_shots,
                                   std::uint64_t seed, double readout_flip_p = 0.0) {
    if (n_shots == 0) {
        return expectation(state, obs);
    }
    if (obs.n_qubits() != state.n_qubits()) {
        throw std::invalid_argument("observable and state qubit counts differ");
    }
    const int q = state.n_qubits();
    const double r = 1.0 / std::sqrt(2.0);
    double e = 0.0;
    std::uint64_t k = 0;
    for (const auto &t : obs.terms()) {
        ++k;
        if (t.string.is_identity()) {
            e += t.coeff;
            continue;
        }
        Statevector rotated = state;
        std::uint64_t support = 0;
        for (int j = 0; j < q; ++j) {
            const Pauli p = t.string[static_cast<std::size_t>(j)];
            if (p == Pauli::I) {
                continue;
            }
            support |= rotated.qubit_mask(j);
            if (p == Pauli::X) {
                rotated.apply_1q(j, {Complex(r), Complex(r), Complex(r), Complex(-r)});
            } else if (p == Pauli::Y) {
                // H S^dagger maps the Y eigenbasis onto the Z eigenbasis.
                rotated.apply_1q(j, {Complex(r), Complex(0, -r), Complex(r), Complex(0, r)});
            }
        }
        auto rng = make_rng(seed, {k});
        std::int64_t parity_sum = 0;
        for (auto idx : sample_indices(rotated, n_shots, rng, readout_flip_p)) {
            parity_sum += (std::popcount(idx & support) & 1) ? -1 : 1;
        }
        e += t.coeff * static_cast<double>(parity_sum) / static_cast<double>(n_shots);
    }
    return e;
}

// ---------------------------------------------------------------------------
// Quantum strings

/// Per-qubit intensities I_n in [0, 1].
struct IntensityVector {
    std::vector<double> values;
};

/// I_n = (sum of counts whose n-th character is '1') / n_shots.
inline IntensityVector quantum_string_intensities(const CountsHistogram &hist) {
    if (hist.n_shots == 0) {
        throw std::invalid_argument("histogram has zero shots");
    }
    std::vector<std::uint64_t> ones(static_cast<std::size_t>(hist.n_qubits), 0);
    std::uint64_t total = 0;
    for (const auto &[bits, c] : hist.counts) {
        if (bits.size() != static_cast<std::size_t>(hist.n_qubits)) {
            throw std::invalid_argument("bitstring '" + bits + "' has wrong length");
        }
        for (std::size_t n = 0; n < bits.size(); ++n) {
            if (bits[n] == '1') {
                ones[n] += c;
            } else if (bits[n] != '0') {
                throw std::invalid_argument("bitstring '" + bits + "' is not binary");
            }
        }
        total += c;
    }
    if (total != hist.n_shots) {
        throw std::invalid_argument("histogram counts do not sum to n_shots");
    }
    IntensityVector out;
    out.values.reserve(ones.size());
    for (auto c : ones) {
        out.values.push_back(static_cast<double>(c) / static_cast<double>(hist.n_shots));
    }
    return out;
}

/// Infinite-shot limit of quantum_string_intensities: P(qubit n reads 1).
inline IntensityVector exact_string_intensities(const Statevector &state) {
    IntensityVector out;
    out.values.assign(static_cast<std::size_t>(state.n_qubits()), 0.0);
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const double p = std::norm(state[i]);
        for (int n = 0; n < state.n_qubits(); ++n) {
            if (i & state.qubit_mask(n)) {
                out.values[static_cast<std::size_t>(n)] += p;
            }
        }
    }
    for (auto &v : out.values) {
        v = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dense form (oracle support)

inline Eigen::MatrixXcd dense_matrix(const Observable &obs) {
    const int q = obs.n_qubits();
    if (q > kMaxQubits) {
        throw std::invalid_argument("dense matrix limited to " + std::to_string(kMaxQubits) + " qubits");
    }
    const std::size_t dim = std::size_t{1} << q;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto &t : obs.terms()) {
        const auto x = t.string.x_mask();
        const auto z = t.string.z_mask();
        const Complex base = t.coeff * t.string.base_phase();
        for (std::size_t i = 0; i < dim; ++i) {
            const double sign = (std::popcount(i & z) & 1) ? -1.0 : 1.0;
            m(static_cast<Eigen::Index>(i ^ x), static_cast<Eigen::Index>(i)) += base * sign;
        }
    }
    return m;
}

/// Real dense form; throws if any term carries an odd number of Y factors.
inline Eigen::MatrixXd dense_real_matrix(const Observable &obs) {
    for (const auto &t : obs.terms()) {
        if (t.string.y_count() % 2) {
            throw std::invalid_argument("observable has imaginary matrix elements");
        }
    }
    return dense_matrix(obs).real();
}

}  // namespace qeyboard

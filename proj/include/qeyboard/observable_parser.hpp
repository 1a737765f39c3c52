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

// Observable literals.
//
//   expr    := product (('+' | '-') product)*
//   product := tensor ('*' tensor)*
//   tensor  := unary ('@' unary)*
//   unary   := '-' unary | primary
//   primary := NUMBER | WORD | '(' expr ')'
//
// WORD is a Pauli word over {I,X,Y,Z} (one factor per letter, "XZ" is X@Z)
// or one of PI_X, PI_Y, PI_Z. Matching is case-insensitive. '@' is the
// tensor product and binds tightest; '*' is scalar or operator product.
// A bare number combined with an operator by '+'/'-' means number*I.
//
//   "0.5*(I-X)@I"              -> (I - X)/2 on qubit 0, identity on qubit 1
//   "PI_Z@I@I"                 -> projector on qubit 0 of three
//   "(2*PI_Z@I + I@PI_Z + 1)@I"

#pragma once

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>

#include "qeyboard/errors.hpp"
#include "qeyboard/observables.hpp"

namespace qeyboard {

namespace detail {

class ObservableParser {
  public:
    explicit ObservableParser(std::string_view text) : text_(text) {}

    Observable parse() {
        auto result = expr();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return result;
    }

  private:
    Observable expr() {
        auto acc = product();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                acc = combine_sum(acc, product(), 1.0);
            } else if (accept('-')) {
                acc = combine_sum(acc, product(), -1.0);
            } else {
                return acc;
            }
        }
    }

    Observable product() {
        auto acc = tensor_chain();
        for (;;) {
            skip_ws();
            if (!accept('*')) {
                return acc;
            }
            const auto at = pos_;
            auto rhs = tensor_chain();
            try {
                acc = acc * rhs;
            } catch (const std::exception &e) {
                fail(e.what(), at);
            }
        }
    }

    Observable tensor_chain() {
        auto acc = unary();
        for (;;) {
            skip_ws();
            if (!accept('@')) {
                return acc;
            }
            const auto at = pos_;
            auto rhs = unary();
            if (acc.n_qubits() == 0 || rhs.n_qubits() == 0) {
                fail("'@' needs operators on both sides, not numbers", at);
            }
            acc = tensor({acc, rhs});
        }
    }

    Observable unary() {
        skip_ws();
        if (accept('-')) {
            return -unary();
        }
        return primary();
    }

    Observable primary() {
        skip_ws();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = expr();
            skip_ws();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return Observable::scalar(number());
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            return word();
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    double number() {
        const auto start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                text_[pos_] == 'e' || text_[pos_] == 'E' ||
                ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
                 (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
            ++pos_;
        }
        const std::string token(text_.substr(start, pos_ - start));
        char *end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) {
            fail("bad number '" + token + "'", start);
        }
        return v;
    }

    Observable word() {
        const auto start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        std::string w(text_.substr(start, pos_ - start));
        for (auto &ch : w) {
            ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        }
        if (w == "PI_X") {
            return projector(Pauli::X);
        }
        if (w == "PI_Y") {
            return projector(Pauli::Y);
        }
        if (w == "PI_Z") {
            return projector(Pauli::Z);
        }
        if (w.find_first_not_of("IXYZ") != std::string::npos) {
            fail("unknown token '" + std::string(text_.substr(start, pos_ - start)) + "'", start);
        }
        if (static_cast<int>(w.size()) > kMaxQubits) {
            fail("Pauli word longer than " + std::to_string(kMaxQubits) + " qubits", start);
        }
        return Observable::term(1.0, PauliString::from_string(w));
    }

    Observable combine_sum(const Observable &a, const Observable &b, double sign) {
        try {
            return sign > 0 ? a + b : a - b;
        } catch (const std::exception &e) {
            fail(e.what());
        }
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string &msg) const { fail(msg, pos_); }
    [[noreturn]] void fail(const std::string &msg, std::size_t at) const {
        throw ParseError("in observable '" + std::string(text_) + "': " + msg, 1, at + 1);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses an observable literal. When `n_qubits` > 0 the result must act on
/// exactly that many qubits. A pure number is rejected unless n_qubits > 0,
/// in which case it becomes number*I.
inline Observable parse_observable(std::string_view text, int n_qubits = 0) {
    auto obs = detail::ObservableParser(text).parse();
    if (obs.n_qubits() == 0) {
        if (n_qubits <= 0) {
            throw ParseError("observable '" + std::string(text) + "' has no operator factors");
        }
        return obs + Observable::identity(n_qubits, 0.0);
    }
    if (n_qubits > 0 && obs.n_qubits() != n_qubits) {
        throw ParseError("observable '" + std::string(text) + "' acts on " + std::to_string(obs.n_qubits()) +
                         " qubits, expected " + std::to_string(n_qubits));
    }
    return obs;
}

}  // namespace qeyboard

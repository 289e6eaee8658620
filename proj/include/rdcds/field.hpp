#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "rdcds/error.hpp"

namespace rdcds {

using Symbol = std::uint32_t;

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::uint32_t next_prime(std::uint64_t at_least) {
    std::uint64_t n = at_least < 2 ? 2 : at_least;
    while (!is_prime(n)) ++n;
    return static_cast<std::uint32_t>(n);
}

/// Arithmetic on raw residues modulo a prime q < 2^31.
class Field {
public:
    explicit Field(std::uint32_t q) : q_(q) {
        if (!is_prime(q) || q >= (1u << 31))
            throw Error(ErrorCode::InvalidParams, "field modulus " + std::to_string(q) + " is not a prime below 2^31");
    }

    std::uint32_t modulus() const noexcept { return q_; }

    Symbol reduce(std::int64_t x) const noexcept {
        std::int64_t r = x % static_cast<std::int64_t>(q_);
        return static_cast<Symbol>(r < 0 ? r + q_ : r);
    }
    Symbol add(Symbol a, Symbol b) const noexcept {
        Symbol s = a + b;
        return s >= q_ ? s - q_ : s;
    }
    Symbol sub(Symbol a, Symbol b) const noexcept { return a >= b ? a - b : a + q_ - b; }
    Symbol neg(Symbol a) const noexcept { return a == 0 ? 0 : q_ - a; }
    Symbol mul(Symbol a, Symbol b) const noexcept {
        return static_cast<Symbol>(static_cast<std::uint64_t>(a) * b % q_);
    }
    Symbol pow(Symbol base, std::uint64_t e) const noexcept {
        std::uint64_t r = 1 % q_, b = base % q_;
        while (e) {
            if (e & 1) r = r * b % q_;
            b = b * b % q_;
            e >>= 1;
        }
        return static_cast<Symbol>(r);
    }
    Symbol inv(Symbol a) const {
        if (a % q_ == 0) throw Error(ErrorCode::ZeroInverse, "zero has no multiplicative inverse");
        return pow(a, q_ - 2);
    }
    /// acc + c*x
    Symbol fma(Symbol acc, Symbol c, Symbol x) const noexcept {
        return static_cast<Symbol>((acc + static_cast<std::uint64_t>(c) * x) % q_);
    }

    bool operator==(const Field&) const = default;

private:
    std::uint32_t q_;
};

/// A residue tagged with its modulus. Mixed-modulus arithmetic is rejected.
class FieldElement {
public:
    FieldElement(std::int64_t value, std::uint32_t modulus) : q_(modulus) {
        if (!is_prime(modulus))
            throw Error(ErrorCode::InvalidParams, "modulus " + std::to_string(modulus) + " is not prime");
        std::int64_t r = value % static_cast<std::int64_t>(modulus);
        v_ = static_cast<Symbol>(r < 0 ? r + modulus : r);
    }

    Symbol value() const noexcept { return v_; }
    std::uint32_t modulus() const noexcept { return q_; }
    bool is_zero() const noexcept { return v_ == 0; }

    FieldElement inv() const {
        return raw(Field(q_).inv(v_), q_);
    }

    friend FieldElement operator+(FieldElement a, FieldElement b) {
        check(a, b);
        return raw(Field(a.q_).add(a.v_, b.v_), a.q_);
    }
    friend FieldElement operator-(FieldElement a, FieldElement b) {
        check(a, b);
        return raw(Field(a.q_).sub(a.v_, b.v_), a.q_);
    }
    friend FieldElement operator*(FieldElement a, FieldElement b) {
        check(a, b);
        return raw(Field(a.q_).mul(a.v_, b.v_), a.q_);
    }
    friend FieldElement operator/(FieldElement a, FieldElement b) { return a * b.inv(); }
    FieldElement operator-() const { return raw(v_ == 0 ? 0 : q_ - v_, q_); }

    bool operator==(const FieldElement&) const = default;

    friend std::ostream& operator<<(std::ostream& os, FieldElement e) { return os << e.v_; }

private:
    static FieldElement raw(Symbol v, std::uint32_t q) {
        FieldElement e;
        e.v_ = v;
        e.q_ = q;
        return e;
    }
    static void check(const FieldElement& a, const FieldElement& b) {
        if (a.q_ != b.q_) throw Error(ErrorCode::ShapeMismatch, "field elements from different moduli");
    }
    FieldElement() = default;

    Symbol v_ = 0;
    std::uint32_t q_ = 2;
};

/// Multiplicative inverse; ZeroInverse when a = 0.
inline FieldElement fe_inv(FieldElement a) { return a.inv(); }

} // namespace rdcds

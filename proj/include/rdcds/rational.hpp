#pragma once

#include <gmpxx.h>

#include <ostream>
#include <string>

#include "rdcds/error.hpp"

namespace rdcds {

/// Normalized arbitrary-precision rational; thin wrapper over GMP's mpq_class so that
/// division by zero becomes an Error instead of a SIGFPE.
class Rational {
public:
    Rational() = default;
    Rational(long n) : v_(n) {}                 // NOLINT(implicit)
    Rational(int n) : v_(n) {}                  // NOLINT(implicit)
    Rational(long num, long den) {
        if (den == 0) throw Error(ErrorCode::DivideByZero, "zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    /// Parses "a/b" or "a".
    static Rational parse(const std::string& s) {
        mpq_class v;
        if (v.set_str(s, 10) != 0) throw Error(ErrorCode::ConfigParse, "not a rational: " + s);
        if (v.get_den() == 0) throw Error(ErrorCode::DivideByZero, "zero denominator in " + s);
        return Rational(v);
    }

    const mpq_class& get() const noexcept { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }
    int sign() const { return sgn(v_); }
    bool is_zero() const { return sgn(v_) == 0; }

    std::string str() const { return v_.get_str(); }
    /// Always "num/den", even for integers ("2/1"), for the serialized formats.
    std::string fraction() const { return num().get_str() + "/" + den().get_str(); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw Error(ErrorCode::DivideByZero, "division by zero rational");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const { return Rational(mpq_class(-v_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class v_;
};

enum class RatOp { Add, Sub, Mul, Div };

inline Rational rat_arith(const Rational& a, const Rational& b, RatOp op) {
    switch (op) {
    case RatOp::Add: return a + b;
    case RatOp::Sub: return a - b;
    case RatOp::Mul: return a * b;
    case RatOp::Div: return a / b;
    }
    throw Error(ErrorCode::InvalidParams, "unknown rational op");
}

} // namespace rdcds

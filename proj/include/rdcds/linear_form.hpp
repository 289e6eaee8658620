#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rdcds/field.hpp"

namespace rdcds {

/// Sparse linear combination sum_k c_k * v_k over F_q, terms sorted by variable index,
/// no zero coefficients stored. Used to push symbolic unknowns through the encoder.
class LinearForm {
public:
    using Term = std::pair<std::uint32_t, Symbol>;

    LinearForm() = default;
    static LinearForm var(std::uint32_t k, Symbol c = 1) {
        LinearForm f;
        if (c != 0) f.terms_.push_back({k, c});
        return f;
    }

    const std::vector<Term>& terms() const noexcept { return terms_; }
    std::vector<Term>& terms() noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    Symbol coeff(std::uint32_t k) const {
        for (const auto& [v, c] : terms_)
            if (v == k) return c;
        return 0;
    }

    /// Evaluates at an assignment of all variables.
    Symbol eval(const std::vector<Symbol>& values, const Field& f) const {
        Symbol acc = 0;
        for (const auto& [v, c] : terms_) acc = f.fma(acc, c, values[v]);
        return acc;
    }

    bool operator==(const LinearForm&) const = default;

private:
    std::vector<Term> terms_;
};

/// Scalar policy over raw residues.
struct FieldOps {
    using value_type = Symbol;
    Field f;

    explicit FieldOps(std::uint32_t q) : f(q) {}
    Symbol zero() const { return 0; }
    bool is_zero(Symbol x) const { return x == 0; }
    void axpy(Symbol& acc, Symbol c, Symbol x) const { acc = f.fma(acc, c, x); }
};

/// Scalar policy over linear forms.
struct FormOps {
    using value_type = LinearForm;
    Field f;

    explicit FormOps(std::uint32_t q) : f(q) {}
    LinearForm zero() const { return {}; }
    bool is_zero(const LinearForm& x) const { return x.empty(); }

    void axpy(LinearForm& acc, Symbol c, const LinearForm& x) const {
        if (c == 0 || x.empty()) return;
        const auto& a = acc.terms();
        const auto& b = x.terms();
        std::vector<LinearForm::Term> out;
        out.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
                out.push_back(a[i++]);
            } else if (i == a.size() || b[j].first < a[i].first) {
                out.push_back({b[j].first, f.mul(c, b[j].second)});
                ++j;
            } else {
                const Symbol s = f.fma(a[i].second, c, b[j].second);
                if (s != 0) out.push_back({a[i].first, s});
                ++i;
                ++j;
            }
        }
        acc.terms() = std::move(out);
    }
};

} // namespace rdcds

#pragma once

#include <span>
#include <vector>

#include "rdcds/error.hpp"
#include "rdcds/matrix.hpp"
#include "rdcds/params.hpp"

namespace rdcds {

/// N x beta_1 Cauchy generator C(n, j) = 1/(x_n - f_j) with x_n = n, f_j = N + j.
struct CauchyCode {
    std::vector<Symbol> x;
    std::vector<Symbol> f;
    FieldMatrix C;

    /// 1-based row n restricted to the first `cols` columns.
    std::span<const Symbol> row(int n, std::size_t cols) const { return C.row(n - 1).subspan(0, cols); }

    /// C(rows, cols) for 1-based server list and 1-based column list.
    FieldMatrix sub(const std::vector<int>& rows, const std::vector<int>& cols) const {
        FieldMatrix m(rows.size(), cols.size(), C.modulus());
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (std::size_t b = 0; b < cols.size(); ++b) m.at(a, b) = C.at(rows[a] - 1, cols[b] - 1);
        return m;
    }
};

inline CauchyCode cauchy(const DerivedParams& d) {
    const std::uint64_t need = static_cast<std::uint64_t>(d.N()) + d.beta1;
    if (d.q < need)
        throw Error(ErrorCode::FieldTooSmall,
                    "q = " + std::to_string(d.q) + " cannot host N + beta_1 = " + std::to_string(need) + " points");
    const Field fld(d.q);
    CauchyCode code;
    for (int n = 1; n <= d.N(); ++n) code.x.push_back(static_cast<Symbol>(n));
    for (int j = 1; j <= d.beta1; ++j) code.f.push_back(static_cast<Symbol>(d.N() + j));
    code.C = FieldMatrix(d.N(), d.beta1, d.q);
    for (int n = 0; n < d.N(); ++n)
        for (int j = 0; j < d.beta1; ++j) code.C.at(n, j) = fld.inv(fld.sub(code.x[n], code.f[j]));
    return code;
}

inline CauchyCode cauchy(const SystemParams& p) { return cauchy(derive(p)); }

/// out[c] = sum_r coeffs[r] * m(r, c) for c in [c0, c1), rows 0..coeffs.size()-1.
template <class Ops>
std::vector<typename Ops::value_type> combine_rows(const Ops& ops, std::span<const Symbol> coeffs,
                                                   const Grid<typename Ops::value_type>& m, std::size_t c0,
                                                   std::size_t c1) {
    if (coeffs.size() > m.rows()) throw Error(ErrorCode::ShapeMismatch, "combine_rows: too many coefficients");
    std::vector<typename Ops::value_type> out(c1 - c0, ops.zero());
    for (std::size_t r = 0; r < coeffs.size(); ++r) {
        if (coeffs[r] == 0) continue;
        for (std::size_t c = c0; c < c1; ++c) ops.axpy(out[c - c0], coeffs[r], m.at(r, c));
    }
    return out;
}

} // namespace rdcds

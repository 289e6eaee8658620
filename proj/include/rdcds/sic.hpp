#pragma once

#include <string>
#include <vector>

#include "rdcds/cauchy.hpp"
#include "rdcds/matrix.hpp"
#include "rdcds/staircase.hpp"

namespace rdcds {

/// Partially known staircase: values for the first J blocks plus a per-row "known" mask.
/// Rows below beta_i are structurally zero and never consulted.
struct SicState {
    FieldMatrix m;                         // totalRows x offset(J)
    std::vector<std::vector<char>> known;  // known[i-1][r-1]

    SicState(const StaircaseProfile& p, int J, std::uint32_t q)
        : m(p.totalRows, p.offset(J), q), known(J, std::vector<char>(p.totalRows, 0)) {}

    void set_row(const StaircaseProfile& p, int block, int row, std::span<const Symbol> values) {
        const long long off = p.offset(block - 1);
        for (long long c = 0; c < p.block(block).gamma; ++c) m.at(row - 1, off + c) = values[c];
        known[block - 1][row - 1] = 1;
    }
};

/// Unknown-row sets solved per block, for inspection in tests.
struct SicTrace {
    std::vector<std::vector<int>> unknownRows;  // indexed by block-1
};

/// Successive interference cancellation over blocks J..1. `obs` row k holds the
/// observations of servers[k] on the first offset(J) staircase columns, i.e.
/// C(servers[k], [totalRows]) * M restricted to those columns. Each block is solved by
/// inverting the square Cauchy submatrix on its unknown rows; once solved, its message
/// rows reveal the replicated rows of earlier blocks.
inline void sic_decode(const StaircaseProfile& p, int J, const CauchyCode& code, const std::vector<int>& servers,
                       const FieldMatrix& obs, SicState& st, SicTrace* trace = nullptr) {
    if (J < 1 || J > p.G()) throw Error(ErrorCode::ShapeMismatch, "sic: block count out of range");
    if (obs.rows() != servers.size() || static_cast<long long>(obs.cols()) < p.offset(J))
        throw Error(ErrorCode::ShapeMismatch, "sic: observation matrix shape");
    const Field f(code.C.modulus());
    if (trace) trace->unknownRows.assign(J, {});
    for (int i = J; i >= 1; --i) {
        const auto& b = p.block(i);
        const long long off = p.offset(i - 1);
        std::vector<int> unknown, known;
        for (int r = 1; r <= b.beta; ++r) (st.known[i - 1][r - 1] ? known : unknown).push_back(r);
        if (unknown.size() != servers.size())
            throw Error(ErrorCode::ShapeMismatch, "sic: block " + std::to_string(i) + " has " +
                                                      std::to_string(unknown.size()) + " unknown rows for " +
                                                      std::to_string(servers.size()) + " servers");
        FieldMatrix rhs(servers.size(), b.gamma, code.C.modulus());
        for (std::size_t k = 0; k < servers.size(); ++k) {
            for (long long c = 0; c < b.gamma; ++c) {
                Symbol v = obs.at(k, off + c);
                for (int r : known) v = f.sub(v, f.mul(code.C.at(servers[k] - 1, r - 1), st.m.at(r - 1, off + c)));
                rhs.at(k, c) = v;
            }
        }
        const FieldMatrix sol = mat_solve(code.sub(servers, unknown), rhs);
        for (std::size_t u = 0; u < unknown.size(); ++u) {
            for (long long c = 0; c < b.gamma; ++c) st.m.at(unknown[u] - 1, off + c) = sol.at(u, c);
            st.known[i - 1][unknown[u] - 1] = 1;
        }
        if (trace) trace->unknownRows[i - 1] = unknown;
        if (i == 1) break;
        for (int r = 1; r <= b.alpha; ++r) {
            for (long long c = 0; c < b.gamma; ++c) {
                const EntrySource s = replica_source(p, i, r, c);
                st.m.at(s.row - 1, p.offset(s.block - 1) + s.col) = st.m.at(r - 1, off + c);
                st.known[s.block - 1][s.row - 1] = 1;
            }
        }
    }
}

/// Message rows of block 1, row-major: the decoded message.
inline std::vector<Symbol> block1_message(const StaircaseProfile& p, const FieldMatrix& m) {
    const auto& b = p.block(1);
    std::vector<Symbol> w;
    w.reserve(static_cast<std::size_t>(b.alpha * b.gamma));
    for (int r = 0; r < b.alpha; ++r)
        for (long long c = 0; c < b.gamma; ++c) w.push_back(m.at(r, c));
    return w;
}

} // namespace rdcds

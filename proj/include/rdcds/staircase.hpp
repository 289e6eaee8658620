#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rdcds/error.hpp"
#include "rdcds/matrix.hpp"
#include "rdcds/params.hpp"

namespace rdcds {

struct BlockShape {
    int alpha = 0;
    long long gamma = 0;
    int beta = 0;
};

/// Shape of one staircase: blocks side by side, block i spanning columns
/// [offset(i-1), offset(i)). Block indices are 1-based throughout.
struct StaircaseProfile {
    int totalRows = 0;
    int rBase = 0;
    std::vector<BlockShape> blocks;  // blocks[i-1] is block i

    int G() const { return static_cast<int>(blocks.size()); }
    const BlockShape& block(int i) const { return blocks.at(i - 1); }
    long long offset(int i) const {
        long long s = 0;
        for (int j = 1; j <= i; ++j) s += block(j).gamma;
        return s;
    }
    long long width() const { return offset(G()); }
    int omega() const { return blocks.empty() ? 0 : blocks.front().beta - blocks.front().alpha; }
    long long message_length() const { return blocks.empty() ? 0 : blocks.front().alpha * blocks.front().gamma; }
};

inline StaircaseProfile outer_profile(const DerivedParams& d) {
    StaircaseProfile p{d.beta1, d.Rr(), {}};
    for (int i = 1; i <= d.G1; ++i) p.blocks.push_back({d.alpha[i], d.gamma[i], d.beta[i]});
    return p;
}

inline StaircaseProfile inner_profile(const DerivedParams& d) {
    StaircaseProfile p{d.N() - d.S(), d.Rr() - d.S(), {}};
    for (int i = 1; i <= d.G2; ++i) p.blocks.push_back({d.alphap[i], d.gammap[i], d.betap[i]});
    return p;
}

enum class RowKind { Message, Replicated, Noise, Zero };

inline const char* to_string(RowKind k) {
    switch (k) {
    case RowKind::Message: return "message";
    case RowKind::Replicated: return "replicated";
    case RowKind::Noise: return "noise";
    case RowKind::Zero: return "zero";
    }
    return "?";
}

/// rows[r-1] classifies row r of block i.
inline std::vector<RowKind> row_kinds(const StaircaseProfile& p, int i) {
    const auto& b = p.block(i);
    std::vector<RowKind> rows(p.totalRows, RowKind::Zero);
    for (int r = 1; r <= b.alpha; ++r) rows[r - 1] = i == 1 ? RowKind::Message : RowKind::Replicated;
    for (int r = b.alpha + 1; r <= b.beta; ++r) rows[r - 1] = RowKind::Noise;
    return rows;
}

/// Where a replicated entry of block i >= 2 comes from.
struct EntrySource {
    int block;      // 1-based source block j < i
    int row;        // 1-based row within block j
    long long col;  // 0-based column within block j
};

/// Entry (r, c) of block i (r 1-based in [alpha_i], c 0-based) is the
/// (r-1)*gamma_i + c -th symbol of concat_{j<i} row (rBase+i-j) of block j.
inline EntrySource replica_source(const StaircaseProfile& p, int i, int r, long long c) {
    long long k = static_cast<long long>(r - 1) * p.block(i).gamma + c;
    for (int j = 1; j < i; ++j) {
        if (k < p.block(j).gamma) return {j, p.rBase + i - j, k};
        k -= p.block(j).gamma;
    }
    throw Error(ErrorCode::ShapeMismatch, "replica index out of range");
}

/// Row-major reshape into a rows x cols grid.
template <class T>
Grid<T> reshape_grid(const std::vector<T>& v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols)
        throw Error(ErrorCode::ShapeMismatch, "reshape: " + std::to_string(v.size()) + " symbols into " +
                                                  std::to_string(rows) + "x" + std::to_string(cols));
    Grid<T> g(rows, cols);
    g.data() = v;
    return g;
}

inline FieldMatrix reshape(const std::vector<Symbol>& v, std::size_t rows, std::size_t cols, std::uint32_t q) {
    return FieldMatrix(reshape_grid(v, rows, cols), q);
}

/// Noise provider: given block index i and the staircase built so far (blocks < i final,
/// block i message rows already placed), returns the Omega x gamma_i noise block.
template <class T>
using NoiseFn = std::function<Grid<T>(int, const Grid<T>&)>;

/// Staircase generation. Block 1 holds the reshaped message; block i >= 2 holds the reshape
/// of rows rBase+i-j of blocks j < i; noise rows alpha_i+1..beta_i; zero below.
template <class T>
Grid<T> scgen_with(const std::vector<T>& msg, const StaircaseProfile& p, const NoiseFn<T>& noise) {
    if (static_cast<long long>(msg.size()) != p.message_length())
        throw Error(ErrorCode::ShapeMismatch, "scgen: message length " + std::to_string(msg.size()) +
                                                  ", profile expects " + std::to_string(p.message_length()));
    const int om = p.omega();
    Grid<T> m(p.totalRows, p.width());
    for (int i = 1; i <= p.G(); ++i) {
        const auto& b = p.block(i);
        if (b.beta > p.totalRows || b.beta - b.alpha != om)
            throw Error(ErrorCode::ShapeMismatch, "scgen: inconsistent block shape");
        const long long off = p.offset(i - 1);
        if (i == 1) {
            for (int r = 0; r < b.alpha; ++r)
                for (long long c = 0; c < b.gamma; ++c) m.at(r, off + c) = msg[r * b.gamma + c];
        } else {
            std::vector<T> concat;
            concat.reserve(static_cast<std::size_t>(b.alpha * b.gamma));
            for (int j = 1; j < i; ++j) {
                const long long oj = p.offset(j - 1);
                const int src = p.rBase + i - j;
                for (long long c = 0; c < p.block(j).gamma; ++c) concat.push_back(m.at(src - 1, oj + c));
            }
            if (static_cast<long long>(concat.size()) != b.alpha * b.gamma)
                throw Error(ErrorCode::ShapeMismatch, "scgen: replicated rows do not fill block " + std::to_string(i));
            for (int r = 0; r < b.alpha; ++r)
                for (long long c = 0; c < b.gamma; ++c) m.at(r, off + c) = std::move(concat[r * b.gamma + c]);
        }
        Grid<T> z = noise(i, m);
        if (static_cast<int>(z.rows()) != om || static_cast<long long>(z.cols()) != b.gamma)
            throw Error(ErrorCode::ShapeMismatch, "scgen: noise block " + std::to_string(i) + " is " +
                                                      std::to_string(z.rows()) + "x" + std::to_string(z.cols()));
        for (int r = 0; r < om; ++r)
            for (long long c = 0; c < b.gamma; ++c) m.at(b.alpha + r, off + c) = z.at(r, c);
    }
    return m;
}

template <class T>
Grid<T> scgen_grid(const std::vector<T>& msg, const std::vector<Grid<T>>& noise, const StaircaseProfile& p) {
    if (static_cast<int>(noise.size()) != p.G())
        throw Error(ErrorCode::ShapeMismatch, "scgen: expected " + std::to_string(p.G()) + " noise blocks");
    return scgen_with<T>(msg, p, [&](int i, const Grid<T>&) { return noise[i - 1]; });
}

inline FieldMatrix scgen(const std::vector<Symbol>& msg, const std::vector<FieldMatrix>& noise,
                         const StaircaseProfile& p, std::uint32_t q) {
    std::vector<Grid<Symbol>> z(noise.begin(), noise.end());
    return FieldMatrix(scgen_grid(msg, z, p), q);
}

/// Outer row of block j that feeds re-encoding pass i.
inline int reencode_row(const DerivedParams& d, int j, int i) { return d.Rr() + d.G1 + i - j; }

/// Message of re-encoding pass i: concat over outer blocks j of row reencode_row(j, i).
template <class T>
std::vector<T> reencode_input(const DerivedParams& d, const StaircaseProfile& outer, const Grid<T>& m1, int i) {
    std::vector<T> w;
    w.reserve(static_cast<std::size_t>(d.Lp));
    for (int j = 1; j <= d.G1; ++j) {
        const long long off = outer.offset(j - 1);
        const int r = reencode_row(d, j, i);
        for (long long c = 0; c < outer.block(j).gamma; ++c) w.push_back(m1.at(r - 1, off + c));
    }
    return w;
}

template <class T>
struct Layers {
    Grid<T> M1;  // beta_1 x lambda_{G1}
    Grid<T> M2;  // (N-S) x P*lambda'_{G2}, group i in columns [(i-1)L', iL')
};

/// Inner noise provider: (pass i, inner block j, partial M'_i) -> Omega x gamma'_j.
template <class T>
using InnerNoiseFn = std::function<Grid<T>(int, int, const Grid<T>&)>;

template <class T>
Layers<T> pscgen_with(const DerivedParams& d, const std::vector<T>& msg, const NoiseFn<T>& outer_noise,
                      const InnerNoiseFn<T>& inner_noise) {
    const StaircaseProfile op = outer_profile(d);
    const StaircaseProfile ip = inner_profile(d);
    Layers<T> out;
    out.M1 = scgen_with<T>(msg, op, outer_noise);
    out.M2 = Grid<T>(ip.totalRows, static_cast<std::size_t>(d.P * d.Lp));
    for (int i = 1; i <= d.P; ++i) {
        const std::vector<T> w = reencode_input(d, op, out.M1, i);
        Grid<T> mi = scgen_with<T>(w, ip, [&](int j, const Grid<T>& part) { return inner_noise(i, j, part); });
        const long long off = (i - 1) * d.Lp;
        for (std::size_t r = 0; r < mi.rows(); ++r)
            for (std::size_t c = 0; c < mi.cols(); ++c) out.M2.at(r, off + c) = std::move(mi.at(r, c));
    }
    return out;
}

/// Noise of one storage generation: Omega x gamma_i per outer block, then
/// Omega x gamma'_j per (pass i, inner block j).
struct NoiseSet {
    std::vector<FieldMatrix> outer;               // outer[i-1]
    std::vector<std::vector<FieldMatrix>> inner;  // inner[i-1][j-1]

    /// Total number of noise symbols for d.
    static long long dimension(const DerivedParams& d) { return d.Omega * (d.m1_cols() + d.m2_cols()); }

    /// Splits a flat symbol vector in the canonical order (outer blocks, then passes,
    /// inner blocks, each block row-major).
    static NoiseSet from_flat(const DerivedParams& d, const std::vector<Symbol>& z) {
        if (static_cast<long long>(z.size()) != dimension(d))
            throw Error(ErrorCode::ShapeMismatch, "noise vector has " + std::to_string(z.size()) + " symbols, need " +
                                                      std::to_string(dimension(d)));
        NoiseSet n;
        std::size_t pos = 0;
        auto take = [&](long long cols) {
            FieldMatrix m(d.Omega, cols, d.q);
            for (auto& s : m.data()) s = z[pos++];
            return m;
        };
        for (int i = 1; i <= d.G1; ++i) n.outer.push_back(take(d.gamma[i]));
        for (int i = 1; i <= d.P; ++i) {
            n.inner.emplace_back();
            for (int j = 1; j <= d.G2; ++j) n.inner.back().push_back(take(d.gammap[j]));
        }
        return n;
    }

    std::vector<Symbol> flat() const {
        std::vector<Symbol> z;
        for (const auto& m : outer) z.insert(z.end(), m.data().begin(), m.data().end());
        for (const auto& g : inner)
            for (const auto& m : g) z.insert(z.end(), m.data().begin(), m.data().end());
        return z;
    }
};

struct StaircasePair {
    FieldMatrix M1;
    FieldMatrix M2;
    std::vector<std::vector<RowKind>> outerMeta;  // per outer block
    std::vector<std::vector<RowKind>> innerMeta;  // per inner block, shared by all passes
};

inline StaircasePair pscgen(const DerivedParams& d, const std::vector<Symbol>& msg, const NoiseSet& noise) {
    if (static_cast<int>(noise.outer.size()) != d.G1 || static_cast<int>(noise.inner.size()) != d.P)
        throw Error(ErrorCode::ShapeMismatch, "pscgen: noise block counts do not match parameters");
    for (const auto& g : noise.inner)
        if (static_cast<int>(g.size()) != d.G2) throw Error(ErrorCode::ShapeMismatch, "pscgen: inner noise count");
    auto layers = pscgen_with<Symbol>(
        d, msg, [&](int i, const Grid<Symbol>&) -> Grid<Symbol> { return noise.outer[i - 1]; },
        [&](int i, int j, const Grid<Symbol>&) -> Grid<Symbol> { return noise.inner[i - 1][j - 1]; });
    StaircasePair pair{FieldMatrix(std::move(layers.M1), d.q), FieldMatrix(std::move(layers.M2), d.q), {}, {}};
    const auto op = outer_profile(d);
    const auto ip = inner_profile(d);
    for (int i = 1; i <= op.G(); ++i) pair.outerMeta.push_back(row_kinds(op, i));
    for (int j = 1; j <= ip.G(); ++j) pair.innerMeta.push_back(row_kinds(ip, j));
    return pair;
}

/// Columns [off, off+w) of M2 belonging to pass i.
inline FieldMatrix inner_group(const DerivedParams& d, const FieldMatrix& m2, int i) {
    return column_slice(m2, (i - 1) * d.Lp, i * d.Lp);
}

} // namespace rdcds

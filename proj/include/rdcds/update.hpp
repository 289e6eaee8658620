#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdcds/linear_form.hpp"
#include "rdcds/storage.hpp"

namespace rdcds {

struct UpdatePlan {
    DropoutSet D;
    int X = 0;
    OpCase kase = OpCase::Case1;
    int d1 = 0;
    int d2 = 0;
    int threshold = 0;
    int g1tRaw = 0, g1t = 0;  // case 1: outer blocks carrying noise
    int pt = 0;               // case 2: re-encoding passes carrying noise
    int g2tRaw = 0, g2t = 0;  // case 2: inner blocks carrying noise
    bool clampFlag = false;
    std::vector<int> available;

    /// Outer blocks whose noise is fresh (all blocks in case 2).
    int outer_noisy_blocks(const DerivedParams& d) const { return kase == OpCase::Case1 ? g1t : d.G1; }
    /// Leading s1 symbols every available server receives.
    long long q1_cols(const DerivedParams& d) const { return d.lambda[outer_noisy_blocks(d)]; }
    /// Leading symbols of each of the first pt inner groups (case 2).
    long long q2_cols_per_group(const DerivedParams& d) const {
        return kase == OpCase::Case2 ? d.lambdap[g2t] : 0;
    }
    /// Number of fresh uniform symbols the encoder draws.
    long long noise_dim(const DerivedParams& d) const {
        return static_cast<long long>(X) * (q1_cols(d) + pt * q2_cols_per_group(d));
    }

    bool operator==(const UpdatePlan&) const = default;
};

inline UpdatePlan plan_update(const DerivedParams& d, const DropoutSet& D, int X) {
    UpdatePlan p;
    p.kase = update_case(d.params, D, X);
    p.D = D;
    p.X = X;
    p.threshold = update_threshold(d.params, X);
    p.d1 = D.count_unconstrained(d.S());
    p.d2 = D.count_constrained(d.S());
    p.available = D.available(d.N());
    if (p.kase == OpCase::Case1) {
        p.g1tRaw = d.alpha[1] + 1 - d.Rr() + D.size() + X;
        p.g1t = std::max(1, p.g1tRaw);
        p.clampFlag = p.g1tRaw < 1;
        if (p.g1t > d.G1) throw Error(ErrorCode::ShapeMismatch, "update plan: G1(t) exceeds G1");
    } else {
        p.pt = D.size() + X + d.Kc() - d.Rr();
        p.g2tRaw = d.N() - d.Rr() - d.Omega + 1 + p.d1 + X;
        p.g2t = std::max(1, p.g2tRaw);
        p.clampFlag = p.g2tRaw < 1;
        if (p.pt < 1 || p.pt > d.P || p.g2t > d.G2)
            throw Error(ErrorCode::ShapeMismatch, "update plan: P(t)/G2(t) out of range");
    }
    return p;
}

template <class T>
struct Increment {
    Layers<T> M;                                // M1-dot, M2-dot
    std::vector<Grid<T>> outerNoise;            // Z-dot_i, Omega x gamma_i
    std::vector<std::vector<Grid<T>>> innerNoise;  // Z-dot_{i,j}, Omega x gamma'_j
};

namespace detail {

/// [Zdd; H; 0] for one block: H is chosen so that servers in `cancel` see zero on this
/// block, i.e. C(cancel, [beta]) * block = 0, given the block's message rows already in `part`.
template <class Ops>
Grid<typename Ops::value_type> cancelling_noise(const Ops& ops, const CauchyCode& code, const std::vector<int>& cancel,
                                                const Grid<typename Ops::value_type>& part, long long off,
                                                const BlockShape& b, int omega, int X,
                                                const typename Ops::value_type* zdd) {
    using T = typename Ops::value_type;
    const int nd = static_cast<int>(cancel.size());
    Grid<T> z(omega, b.gamma, ops.zero());
    for (int r = 0; r < X; ++r)
        for (long long c = 0; c < b.gamma; ++c) z.at(r, c) = zdd[r * b.gamma + c];
    if (nd == 0) return z;

    std::vector<int> hcols;
    for (int k = 1; k <= nd; ++k) hcols.push_back(b.alpha + X + k);
    FieldMatrix neg_inv = mat_inverse(code.sub(cancel, hcols));
    const Field f(code.C.modulus());
    for (auto& v : neg_inv.data()) v = f.neg(v);

    // rhs(k, c) = C(cancel_k, [alpha]) msg(:, c) + C(cancel_k, [alpha+1 : alpha+X]) Zdd(:, c)
    Grid<T> rhs(nd, b.gamma, ops.zero());
    for (int k = 0; k < nd; ++k) {
        const int n = cancel[k];
        for (int r = 1; r <= b.alpha; ++r) {
            const Symbol cr = code.C.at(n - 1, r - 1);
            for (long long c = 0; c < b.gamma; ++c) ops.axpy(rhs.at(k, c), cr, part.at(r - 1, off + c));
        }
        for (int r = 1; r <= X; ++r) {
            const Symbol cr = code.C.at(n - 1, b.alpha + r - 1);
            for (long long c = 0; c < b.gamma; ++c) ops.axpy(rhs.at(k, c), cr, z.at(r - 1, c));
        }
    }
    for (int h = 0; h < nd; ++h)
        for (int k = 0; k < nd; ++k) {
            const Symbol m = neg_inv.at(h, k);
            for (long long c = 0; c < b.gamma; ++c) ops.axpy(z.at(X + h, c), m, rhs.at(k, c));
        }
    return z;
}

} // namespace detail

/// Builds M1-dot, M2-dot from the increment and the fresh noise `zdd` (length
/// plan.noise_dim, order: outer noisy blocks, then (pass i <= pt, inner block j <= g2t),
/// each X x gamma row-major). Generic over the scalar policy so the same code runs on
/// field values and on symbolic linear forms.
template <class Ops>
Increment<typename Ops::value_type> build_increment(const Ops& ops, const Scheme& sc, const UpdatePlan& plan,
                                                    const std::vector<typename Ops::value_type>& delta,
                                                    const std::vector<typename Ops::value_type>& zdd) {
    using T = typename Ops::value_type;
    const auto& d = sc.d;
    if (static_cast<long long>(delta.size()) != d.L) throw Error(ErrorCode::ShapeMismatch, "increment length != L");
    if (static_cast<long long>(zdd.size()) != plan.noise_dim(d))
        throw Error(ErrorCode::ShapeMismatch, "update noise length mismatch");

    std::vector<long long> outer_pos(d.G1 + 2, 0);
    for (int i = 1; i <= d.G1; ++i)
        outer_pos[i + 1] = outer_pos[i] + (i <= plan.outer_noisy_blocks(d) ? plan.X * d.gamma[i] : 0);
    long long inner_base = outer_pos[d.G1 + 1];
    auto inner_pos = [&](int i, int j) {
        long long p = inner_base + (i - 1) * plan.X * d.lambdap[plan.g2t];
        for (int k = 1; k < j; ++k) p += plan.X * d.gammap[k];
        return p;
    };

    std::vector<int> outer_cancel = plan.D.servers();
    std::vector<int> inner_cancel;
    for (int n : plan.D.servers())
        if (n > d.S()) inner_cancel.push_back(n);

    Increment<T> inc;
    inc.outerNoise.resize(d.G1);
    inc.innerNoise.assign(d.P, std::vector<Grid<T>>(d.G2));
    const T* zp = zdd.data();

    auto outer_fn = [&](int i, const Grid<T>& part) -> Grid<T> {
        const auto& b = sc.outer.block(i);
        Grid<T> z = i <= plan.outer_noisy_blocks(d)
                        ? detail::cancelling_noise(ops, sc.code, outer_cancel, part, sc.outer.offset(i - 1), b,
                                                   d.Omega, plan.X, zp + outer_pos[i])
                        : Grid<T>(d.Omega, b.gamma, ops.zero());
        inc.outerNoise[i - 1] = z;
        return z;
    };
    // Union rule: inner noise vanishes as soon as i > P(t) or j > G2(t).
    auto inner_fn = [&](int i, int j, const Grid<T>& part) -> Grid<T> {
        const auto& b = sc.inner.block(j);
        const bool live = plan.kase == OpCase::Case2 && i <= plan.pt && j <= plan.g2t;
        Grid<T> z = live ? detail::cancelling_noise(ops, sc.code, inner_cancel, part, sc.inner.offset(j - 1), b,
                                                    d.Omega, plan.X, zp + inner_pos(i, j))
                         : Grid<T>(d.Omega, b.gamma, ops.zero());
        inc.innerNoise[i - 1][j - 1] = z;
        return z;
    };
    inc.M = pscgen_with<T>(d, delta, outer_fn, inner_fn);
    return inc;
}

/// Q_{1,n}: leading q1_cols symbols of C(n,:) M1-dot.
template <class Ops>
std::vector<typename Ops::value_type> upload_q1(const Ops& ops, const Scheme& sc, const UpdatePlan& plan,
                                                const Layers<typename Ops::value_type>& M, int n) {
    return combine_rows(ops, sc.outer_row(n), M.M1, 0, plan.q1_cols(sc.d));
}

/// Q_{2,n}: leading q2_cols_per_group symbols of each of the first pt groups of C(n,[N-S]) M2-dot.
template <class Ops>
std::vector<typename Ops::value_type> upload_q2(const Ops& ops, const Scheme& sc, const UpdatePlan& plan,
                                                const Layers<typename Ops::value_type>& M, int n) {
    std::vector<typename Ops::value_type> out;
    if (plan.kase != OpCase::Case2 || n <= sc.d.S()) return out;
    const long long w = plan.q2_cols_per_group(sc.d);
    for (int i = 1; i <= plan.pt; ++i) {
        const long long off = (i - 1) * sc.d.Lp;
        auto part = combine_rows(ops, sc.inner_row(n), M.M2, off, off + w);
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return out;
}

struct ServerUpload {
    int n = 0;
    std::vector<Symbol> Q1;
    std::vector<Symbol> Q2;

    std::size_t size() const { return Q1.size() + Q2.size(); }
};

struct UpdateTranscript {
    UpdatePlan plan;
    std::vector<ServerUpload> uploads;  // available servers, ascending n
    long long L = 0;
    // Oracle side, never sent to servers.
    std::vector<Symbol> delta;
    std::vector<Symbol> zdd;
    NoiseSet zdot;
    FieldMatrix M1dot, M2dot;
};

inline UpdateTranscript encode_increment(const Scheme& sc, const UpdatePlan& plan, const std::vector<Symbol>& delta,
                                         const std::vector<Symbol>& zdd) {
    const auto& d = sc.d;
    for (Symbol s : delta)
        if (s >= d.q) throw Error(ErrorCode::InvalidParams, "increment symbol outside the field");
    const FieldOps ops(d.q);
    Increment<Symbol> inc = build_increment(ops, sc, plan, delta, zdd);
    UpdateTranscript tr;
    tr.plan = plan;
    tr.L = d.L;
    tr.delta = delta;
    tr.zdd = zdd;
    for (auto& g : inc.outerNoise) tr.zdot.outer.emplace_back(std::move(g), d.q);
    for (auto& grp : inc.innerNoise) {
        tr.zdot.inner.emplace_back();
        for (auto& g : grp) tr.zdot.inner.back().emplace_back(std::move(g), d.q);
    }
    for (int n : plan.available)
        tr.uploads.push_back({n, upload_q1(ops, sc, plan, inc.M, n), upload_q2(ops, sc, plan, inc.M, n)});
    tr.M1dot = FieldMatrix(std::move(inc.M.M1), d.q);
    tr.M2dot = FieldMatrix(std::move(inc.M.M2), d.q);
    return tr;
}

/// Draws the fresh noise uniformly, independent of the increment and of any storage.
inline UpdateTranscript encode_increment(const Scheme& sc, const UpdatePlan& plan, const std::vector<Symbol>& delta,
                                         Rng& rng) {
    return encode_increment(sc, plan, delta, rng.symbols(static_cast<std::size_t>(plan.noise_dim(sc.d)), sc.q()));
}

inline Rational update_cost(const UpdateTranscript& tr) {
    long long total = 0;
    for (const auto& u : tr.uploads) total += static_cast<long long>(u.size());
    return Rational(total, tr.L);
}

/// S_n += Q_n positionally for available servers; dropouts untouched; oracle advances.
inline void apply_update(ClusterState& c, const UpdateTranscript& tr) {
    const auto& d = c.d();
    if (tr.L != d.L || static_cast<long long>(tr.delta.size()) != d.L)
        throw Error(ErrorCode::ShapeMismatch, "transcript does not match cluster parameters");
    const Field f(d.q);
    const long long w2 = tr.plan.q2_cols_per_group(d);
    for (const auto& u : tr.uploads) {
        if (tr.plan.D.contains(u.n)) throw Error(ErrorCode::ShapeMismatch, "upload addressed to a dropout server");
        ServerStorage& s = c.servers.at(u.n - 1);
        if (u.Q1.size() > s.s1.size()) throw Error(ErrorCode::ShapeMismatch, "Q1 longer than s1");
        for (std::size_t k = 0; k < u.Q1.size(); ++k) s.s1[k] = f.add(s.s1[k], u.Q1[k]);
        if (u.Q2.empty()) continue;
        if (!s.s2 || static_cast<long long>(u.Q2.size()) != tr.plan.pt * w2)
            throw Error(ErrorCode::ShapeMismatch, "Q2 does not fit s2 of server " + std::to_string(u.n));
        for (int i = 0; i < tr.plan.pt; ++i)
            for (long long k = 0; k < w2; ++k) {
                Symbol& dst = (*s.s2)[i * d.Lp + k];
                dst = f.add(dst, u.Q2[i * w2 + k]);
            }
    }
    for (long long k = 0; k < d.L; ++k) c.referenceMessage[k] = f.add(c.referenceMessage[k], tr.delta[k]);
    for (int i = 0; i < d.G1; ++i) c.noise.outer[i] = add(c.noise.outer[i], tr.zdot.outer[i]);
    for (int i = 0; i < d.P; ++i)
        for (int j = 0; j < d.G2; ++j) c.noise.inner[i][j] = add(c.noise.inner[i][j], tr.zdot.inner[i][j]);
    c.t += 1;
}

inline nlohmann::json to_json(const UpdateTranscript& tr) {
    nlohmann::json servers = nlohmann::json::array();
    for (const auto& u : tr.uploads)
        servers.push_back({{"n", u.n}, {"q1", u.Q1.size()}, {"q2", u.Q2.size()}, {"total", u.size()}});
    return {{"dropouts", tr.plan.D.servers()}, {"X", tr.plan.X},
            {"case", to_string(tr.plan.kase)},   {"servers", std::move(servers)},
            {"cost", update_cost(tr).fraction()}, {"clampFlag", tr.plan.clampFlag}};
}

} // namespace rdcds

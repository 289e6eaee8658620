#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rdcds/combinatorics.hpp"
#include "rdcds/linear_form.hpp"
#include "rdcds/read.hpp"
#include "rdcds/update.hpp"

namespace rdcds {

struct CheckResult {
    bool ok = true;
    std::string diagnostic;  // first violated identity, empty when ok

    explicit operator bool() const { return ok; }
    static CheckResult fail(std::string why) { return {false, std::move(why)}; }
};

namespace detail {

inline std::string where(const char* what, int block, int row, long long col) {
    return std::string(what) + " block " + std::to_string(block) + " row " + std::to_string(row) + " col " +
           std::to_string(col);
}

inline CheckResult check_one_staircase(const StaircaseProfile& p, const Grid<Symbol>& m, long long colOff,
                                       const char* label) {
    for (int i = 1; i <= p.G(); ++i) {
        const auto& b = p.block(i);
        const long long off = colOff + p.offset(i - 1);
        for (int r = b.beta + 1; r <= p.totalRows; ++r)
            for (long long c = 0; c < b.gamma; ++c)
                if (m.at(r - 1, off + c) != 0) return CheckResult::fail(where(label, i, r, c) + ": expected zero");
        if (i == 1) continue;
        for (int r = 1; r <= b.alpha; ++r)
            for (long long c = 0; c < b.gamma; ++c) {
                const EntrySource s = replica_source(p, i, r, c);
                if (m.at(r - 1, off + c) != m.at(s.row - 1, colOff + p.offset(s.block - 1) + s.col))
                    return CheckResult::fail(where(label, i, r, c) + ": replica differs from block " +
                                             std::to_string(s.block) + " row " + std::to_string(s.row));
            }
    }
    return {};
}

} // namespace detail

/// Shapes, replication identities, zero patterns, and the re-encoding link between M1 and M2.
inline CheckResult check_staircase(const DerivedParams& d, const StaircasePair& pair) {
    const auto op = outer_profile(d);
    const auto ip = inner_profile(d);
    if (static_cast<int>(pair.M1.rows()) != d.beta1 || static_cast<long long>(pair.M1.cols()) != d.m1_cols())
        return CheckResult::fail("M1 shape");
    if (static_cast<int>(pair.M2.rows()) != d.N() - d.S() || static_cast<long long>(pair.M2.cols()) != d.m2_cols())
        return CheckResult::fail("M2 shape");
    if (d.m1_cols() * d.Kc() != d.L) return CheckResult::fail("M1 width is not L/K_c");
    if (auto r = detail::check_one_staircase(op, pair.M1, 0, "outer"); !r) return r;
    for (int i = 1; i <= d.P; ++i) {
        const long long goff = (i - 1) * d.Lp;
        const std::string label = "inner group " + std::to_string(i);
        if (auto r = detail::check_one_staircase(ip, pair.M2, goff, label.c_str()); !r) return r;
        const std::vector<Symbol> w = reencode_input(d, op, static_cast<const Grid<Symbol>&>(pair.M1), i);
        for (long long k = 0; k < d.Lp; ++k) {
            const long long r = k / d.gammap[1], c = k % d.gammap[1];
            if (pair.M2.at(r, goff + c) != w[k])
                return CheckResult::fail(label + ": message entry " + std::to_string(k) +
                                         " differs from re-encoded outer row");
        }
    }
    if (static_cast<int>(pair.outerMeta.size()) != d.G1 || static_cast<int>(pair.innerMeta.size()) != d.G2)
        return CheckResult::fail("row metadata block count");
    return {};
}

/// Increment support: Case 1 leaves M1-dot zero beyond lambda_{G1(t)} and M2-dot zero;
/// Case 2 leaves passes beyond P(t) and inner columns beyond lambda'_{G2(t)} zero.
inline CheckResult check_increment_support(const DerivedParams& d, const UpdateTranscript& tr) {
    const auto& p = tr.plan;
    const long long w1 = p.q1_cols(d);
    for (std::size_t r = 0; r < tr.M1dot.rows(); ++r)
        for (long long c = w1; c < static_cast<long long>(tr.M1dot.cols()); ++c)
            if (tr.M1dot.at(r, c) != 0) return CheckResult::fail("M1-dot nonzero beyond uploaded columns");
    const long long w2 = p.q2_cols_per_group(d);
    for (int i = 1; i <= d.P; ++i)
        for (std::size_t r = 0; r < tr.M2dot.rows(); ++r)
            for (long long c = 0; c < d.Lp; ++c) {
                const bool uploaded = i <= p.pt && c < w2;
                if (!uploaded && tr.M2dot.at(r, (i - 1) * d.Lp + c) != 0)
                    return CheckResult::fail("M2-dot nonzero outside uploaded columns (group " + std::to_string(i) +
                                             ")");
            }
    return {};
}

/// Dropout servers would receive exactly zero: C(n,:) M1-dot = 0 for n in D and
/// C(n,[N-S]) M2-dot = 0 for n in D1.
inline CheckResult check_dropout_cancellation(const Scheme& sc, const UpdateTranscript& tr) {
    const FieldOps ops(sc.q());
    for (int n : tr.plan.D.servers()) {
        auto v = combine_rows(ops, sc.outer_row(n), tr.M1dot, 0, tr.M1dot.cols());
        for (Symbol s : v)
            if (s) return CheckResult::fail("dropout server " + std::to_string(n) + " sees nonzero M1-dot");
        if (n > sc.d.S()) {
            auto u = combine_rows(ops, sc.inner_row(n), tr.M2dot, 0, tr.M2dot.cols());
            for (Symbol s : u)
                if (s) return CheckResult::fail("dropout server " + std::to_string(n) + " sees nonzero M2-dot");
        }
    }
    return {};
}

/// Storage equals the encoding of the oracle's message and accumulated noise.
inline CheckResult check_structure(const ClusterState& c) {
    const auto pair = oracle_pair(c);
    if (auto r = check_staircase(c.d(), pair); !r) return r;
    const auto expect = encode_storage(*c.scheme, pair);
    for (int n = 1; n <= c.d().N(); ++n)
        if (!(expect[n - 1] == c.servers[n - 1]))
            return CheckResult::fail("server " + std::to_string(n) + " storage differs from re-encoded oracle");
    return {};
}

struct RecoverabilityReport {
    long long checked = 0;
    bool ok = true;
    std::vector<int> failing;  // first R that failed to decode
};

/// Decodes from every R_r-subset (N <= 8) or from `samples` seeded random ones.
inline RecoverabilityReport check_recoverability(const ClusterState& c, std::uint64_t seed = 0, int samples = 200) {
    const auto& d = c.d();
    RecoverabilityReport rep;
    std::vector<int> all(d.N());
    std::iota(all.begin(), all.end(), 1);
    auto try_set = [&](const std::vector<int>& R) {
        std::vector<int> drop;
        std::set_difference(all.begin(), all.end(), R.begin(), R.end(), std::back_inserter(drop));
        ++rep.checked;
        bool good = false;
        try {
            good = read_message(c, DropoutSet(drop, d.N())) == c.referenceMessage;
        } catch (const Error&) {
            good = false;
        }
        if (!good && rep.ok) {
            rep.ok = false;
            rep.failing = R;
        }
    };
    if (d.N() <= 8) {
        for_each_subset(all, d.Rr(), try_set);
    } else {
        Rng rng(seed, 0x5eed);
        for (int s = 0; s < samples; ++s) {
            std::vector<int> perm = all;
            std::shuffle(perm.begin(), perm.end(), rng.engine());
            std::vector<int> R(perm.begin(), perm.begin() + d.Rr());
            std::sort(R.begin(), R.end());
            try_set(R);
        }
    }
    return rep;
}

/// Increment-to-observation map for a set of servers: obs = A * delta + B * zdd. Variables
/// 0..L-1 are delta, L..L+noiseDim-1 the fresh update noise.
struct LinearizedEncoder {
    std::vector<int> servers;
    std::vector<LinearForm> obs;
    long long L = 0;
    long long noiseDim = 0;
    std::uint32_t q = 2;

    FieldMatrix A() const { return dense(0, L); }
    FieldMatrix B() const { return dense(L, L + noiseDim); }

private:
    FieldMatrix dense(long long v0, long long v1) const {
        FieldMatrix m(obs.size(), v1 - v0, q);
        for (std::size_t r = 0; r < obs.size(); ++r)
            for (const auto& [v, c] : obs[r].terms())
                if (v >= v0 && v < v1) m.at(r, v - v0) = c;
        return m;
    }
};

/// Runs the update encoder once on symbolic inputs and caches every available server's
/// coded increment as linear forms.
class SymbolicUpdate {
public:
    SymbolicUpdate(const Scheme& sc, const UpdatePlan& plan) : sc_(&sc), plan_(plan), ops_(sc.q()) {
        const auto& d = sc.d;
        L_ = d.L;
        noise_ = plan.noise_dim(d);
        std::vector<LinearForm> delta, zdd;
        for (long long k = 0; k < L_; ++k) delta.push_back(LinearForm::var(static_cast<std::uint32_t>(k)));
        for (long long k = 0; k < noise_; ++k) zdd.push_back(LinearForm::var(static_cast<std::uint32_t>(L_ + k)));
        inc_ = build_increment(ops_, sc, plan, delta, zdd);
    }

    const std::vector<LinearForm>& server(int n) {
        auto it = cache_.find(n);
        if (it != cache_.end()) return it->second;
        std::vector<LinearForm> v = upload_q1(ops_, *sc_, plan_, inc_.M, n);
        auto v2 = upload_q2(ops_, *sc_, plan_, inc_.M, n);
        std::move(v2.begin(), v2.end(), std::back_inserter(v));
        return cache_.emplace(n, std::move(v)).first->second;
    }

    LinearizedEncoder linearize(const std::vector<int>& servers) {
        LinearizedEncoder e;
        e.servers = servers;
        e.L = L_;
        e.noiseDim = noise_;
        e.q = sc_->q();
        for (int n : servers) {
            const auto& v = server(n);
            e.obs.insert(e.obs.end(), v.begin(), v.end());
        }
        return e;
    }

    long long L() const { return L_; }
    long long noise_dim() const { return noise_; }
    const Increment<LinearForm>& increment() const { return inc_; }

private:
    const Scheme* sc_;
    UpdatePlan plan_;
    FormOps ops_;
    long long L_ = 0;
    long long noise_ = 0;
    Increment<LinearForm> inc_;
    std::map<int, std::vector<LinearForm>> cache_;
};

inline LinearizedEncoder linearize(const Scheme& sc, const UpdatePlan& plan, const std::vector<int>& servers) {
    SymbolicUpdate su(sc, plan);
    return su.linearize(servers);
}

/// Row echelon over linear forms with the highest variable as pivot. Since noise variables
/// are numbered above all delta variables, a pivot below L means some combination of the
/// observations depends on delta alone.
class FormEchelon {
public:
    FormEchelon(std::uint32_t q, long long L) : ops_(q), L_(L) {}

    /// Adds a form; returns its new pivot variable, or -1 if it was dependent.
    long long add(LinearForm f) {
        const Field& fld = ops_.f;
        while (!f.empty()) {
            const auto [lead, coeff] = f.terms().back();
            auto it = pivots_.find(lead);
            if (it == pivots_.end()) {
                const Symbol s = fld.inv(coeff);
                for (auto& t : f.terms()) t.second = fld.mul(t.second, s);
                pivots_.emplace(lead, std::move(f));
                if (static_cast<long long>(lead) < L_) ++deltaPivots_;
                return lead;
            }
            ops_.axpy(f, fld.neg(coeff), it->second);
        }
        return -1;
    }

    long long rank() const { return static_cast<long long>(pivots_.size()); }
    /// rank([A|B]) - rank(B): symbols of information about delta in the observations.
    long long delta_rank() const { return deltaPivots_; }

private:
    FormOps ops_;
    long long L_;
    std::unordered_map<std::uint32_t, LinearForm> pivots_;
    long long deltaPivots_ = 0;
};

/// rank([A|B]) - rank(B) for the stacked observations.
inline long long delta_information(const LinearizedEncoder& e) {
    FormEchelon ech(e.q, e.L);
    for (const auto& f : e.obs) ech.add(f);
    return ech.delta_rank();
}

/// True iff rank(B) = rank([A | B]): the observed coded increments are independent of delta.
inline bool check_x_security(const LinearizedEncoder& e) {
    FormEchelon ech(e.q, e.L);
    for (const auto& f : e.obs)
        if (ech.add(f) >= 0 && ech.delta_rank() > 0) return false;
    return true;
}

inline bool check_x_security(const Scheme& sc, const UpdatePlan& plan, const std::vector<int>& colluders) {
    return check_x_security(linearize(sc, plan, colluders));
}

/// Negative control: the same observations with the update noise forced to zero.
inline LinearizedEncoder without_noise(LinearizedEncoder e) {
    for (auto& f : e.obs) {
        auto& t = f.terms();
        t.erase(std::remove_if(t.begin(), t.end(), [&](const auto& x) { return static_cast<long long>(x.first) >= e.L; }),
                t.end());
    }
    e.noiseDim = 0;
    return e;
}

/// Rebuilds delta from the coded increments of R alone (|R| = R_r-|D|), using the fact
/// that dropout servers' increments are identically zero: the servers of R and D form
/// an R_r-set of virtual storage that the read decoder accepts.
inline std::vector<Symbol> reconstruct_increment(const Scheme& sc, const UpdateTranscript& tr,
                                                 const std::vector<int>& R) {
    const auto& d = sc.d;
    const auto& p = tr.plan;
    if (static_cast<int>(R.size()) != d.Rr() - p.D.size())
        throw Error(ErrorCode::ShapeMismatch, "reconstruct: |R| must be R_r - |D|");
    std::vector<ServerStorage> virt(d.N());
    for (int n = 1; n <= d.N(); ++n) {
        virt[n - 1].n = n;
        virt[n - 1].s1.assign(d.m1_cols(), 0);
        if (n > d.S()) virt[n - 1].s2 = std::vector<Symbol>(d.m2_cols(), 0);
    }
    const long long w2 = p.q2_cols_per_group(d);
    for (int n : R) {
        auto it = std::find_if(tr.uploads.begin(), tr.uploads.end(), [n](const ServerUpload& u) { return u.n == n; });
        if (it == tr.uploads.end()) throw Error(ErrorCode::ShapeMismatch, "reconstruct: server not in transcript");
        std::copy(it->Q1.begin(), it->Q1.end(), virt[n - 1].s1.begin());
        for (int i = 0; i < p.pt && !it->Q2.empty(); ++i)
            std::copy(it->Q2.begin() + i * w2, it->Q2.begin() + (i + 1) * w2, virt[n - 1].s2->begin() + i * d.Lp);
    }
    std::vector<int> keep = R;
    keep.insert(keep.end(), p.D.servers().begin(), p.D.servers().end());
    std::sort(keep.begin(), keep.end());
    std::vector<int> drop;
    for (int n = 1; n <= d.N(); ++n)
        if (!std::binary_search(keep.begin(), keep.end(), n)) drop.push_back(n);
    const ReadPlan rp = plan_read(d, DropoutSet(drop, d.N()));
    return decode_read(sc, rp, execute_read(d, rp, virt));
}

} // namespace rdcds

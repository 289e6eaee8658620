#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rdcds/sic.hpp"
#include "rdcds/storage.hpp"

namespace rdcds {

struct ReadPlan {
    DropoutSet D;
    OpCase kase = OpCase::Case1;
    int d1 = 0;  // |D ∩ [S+1:N]|
    int d2 = 0;  // |D ∩ [S]|
    int J = 0;   // case 1
    int J1 = 0;  // case 2: re-encoding passes used
    int J2 = 0;  // case 2: inner blocks used per pass
    long long s1Cols = 0;          // leading s1 symbols requested from every available server
    std::vector<long long> mu;     // case 2: 0-based s2 positions requested from available n > S
    std::vector<int> available;

    bool operator==(const ReadPlan&) const = default;
};

inline ReadPlan plan_read(const DerivedParams& d, const DropoutSet& D) {
    ReadPlan p;
    p.kase = read_case(d.params, D);
    p.D = D;
    p.d1 = D.count_unconstrained(d.S());
    p.d2 = D.count_constrained(d.S());
    p.available = D.available(d.N());
    if (p.kase == OpCase::Case1) {
        p.J = D.size() + 1;
        p.s1Cols = d.lambda[p.J];
    } else {
        p.J1 = d.Kc() + d.Omega - d.N() + D.size();
        p.J2 = p.d1 + 1;
        if (p.J1 < 1 || p.J1 > d.P || p.J2 > d.G2)
            throw Error(ErrorCode::ShapeMismatch, "read plan indices out of range");
        p.s1Cols = d.m1_cols();
        for (int i = 0; i < p.J1; ++i)
            for (long long c = 0; c < d.lambdap[p.J2]; ++c) p.mu.push_back(i * d.lambdap[d.G2] + c);
    }
    return p;
}

struct ServerDownload {
    int n = 0;
    std::vector<Symbol> A1;
    std::vector<Symbol> A2;  // case 2, n > S only

    std::size_t size() const { return A1.size() + A2.size(); }
};

struct ReadTranscript {
    ReadPlan plan;
    std::vector<ServerDownload> downloads;  // one per available server, ascending n
    long long L = 0;
};

/// Pulls the planned sub-vectors out of server storage; storage is only read.
inline ReadTranscript execute_read(const DerivedParams& d, const ReadPlan& plan,
                                   std::span<const ServerStorage> servers) {
    if (static_cast<int>(servers.size()) != d.N()) throw Error(ErrorCode::ShapeMismatch, "read: server count");
    ReadTranscript tr;
    tr.plan = plan;
    tr.L = d.L;
    for (int n : plan.available) {
        const ServerStorage& s = servers[n - 1];
        if (static_cast<long long>(s.s1.size()) != d.m1_cols())
            throw Error(ErrorCode::ShapeMismatch, "read: server " + std::to_string(n) + " s1 length");
        ServerDownload dl;
        dl.n = n;
        dl.A1.assign(s.s1.begin(), s.s1.begin() + plan.s1Cols);
        if (plan.kase == OpCase::Case2 && n > d.S()) {
            if (!s.s2 || static_cast<long long>(s.s2->size()) != d.m2_cols())
                throw Error(ErrorCode::ShapeMismatch, "read: server " + std::to_string(n) + " s2 length");
            for (long long c : plan.mu) dl.A2.push_back((*s.s2)[c]);
        }
        tr.downloads.push_back(std::move(dl));
    }
    return tr;
}

inline ReadTranscript execute_read(const ClusterState& c, const ReadPlan& plan) {
    return execute_read(c.d(), plan, c.servers);
}

inline Rational read_cost(const ReadTranscript& tr) {
    long long total = 0;
    for (const auto& dl : tr.downloads) total += static_cast<long long>(dl.size());
    return Rational(total, tr.L);
}

struct ReadTrace {
    SicTrace outer;
    std::vector<SicTrace> inner;  // one per re-encoding pass
};

inline std::vector<Symbol> decode_case1(const Scheme& sc, const ReadPlan& plan, const ReadTranscript& tr,
                                        ReadTrace* trace = nullptr) {
    const auto& op = sc.outer;
    std::vector<int> servers;
    FieldMatrix obs(tr.downloads.size(), op.offset(plan.J), sc.q());
    for (std::size_t k = 0; k < tr.downloads.size(); ++k) {
        const auto& dl = tr.downloads[k];
        if (static_cast<long long>(dl.A1.size()) != op.offset(plan.J))
            throw Error(ErrorCode::ShapeMismatch, "case-1 download length");
        servers.push_back(dl.n);
        std::copy(dl.A1.begin(), dl.A1.end(), obs.row(k).begin());
    }
    SicState st(op, plan.J, sc.q());
    sic_decode(op, plan.J, sc.code, servers, obs, st, trace ? &trace->outer : nullptr);
    return block1_message(op, st.m);
}

inline std::vector<Symbol> decode_case2(const Scheme& sc, const ReadPlan& plan, const ReadTranscript& tr,
                                        ReadTrace* trace = nullptr) {
    const auto& d = sc.d;
    const auto& op = sc.outer;
    const auto& ip = sc.inner;
    const long long chunk = d.lambdap[plan.J2];

    std::vector<int> inner_servers;
    std::vector<const ServerDownload*> inner_dl;
    for (const auto& dl : tr.downloads)
        if (dl.n > d.S()) {
            inner_servers.push_back(dl.n);
            inner_dl.push_back(&dl);
            if (static_cast<long long>(dl.A2.size()) != plan.J1 * chunk)
                throw Error(ErrorCode::ShapeMismatch, "case-2 s2 download length");
        }

    SicState outer(op, d.G1, sc.q());
    if (trace) trace->inner.assign(plan.J1, {});
    for (int i = 1; i <= plan.J1; ++i) {
        FieldMatrix obs(inner_servers.size(), chunk, sc.q());
        for (std::size_t k = 0; k < inner_dl.size(); ++k)
            for (long long c = 0; c < chunk; ++c) obs.at(k, c) = inner_dl[k]->A2[(i - 1) * chunk + c];
        SicState st(ip, plan.J2, sc.q());
        sic_decode(ip, plan.J2, sc.code, inner_servers, obs, st, trace ? &trace->inner[i - 1] : nullptr);
        const std::vector<Symbol> w = block1_message(ip, st.m);
        for (int j = 1; j <= d.G1; ++j)
            outer.set_row(op, j, reencode_row(d, j, i), std::span<const Symbol>(w).subspan(op.offset(j - 1)));
    }

    std::vector<int> servers;
    FieldMatrix obs(tr.downloads.size(), op.width(), sc.q());
    for (std::size_t k = 0; k < tr.downloads.size(); ++k) {
        const auto& dl = tr.downloads[k];
        if (static_cast<long long>(dl.A1.size()) != op.width())
            throw Error(ErrorCode::ShapeMismatch, "case-2 s1 download length");
        servers.push_back(dl.n);
        std::copy(dl.A1.begin(), dl.A1.end(), obs.row(k).begin());
    }
    sic_decode(op, d.G1, sc.code, servers, obs, outer, trace ? &trace->outer : nullptr);
    return block1_message(op, outer.m);
}

inline std::vector<Symbol> decode_read(const Scheme& sc, const ReadPlan& plan, const ReadTranscript& tr,
                                       ReadTrace* trace = nullptr) {
    return plan.kase == OpCase::Case1 ? decode_case1(sc, plan, tr, trace) : decode_case2(sc, plan, tr, trace);
}

/// Plan, fetch and decode in one go.
inline std::vector<Symbol> read_message(const ClusterState& c, const DropoutSet& D) {
    const ReadPlan plan = plan_read(c.d(), D);
    return decode_read(*c.scheme, plan, execute_read(c, plan));
}

/// Sorted 0-based positions -> 1-based inclusive ranges [[a,b],...].
inline nlohmann::json index_ranges(const std::vector<long long>& idx) {
    nlohmann::json out = nlohmann::json::array();
    std::size_t k = 0;
    while (k < idx.size()) {
        std::size_t e = k;
        while (e + 1 < idx.size() && idx[e + 1] == idx[e] + 1) ++e;
        out.push_back({idx[k] + 1, idx[e] + 1});
        k = e + 1;
    }
    return out;
}

inline nlohmann::json to_json(const ReadTranscript& tr) {
    nlohmann::json servers = nlohmann::json::array();
    for (const auto& dl : tr.downloads) {
        nlohmann::json e{{"n", dl.n}};
        e["s1"] = dl.A1.empty() ? nlohmann::json::array() : nlohmann::json::array({{1, static_cast<long long>(dl.A1.size())}});
        e["s2"] = dl.A2.empty() ? nlohmann::json::array() : index_ranges(tr.plan.mu);
        servers.push_back(std::move(e));
    }
    return {{"dropouts", tr.plan.D.servers()},
            {"case", to_string(tr.plan.kase)},
            {"servers", std::move(servers)},
            {"cost", read_cost(tr).fraction()}};
}

} // namespace rdcds

#pragma once

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdcds/cauchy.hpp"
#include "rdcds/linear_form.hpp"
#include "rdcds/params.hpp"
#include "rdcds/random.hpp"
#include "rdcds/rational.hpp"
#include "rdcds/staircase.hpp"

namespace rdcds {

/// Everything fixed by the parameters: derived quantities, generator, staircase shapes.
struct Scheme {
    DerivedParams d;
    CauchyCode code;
    StaircaseProfile outer;
    StaircaseProfile inner;

    explicit Scheme(const SystemParams& p)
        : d(derive(p)), code(cauchy(d)), outer(outer_profile(d)), inner(inner_profile(d)) {}
    explicit Scheme(const DerivedParams& dp) : d(dp), code(cauchy(d)), outer(outer_profile(d)), inner(inner_profile(d)) {}

    std::uint32_t q() const { return d.q; }
    /// Coefficients of server n (1-based) against the outer rows.
    std::span<const Symbol> outer_row(int n) const { return code.row(n, d.beta1); }
    /// Coefficients of server n against the inner rows, C(n, [N-S]).
    std::span<const Symbol> inner_row(int n) const { return code.row(n, d.N() - d.S()); }
};

struct ServerStorage {
    int n = 0;
    std::vector<Symbol> s1;
    std::optional<std::vector<Symbol>> s2;  // present iff n > S

    std::size_t size() const { return s1.size() + (s2 ? s2->size() : 0); }
    bool operator==(const ServerStorage&) const = default;
};

/// Cluster at one time slot. referenceMessage and noise are the simulator's oracle view;
/// protocol code only ever receives `servers`.
struct ClusterState {
    std::shared_ptr<const Scheme> scheme;
    std::vector<ServerStorage> servers;  // servers[n-1]
    std::vector<Symbol> referenceMessage;
    NoiseSet noise;
    long long t = 0;

    const DerivedParams& d() const { return scheme->d; }
    const ServerStorage& server(int n) const { return servers.at(n - 1); }
};

/// S_{1,n} = C(n,:) M1 for every n, S_{2,n} = C(n,[N-S]) M2 for n > S.
inline std::vector<ServerStorage> encode_storage(const Scheme& sc, const StaircasePair& pair) {
    const FieldOps ops(sc.q());
    std::vector<ServerStorage> out;
    for (int n = 1; n <= sc.d.N(); ++n) {
        ServerStorage s;
        s.n = n;
        s.s1 = combine_rows(ops, sc.outer_row(n), pair.M1, 0, pair.M1.cols());
        if (n > sc.d.S()) s.s2 = combine_rows(ops, sc.inner_row(n), pair.M2, 0, pair.M2.cols());
        out.push_back(std::move(s));
    }
    return out;
}

inline ClusterState init_cluster(std::shared_ptr<const Scheme> sc, const std::vector<Symbol>& w0, NoiseSet noise) {
    const auto& d = sc->d;
    if (static_cast<long long>(w0.size()) != d.L)
        throw Error(ErrorCode::InvalidParams,
                    "initial message has " + std::to_string(w0.size()) + " symbols, L = " + std::to_string(d.L));
    for (Symbol s : w0)
        if (s >= d.q) throw Error(ErrorCode::InvalidParams, "message symbol outside the field");
    const StaircasePair pair = pscgen(d, w0, noise);
    ClusterState c;
    c.servers = encode_storage(*sc, pair);
    c.scheme = std::move(sc);
    c.referenceMessage = w0;
    c.noise = std::move(noise);
    c.t = 0;
    return c;
}

/// Samples all storage noise uniformly from rng.
inline ClusterState init_cluster(std::shared_ptr<const Scheme> sc, const std::vector<Symbol>& w0, Rng& rng) {
    const auto& d = sc->d;
    NoiseSet z = NoiseSet::from_flat(d, rng.symbols(static_cast<std::size_t>(NoiseSet::dimension(d)), d.q));
    return init_cluster(std::move(sc), w0, std::move(z));
}

inline ClusterState init_cluster(const SystemParams& p, const std::vector<Symbol>& w0, Rng& rng) {
    return init_cluster(std::make_shared<const Scheme>(p), w0, rng);
}

/// Regenerates M1, M2 from the oracle view (message + accumulated noise).
inline StaircasePair oracle_pair(const ClusterState& c) { return pscgen(c.d(), c.referenceMessage, c.noise); }

inline Rational storage_fraction(const ClusterState& c, int n) {
    if (n < 1 || n > c.d().N()) throw Error(ErrorCode::InvalidParams, "server index out of range");
    return Rational(static_cast<long>(c.server(n).size()), static_cast<long>(c.d().L));
}

inline std::string hex_symbol(Symbol s) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%x", s);
    return buf;
}

inline nlohmann::json params_json(const SystemParams& p, std::uint32_t q) {
    return {{"N", p.N}, {"R_r", p.Rr}, {"K_c", p.Kc}, {"S", p.S}, {"q", q}};
}

/// {params, t, servers: [{n, s1: [hex...], s2: [hex...]}]}
inline nlohmann::json snapshot_json(const ClusterState& c) {
    nlohmann::json servers = nlohmann::json::array();
    for (const auto& s : c.servers) {
        nlohmann::json e{{"n", s.n}};
        nlohmann::json a = nlohmann::json::array();
        for (Symbol v : s.s1) a.push_back(hex_symbol(v));
        e["s1"] = std::move(a);
        if (s.s2) {
            nlohmann::json b = nlohmann::json::array();
            for (Symbol v : *s.s2) b.push_back(hex_symbol(v));
            e["s2"] = std::move(b);
        }
        servers.push_back(std::move(e));
    }
    return {{"params", params_json(c.d().params, c.d().q)}, {"t", c.t}, {"servers", std::move(servers)}};
}

} // namespace rdcds

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "rdcds/error.hpp"
#include "rdcds/field.hpp"

namespace rdcds {

/// Cluster configuration: N servers, read threshold R_r, the first S servers may hold
/// at most L/K_c symbols each. q = 0 selects the default modulus.
struct SystemParams {
    int N = 0;
    int Rr = 0;
    int Kc = 0;
    int S = 0;
    std::uint32_t q = 0;

    bool operator==(const SystemParams&) const = default;
};

inline std::string describe(const SystemParams& p) {
    return "(N=" + std::to_string(p.N) + ", R_r=" + std::to_string(p.Rr) + ", K_c=" + std::to_string(p.Kc) +
           ", S=" + std::to_string(p.S) + ")";
}

/// Basic range checks shared by the codec and the bounds code.
inline void validate(const SystemParams& p) {
    auto bad = [&](const std::string& why) { throw Error(ErrorCode::InvalidParams, why + " in " + describe(p)); };
    if (p.N < 1) bad("N >= 1 violated");
    if (p.Rr < 1 || p.Rr > p.N) bad("1 <= R_r <= N violated");
    if (p.Kc < 1) bad("K_c >= 1 violated");
    if (p.S < 0 || p.S > p.N) bad("0 <= S <= N violated");
    if (p.S < p.Kc && p.S >= p.Rr) bad("S < R_r violated (required when S < K_c)");
    // R_r constrained servers hold at most R_r/K_c of the message.
    if (p.S >= p.Kc && p.Kc > p.Rr) bad("K_c <= R_r violated (required when S >= K_c)");
}

/// Omega = R_r-S-1 when S < K_c, else R_r-K_c. Valid in both regimes.
inline int omega(const SystemParams& p) { return p.S < p.Kc ? p.Rr - p.S - 1 : p.Rr - p.Kc; }

/// Every quantity of the construction. Per-block vectors are 1-based: element 0 is
/// unused except lambda[0] = lambdap[0] = 0.
struct DerivedParams {
    SystemParams params;
    std::uint32_t q = 0;
    int Omega = 0;
    int G1 = 0;
    std::vector<int> alpha, beta;
    std::vector<long long> gamma, lambda;
    int G2 = 0;
    std::vector<int> alphap, betap;
    std::vector<long long> gammap, lambdap;
    long long L = 0;
    long long Lp = 0;
    int P = 0;
    int beta1 = 0;
    bool wellPosed = false;

    int N() const { return params.N; }
    int Rr() const { return params.Rr; }
    int Kc() const { return params.Kc; }
    int S() const { return params.S; }

    /// Columns of M1 (= s1 length) and of M2 (= s2 length).
    long long m1_cols() const { return lambda[G1]; }
    long long m2_cols() const { return P * lambdap[G2]; }
};

inline bool well_posed(const SystemParams& p) {
    const int om = omega(p);
    const int a1 = std::max(p.Kc, p.N - om);
    return p.Rr <= a1 && p.N >= 2 * p.Rr - p.S - 1;
}

inline DerivedParams derive(const SystemParams& p) {
    validate(p);
    if (p.S >= p.Kc)
        throw Error(ErrorCode::InvalidParams, "S < K_c required by the storage construction in " + describe(p));
    DerivedParams d;
    d.params = p;
    d.Omega = omega(p);
    const int a1 = std::max(p.Kc, p.N - d.Omega);
    d.G1 = a1 - p.Kc + 1;
    d.G2 = p.N - p.Rr + 1;
    d.P = p.Kc - p.S - 1;
    d.beta1 = a1 + d.Omega;

    d.alpha.assign(d.G1 + 1, 0);
    d.beta.assign(d.G1 + 1, 0);
    for (int i = 1; i <= d.G1; ++i) {
        d.alpha[i] = a1 - i + 1;
        d.beta[i] = d.alpha[i] + d.Omega;
    }
    d.alphap.assign(d.G2 + 1, 0);
    d.betap.assign(d.G2 + 1, 0);
    for (int i = 1; i <= d.G2; ++i) {
        d.alphap[i] = p.N - p.S - d.Omega - i + 1;
        d.betap[i] = p.N - p.S - i + 1;
        if (d.alphap[i] < 1) throw Error(ErrorCode::InvalidParams, "inner block height < 1 in " + describe(p));
    }

    long long lo = 1, li = 1;
    for (int i = 1; i <= d.G1; ++i) lo = std::lcm(lo, static_cast<long long>(d.alpha[i]));
    for (int i = 1; i <= d.G2; ++i) li = std::lcm(li, static_cast<long long>(d.alphap[i]));
    d.L = std::lcm(lo, p.Kc * li);
    d.Lp = d.L / p.Kc;

    d.gamma.assign(d.G1 + 1, 0);
    d.lambda.assign(d.G1 + 1, 0);
    for (int i = 1; i <= d.G1; ++i) {
        d.lambda[i] = d.L / d.alpha[i];
        d.gamma[i] = d.lambda[i] - d.lambda[i - 1];
    }
    d.gammap.assign(d.G2 + 1, 0);
    d.lambdap.assign(d.G2 + 1, 0);
    for (int i = 1; i <= d.G2; ++i) {
        d.lambdap[i] = d.Lp / d.alphap[i];
        d.gammap[i] = d.lambdap[i] - d.lambdap[i - 1];
    }
    d.wellPosed = well_posed(p);

    const std::uint64_t need = static_cast<std::uint64_t>(p.N) + d.beta1;
    if (p.q == 0) {
        d.q = next_prime(need);
    } else {
        if (!is_prime(p.q) || p.q >= (1u << 31))
            throw Error(ErrorCode::InvalidParams, "q = " + std::to_string(p.q) + " is not a prime below 2^31");
        if (p.q < need)
            throw Error(ErrorCode::FieldTooSmall,
                        "q = " + std::to_string(p.q) + " < N + beta_1 = " + std::to_string(need));
        d.q = p.q;
    }
    return d;
}

/// Sorted, duplicate-free set of 1-based server indices.
class DropoutSet {
public:
    DropoutSet() = default;
    DropoutSet(std::vector<int> servers, int N) : s_(std::move(servers)) {
        std::sort(s_.begin(), s_.end());
        if (std::adjacent_find(s_.begin(), s_.end()) != s_.end())
            throw Error(ErrorCode::InvalidParams, "duplicate server in dropout set");
        for (int n : s_)
            if (n < 1 || n > N)
                throw Error(ErrorCode::InvalidParams, "dropout server " + std::to_string(n) + " outside [1, N]");
    }

    const std::vector<int>& servers() const noexcept { return s_; }
    int size() const noexcept { return static_cast<int>(s_.size()); }
    bool contains(int n) const { return std::binary_search(s_.begin(), s_.end(), n); }

    /// Unconstrained part (servers > S).
    int count_unconstrained(int S) const {
        return static_cast<int>(std::count_if(s_.begin(), s_.end(), [S](int n) { return n > S; }));
    }
    /// Constrained part (servers <= S).
    int count_constrained(int S) const { return size() - count_unconstrained(S); }

    std::vector<int> available(int N) const {
        std::vector<int> out;
        for (int n = 1; n <= N; ++n)
            if (!contains(n)) out.push_back(n);
        return out;
    }

    bool operator==(const DropoutSet&) const = default;

private:
    std::vector<int> s_;
};

enum class OpCase { Case1 = 1, Case2 = 2 };

inline int update_threshold(const SystemParams& p, int X) {
    if (X < 0 || X >= p.Rr)
        throw Error(ErrorCode::InvalidSecurity, "security level X = " + std::to_string(X) + " outside [0, R_r)");
    return p.N - omega(p) + X;
}

inline void require_readable(const SystemParams& p, const DropoutSet& d) {
    if (d.size() > p.N - p.Rr)
        throw Error(ErrorCode::TooManyDropouts, std::to_string(d.size()) + " dropouts, at most N-R_r = " +
                                                    std::to_string(p.N - p.Rr) + " allowed");
}

inline OpCase read_case(const SystemParams& p, const DropoutSet& d) {
    require_readable(p, d);
    return d.size() <= p.N - omega(p) - p.Kc ? OpCase::Case1 : OpCase::Case2;
}

inline void require_updatable(const SystemParams& p, const DropoutSet& d, int X) {
    const int need = update_threshold(p, X);
    const int have = p.N - d.size();
    if (have < need) throw ThresholdViolated(need, have);
}

inline OpCase update_case(const SystemParams& p, const DropoutSet& d, int X) {
    require_updatable(p, d, X);
    return d.size() + X <= p.Rr - p.Kc ? OpCase::Case1 : OpCase::Case2;
}

inline const char* to_string(OpCase c) { return c == OpCase::Case1 ? "case1" : "case2"; }

} // namespace rdcds

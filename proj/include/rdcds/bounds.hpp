#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "rdcds/combinatorics.hpp"
#include "rdcds/params.hpp"
#include "rdcds/random.hpp"
#include "rdcds/simplex.hpp"

namespace rdcds {

namespace detail {

inline LPProblem covering_skeleton(const std::vector<int>& avail) {
    LPProblem lp;
    lp.nvars = static_cast<int>(avail.size());
    lp.varServer = avail;
    lp.c.assign(lp.nvars, Rational(1));
    return lp;
}

/// sum over `support` >= 1, as a row over the available-server variables.
inline LPConstraint covering_row(const std::vector<int>& avail, const std::vector<int>& support) {
    LPConstraint r;
    r.a.assign(avail.size(), Rational(0));
    for (int n : support) {
        auto it = std::lower_bound(avail.begin(), avail.end(), n);
        r.a[it - avail.begin()] = Rational(1);
    }
    r.b = Rational(1);
    return r;
}

inline void add_caps(LPProblem& lp, const SystemParams& p, const std::vector<int>& avail) {
    for (std::size_t k = 0; k < avail.size(); ++k) {
        if (avail[k] > p.S) continue;
        LPConstraint r;
        r.a.assign(avail.size(), Rational(0));
        r.a[k] = Rational(1);
        r.sense = Sense::LE;
        r.b = Rational(1, p.Kc);
        lp.rows.push_back(std::move(r));
    }
}

inline std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// Seeded uniform k-subset of `items`, ascending.
inline std::vector<int> random_subset(Rng& rng, std::vector<int> items, int k) {
    std::shuffle(items.begin(), items.end(), rng.engine());
    items.resize(k);
    std::sort(items.begin(), items.end());
    return items;
}

} // namespace detail

/// Covering LP for reads: for every Omega-subset X of the available servers, the others
/// download at least L in total; available constrained servers are capped at 1/K_c.
/// maxRows > 0 draws that many random covering rows instead when the full family is larger.
inline LPProblem build_read_lp(const SystemParams& p, const DropoutSet& D, std::size_t maxRows = 0,
                               std::uint64_t seed = 0) {
    validate(p);
    require_readable(p, D);
    const auto avail = D.available(p.N);
    LPProblem lp = detail::covering_skeleton(avail);
    const int n = static_cast<int>(avail.size()), w = omega(p);
    if (maxRows && static_cast<unsigned long long>(binomial(n, w)) > maxRows) {
        Rng rng(seed, 0x11);
        for (std::size_t k = 0; k < maxRows; ++k)
            lp.rows.push_back(detail::covering_row(avail, detail::set_minus(avail, detail::random_subset(rng, avail, w))));
        lp.sampled = true;
    } else {
        for_each_subset(avail, w, [&](const std::vector<int>& X) {
            lp.rows.push_back(detail::covering_row(avail, detail::set_minus(avail, X)));
        });
    }
    detail::add_caps(lp, p, avail);
    return lp;
}

/// Covering LP for updates: every R-subset (|R| = R_r-|D|) minus every X-subset of it
/// uploads at least L; same caps.
inline LPProblem build_update_lp(const SystemParams& p, const DropoutSet& D, int X, std::size_t maxRows = 0,
                                 std::uint64_t seed = 0) {
    validate(p);
    require_updatable(p, D, X);
    const auto avail = D.available(p.N);
    LPProblem lp = detail::covering_skeleton(avail);
    const int n = static_cast<int>(avail.size()), r = p.Rr - D.size();
    const double total = static_cast<double>(binomial(n, r)) * static_cast<double>(binomial(r, X));
    if (maxRows && total > static_cast<double>(maxRows)) {
        Rng rng(seed, 0x12);
        for (std::size_t k = 0; k < maxRows; ++k) {
            const auto R = detail::random_subset(rng, avail, r);
            lp.rows.push_back(detail::covering_row(avail, detail::set_minus(R, detail::random_subset(rng, R, X))));
        }
        lp.sampled = true;
    } else {
        for_each_subset(avail, r, [&](const std::vector<int>& R) {
            for_each_subset(R, X, [&](const std::vector<int>& Xs) {
                lp.rows.push_back(detail::covering_row(avail, detail::set_minus(R, Xs)));
            });
        });
    }
    detail::add_caps(lp, p, avail);
    return lp;
}

inline Rational closed_read_bound(const SystemParams& p, const DropoutSet& D) {
    validate(p);
    require_readable(p, D);
    const long N = p.N, Rr = p.Rr, Kc = p.Kc, S = p.S, nd = D.size();
    if (S >= Kc) return Rational(N - nd, N - Rr + Kc - nd);
    if (read_case(p, D) == OpCase::Case1) return Rational(N - nd, N - nd - Rr + S + 1);
    const long d1 = D.count_unconstrained(p.S), d2 = D.count_constrained(p.S);
    return Rational(N - S - d1, N - d1 - Rr + 1) - Rational((S - d2) * (Rr - S - 1), Kc * (N - d1 - Rr + 1));
}

inline Rational closed_update_bound(const SystemParams& p, const DropoutSet& D, int X) {
    validate(p);
    require_updatable(p, D, X);
    const long N = p.N, Rr = p.Rr, Kc = p.Kc, S = p.S, nd = D.size();
    if (S >= Kc) return Rational(N - nd, Rr - X - nd);
    if (update_case(p, D, X) == OpCase::Case1) return Rational(N - nd, Rr - nd - X);
    const long d1 = D.count_unconstrained(p.S), d2 = D.count_constrained(p.S);
    const long k = Rr - S - d1 - X;
    return Rational(N - S - d1, k) - Rational((S - d2) * (N - Rr + X), Kc * k);
}

/// Dual solution built by averaging: equal weight y on a family of covering rows, cap
/// multipliers absorbing the excess coverage of capped servers.
struct AveragingCertificate {
    Rational objective;
    bool dualFeasible = false;
    long long familySize = 0;
};

/// `restrict` selects the family of rows whose support contains every capped variable
/// (the second-regime argument); otherwise all covering rows are averaged.
inline AveragingCertificate averaging_certificate(const LPProblem& lp, const SystemParams& p, bool restrict) {
    const int n = lp.nvars;
    std::vector<char> capped(n, 0);
    for (int j = 0; j < n; ++j) capped[j] = lp.varServer[j] <= p.S;
    std::vector<const LPConstraint*> fam;
    for (const auto& r : lp.rows) {
        if (r.sense != Sense::GE) continue;
        bool ok = true;
        if (restrict)
            for (int j = 0; j < n; ++j)
                if (capped[j] && r.a[j].is_zero()) ok = false;
        if (ok) fam.push_back(&r);
    }
    AveragingCertificate cert;
    cert.familySize = static_cast<long long>(fam.size());
    if (fam.empty()) return cert;
    std::vector<Rational> cov(n, Rational(0));
    for (const auto* r : fam)
        for (int j = 0; j < n; ++j) cov[j] += r->a[j];
    Rational top(0);
    bool any_uncapped = false;
    for (int j = 0; j < n; ++j)
        if (!capped[j] || p.S >= p.Kc) {
            top = std::max(top, cov[j]);
            any_uncapped = true;
        }
    if (!any_uncapped)
        for (int j = 0; j < n; ++j) top = std::max(top, cov[j]);
    if (top.is_zero()) return cert;
    const Rational y = Rational(1) / top;
    Rational obj = y * Rational(static_cast<long>(fam.size()));
    bool feasible = true;
    for (int j = 0; j < n; ++j) {
        Rational w(0);
        const Rational excess = y * cov[j] - Rational(1);
        if (excess.sign() > 0) {
            if (!capped[j]) feasible = false;
            w = excess;
        }
        // Column j of the dual: y*cov_j - w_j <= c_j = 1.
        if (y * cov[j] - w > Rational(1)) feasible = false;
        obj -= w * Rational(1, p.Kc);
    }
    cert.objective = obj;
    cert.dualFeasible = feasible;
    return cert;
}

inline AveragingCertificate read_certificate(const SystemParams& p, const DropoutSet& D, const LPProblem& lp) {
    const bool restrict = p.S < p.Kc && read_case(p, D) == OpCase::Case2;
    return averaging_certificate(lp, p, restrict);
}

inline AveragingCertificate update_certificate(const SystemParams& p, const DropoutSet& D, int X,
                                               const LPProblem& lp) {
    const bool restrict = p.S < p.Kc && update_case(p, D, X) == OpCase::Case2;
    return averaging_certificate(lp, p, restrict);
}

} // namespace rdcds

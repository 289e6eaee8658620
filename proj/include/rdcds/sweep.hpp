#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rdcds/bounds.hpp"

namespace rdcds {

struct IntRange {
    int lo = 0;
    int hi = -1;  // inclusive; hi < lo means "use the default"
    bool set() const { return hi >= lo; }
};

/// Ranges for "N=a:b,R_r=c,K_c=..,S=.."; absent keys default to every valid value.
struct TupleRanges {
    IntRange N{1, 8}, Rr, Kc, S;
};

inline IntRange parse_range(const std::string& text) {
    IntRange r;
    try {
        const auto colon = text.find(':');
        std::size_t used = 0;
        if (colon == std::string::npos) {
            r.lo = r.hi = std::stoi(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        } else {
            const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
            r.lo = std::stoi(a, &used);
            if (used != a.size()) throw std::invalid_argument(text);
            r.hi = std::stoi(b, &used);
            if (used != b.size()) throw std::invalid_argument(text);
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::ConfigParse, "bad range '" + text + "'");
    }
    if (r.hi < r.lo) throw Error(ErrorCode::ConfigParse, "empty range '" + text + "'");
    return r;
}

inline TupleRanges parse_sweep(const std::string& text) {
    TupleRanges t;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ConfigParse, "expected key=range, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const IntRange r = parse_range(item.substr(eq + 1));
        if (key == "N") t.N = r;
        else if (key == "R_r") t.Rr = r;
        else if (key == "K_c") t.Kc = r;
        else if (key == "S") t.S = r;
        else throw Error(ErrorCode::ConfigParse, "unknown sweep key '" + key + "'");
    }
    if (t.N.lo < 1) throw Error(ErrorCode::ConfigParse, "N must be >= 1");
    return t;
}

/// Valid tuples in the ranges; K_c defaults to 1..N (K_c > N behaves like K_c = N+1 for
/// every bound, so larger values add nothing new).
inline void for_each_tuple(const TupleRanges& t, const std::function<void(const SystemParams&)>& fn) {
    for (int N = t.N.lo; N <= t.N.hi; ++N) {
        const IntRange rr = t.Rr.set() ? t.Rr : IntRange{1, N};
        const IntRange kc = t.Kc.set() ? t.Kc : IntRange{1, N};
        const IntRange s = t.S.set() ? t.S : IntRange{0, N};
        for (int Rr = rr.lo; Rr <= rr.hi; ++Rr)
            for (int Kc = kc.lo; Kc <= kc.hi; ++Kc)
                for (int S = s.lo; S <= s.hi; ++S) {
                    SystemParams p{N, Rr, Kc, S, 0};
                    try {
                        validate(p);
                    } catch (const Error&) {
                        continue;
                    }
                    fn(p);
                }
    }
}

/// Bounds depend on D only through (|D1|, |D2|); one representative per split:
/// constrained servers 1..d2 and unconstrained servers S+1..S+d1.
inline std::vector<int> representative_dropouts(const SystemParams& p, int d1, int d2) {
    std::vector<int> D;
    for (int n = 1; n <= d2; ++n) D.push_back(n);
    for (int n = p.S + 1; n <= p.S + d1; ++n) D.push_back(n);
    return D;
}

struct BoundRow {
    SystemParams p;
    bool update = false;
    std::vector<int> dropouts;
    int X = 0;
    Rational closed, lp;
    bool sampled = false;
    bool match = false;
};

/// Closed form against the LP for every representative read and update of `p`.
/// Full LPs up to N = fullLpMaxN; beyond that `sampleRows` random covering rows, where the
/// sampled optimum can only undershoot, so the row passes when lp <= closed.
inline std::vector<BoundRow> bound_rows(const SystemParams& p, int fullLpMaxN = 12, std::size_t sampleRows = 4000,
                                        std::uint64_t seed = 0) {
    std::vector<BoundRow> out;
    const std::size_t cap = p.N > fullLpMaxN ? sampleRows : 0;
    auto finish = [&](BoundRow r, const LPProblem& lp) {
        r.lp = lp_min(lp);
        r.sampled = lp.sampled;
        r.match = r.sampled ? r.lp <= r.closed : r.lp == r.closed;
        out.push_back(std::move(r));
    };
    for (int d2 = 0; d2 <= p.S; ++d2)
        for (int d1 = 0; d1 <= p.N - p.S; ++d1) {
            if (d1 + d2 > p.N - p.Rr) continue;
            BoundRow r;
            r.p = p;
            r.dropouts = representative_dropouts(p, d1, d2);
            const DropoutSet D(r.dropouts, p.N);
            r.closed = closed_read_bound(p, D);
            finish(r, build_read_lp(p, D, cap, seed));
        }
    for (int X = 0; X <= std::max(0, omega(p)) && X < p.Rr; ++X)
        for (int d2 = 0; d2 <= p.S; ++d2)
            for (int d1 = 0; d1 <= p.N - p.S; ++d1) {
                if (d1 + d2 > omega(p) - X) continue;
                BoundRow r;
                r.p = p;
                r.update = true;
                r.dropouts = representative_dropouts(p, d1, d2);
                r.X = X;
                const DropoutSet D(r.dropouts, p.N);
                r.closed = closed_update_bound(p, D, X);
                finish(r, build_update_lp(p, D, X, cap, seed));
            }
    return out;
}

inline std::string bounds_csv_header() { return "N,R_r,K_c,S,op,dropouts,X,closed_form,lp_min,match,lp_mode\n"; }

inline std::string to_csv(const BoundRow& r) {
    std::ostringstream os;
    os << r.p.N << ',' << r.p.Rr << ',' << r.p.Kc << ',' << r.p.S << ',' << (r.update ? "update" : "read") << ',';
    for (std::size_t k = 0; k < r.dropouts.size(); ++k) os << (k ? ";" : "") << r.dropouts[k];
    os << ',' << (r.update ? std::to_string(r.X) : "") << ',' << r.closed.fraction() << ',' << r.lp.fraction() << ','
       << (r.match ? "true" : "false") << ',' << (r.sampled ? "sampled" : "exact") << '\n';
    return os.str();
}

} // namespace rdcds

#include "oracles.hpp"
#include "rdcds/sweep.hpp"
#include "support.hpp"

using namespace rdcds;
using support::code_of;
using support::D;

namespace {

Rational frac(const oracle::Frac& f) { return Rational(f.n, f.d); }

Rational of(const mpq_class& v) { return Rational(v); }

std::vector<int> first_servers(int k, int from = 1) {
    std::vector<int> v(k);
    std::iota(v.begin(), v.end(), from);
    return v;
}

LPProblem random_lp(Rng& rng, int n, int m) {
    LPProblem lp;
    lp.nvars = n;
    lp.varServer = first_servers(n);
    for (int j = 0; j < n; ++j) lp.c.emplace_back(static_cast<long>(rng.uniform_int(0, 5 - 1)));
    for (int k = 0; k < m; ++k) {
        LPConstraint r;
        for (int j = 0; j < n; ++j) r.a.emplace_back(static_cast<long>(rng.uniform_int(0, 4 - 1)));
        r.sense = rng.uniform_int(0, 4 - 1) == 0 ? Sense::LE : Sense::GE;
        r.b = Rational(static_cast<long>(1 + rng.uniform_int(0, 6 - 1)), static_cast<long>(1 + rng.uniform_int(0, 3 - 1)));
        lp.rows.push_back(std::move(r));
    }
    return lp;
}

} // namespace

TEST(BoundsLp, GoldenReadFamily) {
    const LPProblem lp = build_read_lp(support::golden(), D({3}, 7));
    EXPECT_EQ(lp.nvars, 6);
    EXPECT_EQ(lp.count(Sense::GE), 15);
    EXPECT_EQ(lp.count(Sense::LE), 2);
    EXPECT_EQ(lp_min(lp), Rational(5, 3));
    EXPECT_EQ(closed_read_bound(support::golden(), D({3}, 7)), Rational(5, 3));
}

TEST(BoundsLp, GoldenUpdateFamily) {
    const LPProblem lp = build_update_lp(support::golden(), D({1}, 7), 1);
    EXPECT_EQ(lp.count(Sense::GE), 60);
    EXPECT_EQ(lp.count(Sense::LE), 1);
    EXPECT_EQ(lp_min(lp), Rational(9, 4));
    EXPECT_EQ(closed_update_bound(support::golden(), D({1}, 7), 1), Rational(9, 4));
}

TEST(BoundsLp, NoDropoutGoldenValues) {
    EXPECT_EQ(lp_min(build_read_lp(support::golden(), D({}, 7))), Rational(13, 9));
    // X = 0: 5/3 - 2*2/(6*3); X = 1: 5/2 - 2*3/(6*2).
    EXPECT_EQ(lp_min(build_update_lp(support::golden(), D({}, 7), 0)), Rational(13, 9));
    EXPECT_EQ(lp_min(build_update_lp(support::golden(), D({}, 7), 1)), Rational(2));
    EXPECT_EQ(closed_update_bound(support::golden(), D({}, 7), 0), Rational(13, 9));
    EXPECT_EQ(closed_update_bound(support::golden(), D({}, 7), 1), Rational(2));
}

TEST(BoundsLp, SingleConstraintIsOne) {
    LPProblem lp;
    lp.nvars = 3;
    lp.varServer = {1, 2, 3};
    lp.c.assign(3, Rational(1));
    lp.rows.push_back({{Rational(1), Rational(1), Rational(1)}, Sense::GE, Rational(1)});
    EXPECT_EQ(lp_min(lp), Rational(1));
    EXPECT_EQ(*oracle::vertex_min(lp), 1);
}

TEST(BoundsLp, OmegaZeroAndNoConstrainedServers) {
    // Omega = 0: the read family is the single all-servers row.
    const SystemParams p{5, 1, 1, 0, 0};
    const LPProblem lp = build_read_lp(p, D({}, 5));
    EXPECT_EQ(lp.count(Sense::GE), 1);
    EXPECT_EQ(lp.count(Sense::LE), 0);
    EXPECT_EQ(lp_min(lp), Rational(1));
    EXPECT_EQ(closed_read_bound(p, D({}, 5)), Rational(1));
    EXPECT_EQ(lp_min(build_read_lp({8, 3, 2, 0, 0}, D({}, 8))), closed_read_bound({8, 3, 2, 0, 0}, D({}, 8)));
}

TEST(BoundsLp, ClosedFormsAgreeWithIndependentFormula) {
    for (int N = 1; N <= 7; ++N)
        for (int Rr = 1; Rr <= N; ++Rr)
            for (int Kc = 1; Kc <= N; ++Kc)
                for (int S = 0; S <= N; ++S) {
                    const SystemParams p{N, Rr, Kc, S, 0};
                    try {
                        validate(p);
                    } catch (const Error&) {
                        continue;
                    }
                    SCOPED_TRACE(describe(p));
                    for (int d2 = 0; d2 <= std::min(S, N - Rr); ++d2)
                        for (int d1 = 0; d1 + d2 <= N - Rr && d1 <= N - S; ++d1) {
                            std::vector<int> s = first_servers(d2);
                            for (int k = 0; k < d1; ++k) s.push_back(S + 1 + k);
                            const DropoutSet Ds(s, N);
                            EXPECT_EQ(closed_read_bound(p, Ds), frac(oracle::read_bound(N, Rr, Kc, S, d1, d2)));
                            for (int X = 0; X + d1 + d2 <= omega(p); ++X)
                                EXPECT_EQ(closed_update_bound(p, Ds, X),
                                          frac(oracle::update_bound(N, Rr, Kc, S, d1, d2, X)));
                        }
                }
}

TEST(BoundsLp, LpMatchesClosedFormOnSmallTuples) {
    int checked = 0;
    for (int N = 1; N <= 6; ++N)
        for (int Rr = 1; Rr <= N; ++Rr)
            for (int Kc = 1; Kc <= N; ++Kc)
                for (int S = 0; S <= N; ++S) {
                    const SystemParams p{N, Rr, Kc, S, 0};
                    try {
                        validate(p);
                    } catch (const Error&) {
                        continue;
                    }
                    SCOPED_TRACE(describe(p));
                    for (int nd = 0; nd <= N - Rr; ++nd)
                        for_each_subset(first_servers(N), nd, [&](const std::vector<int>& s) {
                            const DropoutSet Ds(s, N);
                            EXPECT_EQ(lp_min(build_read_lp(p, Ds)), closed_read_bound(p, Ds));
                            for (int X = 0; X + nd <= omega(p); ++X)
                                EXPECT_EQ(lp_min(build_update_lp(p, Ds, X)), closed_update_bound(p, Ds, X));
                            ++checked;
                        });
                }
    EXPECT_GT(checked, 500);
}

TEST(BoundsLp, SimplexAgreesWithVertexEnumeration) {
    for (SystemParams p : {support::golden(), SystemParams{5, 3, 2, 1, 0}, SystemParams{6, 4, 3, 4, 0},
                           SystemParams{5, 2, 3, 1, 0}}) {
        SCOPED_TRACE(describe(p));
        for (int nd = 0; nd <= p.N - p.Rr; ++nd) {
            const DropoutSet Ds(first_servers(nd), p.N);
            const LPProblem lp = build_read_lp(p, Ds);
            if (lp.nvars > 6) continue;
            EXPECT_EQ(of(*oracle::vertex_min(lp)), lp_min(lp));
        }
    }
    Rng rng(41);
    int feasible = 0, infeasible = 0;
    for (int t = 0; t < 300; ++t) {
        const LPProblem lp = random_lp(rng, 1 + t % 4, 1 + t % 5);
        const auto v = oracle::vertex_min(lp);
        if (v) {
            EXPECT_EQ(lp_min(lp), of(*v)) << "trial " << t;
            ++feasible;
        } else {
            EXPECT_EQ(code_of([&] { lp_min(lp); }), ErrorCode::Infeasible) << "trial " << t;
            ++infeasible;
        }
    }
    EXPECT_GT(feasible, 100);
    EXPECT_GT(infeasible, 0);
}

TEST(BoundsLp, PrimalRouteHandlesNegativeObjectives) {
    // min -x0 - x1  s.t. x0 + x1 <= 3, x0 <= 2 : optimum -3.
    LPProblem lp;
    lp.nvars = 2;
    lp.varServer = {1, 2};
    lp.c = {Rational(-1), Rational(-1)};
    lp.rows.push_back({{Rational(1), Rational(1)}, Sense::LE, Rational(3)});
    lp.rows.push_back({{Rational(1), Rational(0)}, Sense::LE, Rational(2)});
    const LPSolution s = lp_solve(lp);
    EXPECT_FALSE(s.dualRoute);
    EXPECT_EQ(s.value, Rational(-3));
    EXPECT_EQ(of(*oracle::vertex_min(lp)), Rational(-3));
}

TEST(BoundsLp, DualRouteCertificatesAreConsistent) {
    const LPProblem lp = build_read_lp(support::golden(), D({3}, 7));
    const LPSolution s = lp_solve(lp);
    ASSERT_TRUE(s.dualRoute);
    Rational primal(0);
    for (const auto& v : s.x) {
        EXPECT_GE(v.sign(), 0);
        primal += v;
    }
    EXPECT_EQ(primal, s.value);
    for (const auto& y : s.y) EXPECT_GE(y.sign(), 0);
}

TEST(BoundsLp, InfeasibleAndMalformed) {
    LPProblem lp;
    lp.nvars = 1;
    lp.varServer = {1};
    lp.c = {Rational(1)};
    lp.rows.push_back({{Rational(1)}, Sense::GE, Rational(2)});
    lp.rows.push_back({{Rational(1)}, Sense::LE, Rational(1)});
    EXPECT_EQ(code_of([&] { lp_min(lp); }), ErrorCode::Infeasible);
    lp.rows.push_back({{Rational(1), Rational(1)}, Sense::GE, Rational(0)});
    EXPECT_EQ(code_of([&] { lp_min(lp); }), ErrorCode::ShapeMismatch);
}

TEST(BoundsLp, AveragingCertificatesMatchClosedForms) {
    for (SystemParams p : {support::golden(), SystemParams{8, 6, 7, 3, 0}, SystemParams{6, 4, 5, 2, 0}}) {
        SCOPED_TRACE(describe(p));
        for (int nd = 0; nd <= p.N - p.Rr; ++nd) {
            const DropoutSet Ds(first_servers(nd, p.N - nd + 1), p.N);
            const LPProblem lp = build_read_lp(p, Ds);
            const auto cert = read_certificate(p, Ds, lp);
            EXPECT_TRUE(cert.dualFeasible);
            EXPECT_EQ(cert.objective, closed_read_bound(p, Ds));
        }
        const DropoutSet none({}, p.N);
        for (int X = 0; X <= omega(p); ++X) {
            const LPProblem lp = build_update_lp(p, none, X);
            const auto cert = update_certificate(p, none, X, lp);
            EXPECT_TRUE(cert.dualFeasible);
            EXPECT_EQ(cert.objective, closed_update_bound(p, none, X));
        }
    }
}

TEST(BoundsLp, ReadBoundIsMonotoneInKc) {
    for (int Kc = 3; Kc < 7; ++Kc) {
        const SystemParams a{7, 5, Kc, 2, 0}, b{7, 5, Kc + 1, 2, 0};
        EXPECT_LE(closed_read_bound(a, D({}, 7)), closed_read_bound(b, D({}, 7)));
        EXPECT_LE(closed_read_bound(a, D({3}, 7)), closed_read_bound(b, D({3}, 7)));
    }
}

TEST(BoundsLp, BoundedStorageRegimeUsesUncappedFormula) {
    const SystemParams p{7, 5, 2, 3, 0};
    EXPECT_EQ(closed_read_bound(p, D({}, 7)), Rational(7, 4));
    EXPECT_EQ(closed_update_bound(p, D({}, 7), 1), Rational(7, 4));
    EXPECT_EQ(lp_min(build_read_lp(p, D({}, 7))), Rational(7, 4));
    EXPECT_EQ(lp_min(build_update_lp(p, D({6}, 7), 1)), Rational(6, 3));
}

TEST(BoundsLp, SampledFamilyNeverExceedsExact) {
    const SystemParams p{9, 6, 5, 2, 0};
    for (std::vector<int> s : {std::vector<int>{}, std::vector<int>{1}, std::vector<int>{9}}) {
        const DropoutSet Ds(s, 9);
        const LPProblem full = build_read_lp(p, Ds);
        const LPProblem part = build_read_lp(p, Ds, 20, 5);
        EXPECT_FALSE(full.sampled);
        EXPECT_TRUE(part.sampled);
        EXPECT_LE(lp_min(part), lp_min(full));
        const LPProblem ufull = build_update_lp(p, Ds, 1);
        const LPProblem upart = build_update_lp(p, Ds, 1, 30, 5);
        EXPECT_TRUE(upart.sampled);
        EXPECT_LE(lp_min(upart), lp_min(ufull));
        EXPECT_EQ(lp_min(ufull), closed_update_bound(p, Ds, 1));
    }
}

TEST(BoundsLp, RejectsOutOfRangeOperations) {
    EXPECT_EQ(code_of([] { build_read_lp(support::golden(), D({1, 2, 3}, 7)); }), ErrorCode::TooManyDropouts);
    EXPECT_EQ(code_of([] { build_update_lp(support::golden(), D({1, 2}, 7), 1); }), ErrorCode::ThresholdViolated);
}

TEST(BoundsSweep, RowsAllMatchForSmallN) {
    TupleRanges r = parse_sweep("N=1:5");
    long long rows = 0;
    for_each_tuple(r, [&](const SystemParams& p) {
        for (const auto& row : bound_rows(p)) {
            EXPECT_TRUE(row.match) << to_csv(row);
            EXPECT_FALSE(row.sampled);
            ++rows;
        }
    });
    EXPECT_GT(rows, 100);
}

TEST(BoundsSweep, ParseErrors) {
    EXPECT_EQ(code_of([] { parse_sweep("N=3:1"); }), ErrorCode::ConfigParse);
    EXPECT_EQ(code_of([] { parse_sweep("M=1:2"); }), ErrorCode::ConfigParse);
    EXPECT_EQ(code_of([] { parse_sweep("N=a"); }), ErrorCode::ConfigParse);
    const TupleRanges r = parse_sweep("N=4:6,K_c=2:3");
    EXPECT_EQ(r.N.lo, 4);
    EXPECT_EQ(r.N.hi, 6);
}

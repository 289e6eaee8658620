#include "oracles.hpp"
#include "support.hpp"

using namespace rdcds;
using support::code_of;
using support::D;

namespace {

Rational frac(const oracle::Frac& f) { return Rational(f.n, f.d); }

std::int64_t mod(std::int64_t a, std::int64_t q) { return ((a % q) + q) % q; }

} // namespace

TEST(UpdatePlan, GoldenExample) {
    const DerivedParams d = derive(support::golden());
    const UpdatePlan p = plan_update(d, D({1}, 7), 1);
    EXPECT_EQ(p.kase, OpCase::Case2);
    EXPECT_EQ(p.threshold, 6);
    EXPECT_EQ(p.pt, 3);
    EXPECT_EQ(p.g2t, 2);
    EXPECT_FALSE(p.clampFlag);
    EXPECT_EQ(p.q2_cols_per_group(d), 3);
}

TEST(UpdatePlan, ClampedCorner) {
    const DerivedParams d = derive({9, 7, 2, 1, 0});
    EXPECT_FALSE(d.wellPosed);
    const UpdatePlan p = plan_update(d, D({9}, 9), 1);
    EXPECT_EQ(p.kase, OpCase::Case1);
    EXPECT_EQ(p.g1tRaw, 0);
    EXPECT_EQ(p.g1t, 1);
    EXPECT_TRUE(p.clampFlag);
}

TEST(UpdatePlan, ThresholdViolated) {
    const DerivedParams d = derive(support::golden());
    try {
        plan_update(d, D({1, 2}, 7), 1);
        FAIL() << "expected ThresholdViolated";
    } catch (const ThresholdViolated& e) {
        EXPECT_EQ(e.required(), 6);
    }
}

TEST(Update, GoldenUploadsAndCost) {
    ClusterState c = support::cluster(support::golden(), 21);
    const auto& sc = *c.scheme;
    Rng rng(22);
    const UpdatePlan plan = plan_update(sc.d, D({1}, 7), 1);
    const auto delta = rng.symbols(36, 17);
    const UpdateTranscript tr = encode_increment(sc, plan, delta, rng);
    ASSERT_EQ(tr.uploads.size(), 6u);
    for (const auto& u : tr.uploads) {
        EXPECT_EQ(u.Q1.size(), 6u);
        EXPECT_EQ(u.Q2.size(), u.n == 2 ? 0u : 9u);
    }
    EXPECT_EQ(update_cost(tr), Rational(9, 4));
    EXPECT_EQ(update_cost(tr), Rational(6 + 5 * (6 + 9), 36));

    const ServerStorage dropped = c.servers[0];
    auto expected = c.referenceMessage;
    for (int k = 0; k < 36; ++k) expected[k] = (expected[k] + delta[k]) % 17;
    apply_update(c, tr);
    EXPECT_EQ(c.servers[0], dropped);
    EXPECT_EQ(c.t, 1);
    EXPECT_EQ(c.referenceMessage, expected);
    EXPECT_EQ(read_message(c, D({}, 7)), expected);
    EXPECT_EQ(read_message(c, D({1}, 7)), expected);  // stale server 1 stays consistent
    EXPECT_TRUE(check_structure(c).ok);
}

TEST(Update, GoldenCancellingRowMatchesScalarFormula) {
    const auto sc = support::scheme(support::golden());
    Rng rng(23);
    const UpdatePlan plan = plan_update(sc->d, D({1}, 7), 1);
    const auto delta = rng.symbols(36, 17);
    const UpdateTranscript tr = encode_increment(*sc, plan, delta, rng);
    const FieldMatrix& zdot = tr.zdot.outer[0];  // rows: [Zdd; H]
    const std::int64_t q = 17, x1 = 1;
    auto f = [](int j) { return 7 + j; };
    for (int n = 1; n <= 6; ++n) {
        std::int64_t s = 0;
        for (int i = 1; i <= 6; ++i)
            s += static_cast<std::int64_t>(oracle::inv_mod(mod(x1 - f(i), q), q)) * delta[6 * (i - 1) + n - 1];
        s += static_cast<std::int64_t>(oracle::inv_mod(mod(x1 - f(7), q), q)) * zdot.at(0, n - 1);
        const std::int64_t h = mod(-mod(x1 - f(8), q) * mod(s, q), q);
        EXPECT_EQ(zdot.at(1, n - 1), static_cast<Symbol>(h)) << "n = " << n;
    }
}

TEST(Update, DropoutServersSeeZeroIncrement) {
    for (auto [p, Ds, X] : {std::tuple{support::golden(), std::vector<int>{1}, 1},
                            std::tuple{support::golden(), std::vector<int>{6}, 1},
                            std::tuple{SystemParams{8, 6, 7, 3, 0}, std::vector<int>{2, 7}, 0},
                            std::tuple{SystemParams{9, 5, 3, 1, 0}, std::vector<int>{4, 9}, 1}}) {
        SCOPED_TRACE(describe(p));
        const auto sc = support::scheme(p);
        Rng rng(24);
        const UpdatePlan plan = plan_update(sc->d, D(Ds, p.N), X);
        const UpdateTranscript tr = encode_increment(*sc, plan, rng.symbols(sc->d.L, sc->d.q), rng);
        std::vector<int> all(sc->d.beta1);
        std::iota(all.begin(), all.end(), 1);
        std::vector<int> inner(p.N - p.S);
        std::iota(inner.begin(), inner.end(), 1);
        for (int n : Ds) {
            EXPECT_TRUE(multiply(sc->code.sub({n}, all), tr.M1dot).is_zero());
            if (n > p.S) EXPECT_TRUE(multiply(sc->code.sub({n}, inner), tr.M2dot).is_zero());
        }
        EXPECT_TRUE(check_dropout_cancellation(*sc, tr).ok);
        EXPECT_TRUE(check_increment_support(sc->d, tr).ok);
    }
}

TEST(Update, ZeroIncrementAndNoiseGiveZeroTranscript) {
    ClusterState c = support::cluster(support::golden(), 25);
    const auto& sc = *c.scheme;
    const UpdatePlan plan = plan_update(sc.d, D({1}, 7), 1);
    const UpdateTranscript tr =
        encode_increment(sc, plan, std::vector<Symbol>(36, 0), std::vector<Symbol>(plan.noise_dim(sc.d), 0));
    for (const auto& u : tr.uploads) {
        EXPECT_TRUE(std::all_of(u.Q1.begin(), u.Q1.end(), [](Symbol x) { return x == 0; }));
        EXPECT_TRUE(std::all_of(u.Q2.begin(), u.Q2.end(), [](Symbol x) { return x == 0; }));
    }
    const auto before = c.servers;
    apply_update(c, tr);
    EXPECT_EQ(c.servers, before);
    EXPECT_EQ(c.t, 1);
}

TEST(Update, Case1TerminatesAtPlannedBlock) {
    const SystemParams p{9, 5, 3, 1, 0};
    ClusterState c = support::cluster(p, 26);
    const auto& sc = *c.scheme;
    const UpdatePlan plan = plan_update(sc.d, D({9}, 9), 0);
    ASSERT_EQ(plan.kase, OpCase::Case1);
    EXPECT_EQ(plan.g1t, 3);  // alpha_1 + 1 - R_r + 1 = 6 + 1 - 5 + 1
    Rng rng(27);
    const UpdateTranscript tr = encode_increment(sc, plan, rng.symbols(sc.d.L, sc.d.q), rng);
    for (const auto& u : tr.uploads) {
        EXPECT_EQ(static_cast<long long>(u.Q1.size()) * 4, sc.d.L);
        EXPECT_TRUE(u.Q2.empty());
    }
    EXPECT_EQ(update_cost(tr), Rational(2));
    EXPECT_EQ(update_cost(tr), frac(oracle::update_bound(9, 5, 3, 1, 1, 0, 0)));
    EXPECT_TRUE(tr.M2dot.is_zero());
    for (std::size_t r = 0; r < tr.M1dot.rows(); ++r)
        for (std::size_t col = sc.d.lambda[plan.g1t]; col < tr.M1dot.cols(); ++col) EXPECT_EQ(tr.M1dot.at(r, col), 0u);
    apply_update(c, tr);
    EXPECT_TRUE(check_structure(c).ok);
    EXPECT_EQ(read_message(c, D({}, 9)), c.referenceMessage);
}

TEST(Update, CostsMatchClosedFormsOnWellPosedTuple) {
    const SystemParams p{8, 6, 7, 3, 0};
    ClusterState c = support::cluster(p, 28);
    Rng rng(29);
    std::vector<int> all(8);
    std::iota(all.begin(), all.end(), 1);
    for (int X = 0; X <= omega(p); ++X)
        for (int k = 0; k <= omega(p) - X; ++k)
            for_each_subset(all, k, [&](const std::vector<int>& s) {
                const DropoutSet Ds(s, 8);
                const UpdatePlan plan = plan_update(c.d(), Ds, X);
                const UpdateTranscript tr = encode_increment(*c.scheme, plan, rng.symbols(c.d().L, c.d().q), rng);
                EXPECT_FALSE(plan.clampFlag);
                EXPECT_EQ(update_cost(tr),
                          frac(oracle::update_bound(8, 6, 7, 3, Ds.count_unconstrained(3), Ds.count_constrained(3), X)));
                apply_update(c, tr);
                EXPECT_EQ(read_message(c, D({}, 8)), c.referenceMessage);
            });
    EXPECT_TRUE(check_structure(c).ok);
    EXPECT_TRUE(check_recoverability(c).ok);
}

TEST(Update, ClampedPlanStaysCorrectAndAboveLp) {
    const SystemParams p{9, 7, 2, 1, 0};
    ClusterState c = support::cluster(p, 30);
    Rng rng(31);
    const UpdatePlan plan = plan_update(c.d(), D({9}, 9), 1);
    const UpdateTranscript tr = encode_increment(*c.scheme, plan, rng.symbols(c.d().L, c.d().q), rng);
    apply_update(c, tr);
    EXPECT_EQ(read_message(c, D({}, 9)), c.referenceMessage);
    EXPECT_GE(update_cost(tr), lp_min(build_update_lp(p, D({9}, 9), 1)));
    EXPECT_TRUE(check_x_security(*c.scheme, plan, {3}));
}

TEST(Update, IncrementIsIndependentOfStorage) {
    const auto sc = support::scheme(support::golden());
    Rng a(1), b(2);
    const ClusterState c1 = init_cluster(sc, a.symbols(36, 17), a);
    const ClusterState c2 = init_cluster(sc, b.symbols(36, 17), b);
    ASSERT_NE(c1.servers, c2.servers);
    const UpdatePlan plan = plan_update(sc->d, D({1}, 7), 1);
    Rng r1(77), r2(77);
    const auto delta = Rng(5).symbols(36, 17);
    const UpdateTranscript t1 = encode_increment(*c1.scheme, plan, delta, r1);
    const UpdateTranscript t2 = encode_increment(*c2.scheme, plan, delta, r2);
    ASSERT_EQ(t1.uploads.size(), t2.uploads.size());
    for (std::size_t k = 0; k < t1.uploads.size(); ++k) {
        EXPECT_EQ(t1.uploads[k].Q1, t2.uploads[k].Q1);
        EXPECT_EQ(t1.uploads[k].Q2, t2.uploads[k].Q2);
    }
}

TEST(Update, RunningSumAcrossManyUpdates) {
    ClusterState c = support::cluster(support::golden(), 32);
    Rng rng(33);
    auto sum = c.referenceMessage;
    for (int t = 0; t < 12; ++t) {
        const int X = t % 2;
        std::vector<int> s;
        if (X == 0 && t % 3 == 0) s = {1 + t % 7, 1 + (t + 3) % 7};
        else if (t % 4 == 1) s = {1 + t % 7};
        if (static_cast<int>(s.size()) > omega(support::golden()) - X) s.resize(omega(support::golden()) - X);
        const auto delta = rng.symbols(36, 17);
        const UpdatePlan plan = plan_update(c.d(), D(s, 7), X);
        apply_update(c, encode_increment(*c.scheme, plan, delta, rng));
        for (int k = 0; k < 36; ++k) sum[k] = (sum[k] + delta[k]) % 17;
    }
    EXPECT_EQ(c.referenceMessage, sum);
    EXPECT_EQ(read_message(c, D({4, 6}, 7)), sum);
    EXPECT_TRUE(check_recoverability(c).ok);
}

TEST(Update, ApplyRejectsMismatchedTranscript) {
    ClusterState c = support::cluster(support::golden(), 34);
    ClusterState other = support::cluster({8, 6, 7, 3, 0}, 34);
    Rng rng(35);
    const UpdatePlan plan = plan_update(other.d(), D({}, 8), 0);
    const UpdateTranscript tr = encode_increment(*other.scheme, plan, rng.symbols(other.d().L, other.d().q), rng);
    EXPECT_EQ(code_of([&] { apply_update(c, tr); }), ErrorCode::ShapeMismatch);
}

TEST(Update, TranscriptJson) {
    const auto sc = support::scheme(support::golden());
    Rng rng(36);
    const UpdatePlan plan = plan_update(sc->d, D({1}, 7), 1);
    const auto j = to_json(encode_increment(*sc, plan, rng.symbols(36, 17), rng));
    EXPECT_EQ(j["cost"], "9/4");
    EXPECT_EQ(j["case"], "case2");
    EXPECT_EQ(j["X"], 1);
    EXPECT_EQ(j["clampFlag"], false);
    EXPECT_EQ(j["servers"][0]["n"], 2);
    EXPECT_EQ(j["servers"][0]["total"], 6);
    EXPECT_EQ(j["servers"][1]["total"], 15);
}

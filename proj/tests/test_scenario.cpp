#include <cstdlib>
#include <filesystem>

#include "support.hpp"

using namespace rdcds;
using support::code_of;

namespace {

nlohmann::json golden_json() {
    return nlohmann::json::parse(R"({
        "params": {"N": 7, "R_r": 5, "K_c": 6, "S": 2, "q": 17},
        "seed": 5,
        "timeline": [
            {"op": "read", "dropouts": [3]},
            {"op": "update", "dropouts": [1], "security": 1},
            {"op": "read", "dropouts": []}
        ]})");
}

Scenario random_timeline(int events, std::uint64_t seed) {
    Scenario s;
    s.params = support::golden();
    s.seed = seed;
    Rng rng(seed);
    for (int k = 0; k < events; ++k) {
        ScenarioEvent e;
        e.op = rng.bernoulli(0.5) ? OpKind::Update : OpKind::Read;
        e.X = e.op == OpKind::Update ? rng.uniform_int(0, 1) : 0;
        const int cap = e.op == OpKind::Read ? 2 : 2 - e.X;
        e.dropouts = detail::sample_dropouts(rng, 7, 0.2, cap);
        s.timeline.push_back(e);
    }
    return s;
}

class ScopedEnv {
public:
    ScopedEnv(const char* name, const char* value) : name_(name) { setenv(name, value, 1); }
    ~ScopedEnv() { unsetenv(name_); }

private:
    const char* name_;
};

} // namespace

TEST(ScenarioParse, GoldenFields) {
    const Scenario s = parse_scenario(golden_json());
    EXPECT_EQ(s.params.N, 7);
    EXPECT_EQ(s.params.q, 17u);
    EXPECT_EQ(s.seed, 5u);
    ASSERT_EQ(s.timeline.size(), 3u);
    EXPECT_EQ(s.timeline[1].op, OpKind::Update);
    EXPECT_EQ(s.timeline[1].X, 1);
    EXPECT_EQ(s.timeline[1].dropouts, std::vector<int>{1});
    EXPECT_FALSE(s.initialMessage);
}

TEST(ScenarioParse, StructuralErrors) {
    auto j = golden_json();
    j["timeline"][0]["op"] = "write";
    EXPECT_EQ(code_of([&] { parse_scenario(j); }), ErrorCode::ConfigParse);
    j = golden_json();
    j["params"].erase("K_c");
    EXPECT_EQ(code_of([&] { parse_scenario(j); }), ErrorCode::ConfigParse);
    j = golden_json();
    j["params"]["N"] = "seven";
    EXPECT_EQ(code_of([&] { parse_scenario(j); }), ErrorCode::ConfigParse);
    EXPECT_EQ(code_of([] { load_scenario("/nonexistent/scenario.json"); }), ErrorCode::ConfigParse);
}

TEST(ScenarioValidate, ReportsFirstBadEvent) {
    auto j = golden_json();
    j["timeline"][2]["dropouts"] = {1, 2, 3};
    try {
        validate_scenario(parse_scenario(j));
        FAIL() << "expected ScenarioInvalid";
    } catch (const ScenarioInvalid& e) {
        EXPECT_EQ(e.event_index(), 2);
        EXPECT_EQ(e.code(), ErrorCode::ScenarioInvalid);
    }
    j = golden_json();
    j["timeline"][1]["dropouts"] = {1, 2};
    try {
        validate_scenario(parse_scenario(j));
        FAIL() << "expected ScenarioInvalid";
    } catch (const ScenarioInvalid& e) {
        EXPECT_EQ(e.event_index(), 1);
    }
    j = golden_json();
    j["params"]["S"] = 6;
    try {
        validate_scenario(parse_scenario(j));
        FAIL() << "expected ScenarioInvalid";
    } catch (const ScenarioInvalid& e) {
        EXPECT_EQ(e.event_index(), -1);
    }
    j = golden_json();
    j["timeline"][1]["increment"] = std::vector<int>(35, 1);
    EXPECT_EQ(code_of([&] { validate_scenario(parse_scenario(j)); }), ErrorCode::ScenarioInvalid);
}

TEST(ScenarioRun, GoldenCosts) {
    const RunReport r = run_scenario(parse_scenario(golden_json()));
    ASSERT_EQ(r.events.size(), 3u);
    EXPECT_EQ(r.events[0].measured, Rational(5, 3));
    EXPECT_EQ(r.events[1].measured, Rational(9, 4));
    EXPECT_EQ(r.events[2].measured, Rational(13, 9));
    for (const auto& e : r.events) {
        EXPECT_TRUE(e.match);
        EXPECT_TRUE(e.decodeOk);
        EXPECT_TRUE(e.storageUntouched);
        EXPECT_EQ(e.closed, e.lp);
    }
    EXPECT_EQ(r.events[1].secure, std::optional<bool>(true));
    EXPECT_EQ(r.finalRecoverability.checked, 21);
    EXPECT_TRUE(r.ok());
}

TEST(ScenarioRun, ExplicitMessagesAreSummed) {
    auto j = golden_json();
    std::vector<int> w(36), inc(36);
    for (int k = 0; k < 36; ++k) w[k] = k % 17, inc[k] = (3 * k) % 17;
    j["initial_message"] = w;
    j["timeline"][1]["increment"] = inc;
    const RunReport r = run_scenario(parse_scenario(j));
    for (int k = 0; k < 36; ++k) EXPECT_EQ(r.finalMessage[k], static_cast<Symbol>((w[k] + inc[k]) % 17));
    EXPECT_TRUE(r.ok());
}

TEST(ScenarioRun, EmptyTimeline) {
    auto j = golden_json();
    j["timeline"] = nlohmann::json::array();
    const RunReport r = run_scenario(parse_scenario(j));
    EXPECT_TRUE(r.events.empty());
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.checks.run, 2);
}

TEST(ScenarioRun, DeterministicForFixedSeed) {
    const Scenario s = random_timeline(20, 61);
    const RunReport a = run_scenario(s), b = run_scenario(s);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    EXPECT_EQ(a.finalMessage, b.finalMessage);
    EXPECT_TRUE(a.ok()) << a.checks.firstFailure.dump();
    RunOptions o;
    o.seedOverride = 62;
    EXPECT_NE(run_scenario(s, o).finalMessage, a.finalMessage);
}

TEST(ScenarioRun, SeedPrecedence) {
    Scenario s = parse_scenario(golden_json());
    EXPECT_EQ(effective_seed(s, {}), 5u);
    {
        ScopedEnv env("RDCDS_SEED", "99");
        EXPECT_EQ(effective_seed(s, {}), 99u);
        RunOptions o;
        o.seedOverride = 7;
        EXPECT_EQ(effective_seed(s, o), 7u);
    }
    {
        ScopedEnv env("RDCDS_SEED", "abc");
        EXPECT_EQ(code_of([&] { effective_seed(s, {}); }), ErrorCode::ConfigParse);
    }
}

TEST(ScenarioRun, RandomDropoutsStayFeasible) {
    Scenario s = random_timeline(30, 63);
    RunOptions o;
    o.randomDropouts = 0.5;
    const RunReport r = run_scenario(s, o);
    EXPECT_TRUE(r.ok()) << r.checks.firstFailure.dump();
    bool any = false;
    for (const auto& e : r.events) {
        const int cap = e.op == OpKind::Read ? 2 : 2 - e.X;
        EXPECT_LE(static_cast<int>(e.dropouts.size()), cap);
        any = any || !e.dropouts.empty();
    }
    EXPECT_TRUE(any);
    EXPECT_EQ(to_json(run_scenario(s, o)).dump(), to_json(r).dump());
}

TEST(ScenarioRun, PlansDependOnlyOnTheCurrentEvent) {
    // The same (D, X) produces the same plan and cost regardless of history.
    const auto d = derive(support::golden());
    const Scenario a = random_timeline(12, 64);
    const RunReport ra = run_scenario(a);
    for (const auto& e : ra.events) {
        const DropoutSet Ds(e.dropouts, 7);
        if (e.op == OpKind::Update) {
            EXPECT_EQ(plan_update(d, Ds, e.X), plan_update(d, Ds, e.X));
            EXPECT_EQ(e.measured, closed_update_bound(d.params, Ds, e.X));
        } else {
            EXPECT_EQ(e.measured, closed_read_bound(d.params, Ds));
        }
    }
    Scenario fresh;
    fresh.params = a.params;
    fresh.seed = 3;
    fresh.timeline = {a.timeline.back()};
    EXPECT_EQ(run_scenario(fresh).events[0].measured, ra.events.back().measured);
}

TEST(ScenarioRun, DeepVerifyAddsChecks) {
    RunOptions o;
    o.deepVerify = true;
    const Scenario s = parse_scenario(golden_json());
    const RunReport deep = run_scenario(s, o);
    EXPECT_TRUE(deep.ok()) << deep.checks.firstFailure.dump();
    EXPECT_GT(deep.checks.run, run_scenario(s).checks.run);
}

TEST(ScenarioReport, JsonAndCsv) {
    const RunReport r = run_scenario(parse_scenario(golden_json()));
    const auto j = to_json(r);
    EXPECT_EQ(j["events"][0]["measuredCost"], "5/3");
    EXPECT_EQ(j["events"][1]["lpBound"], "9/4");
    EXPECT_EQ(j["events"][0]["secure"], nullptr);
    EXPECT_EQ(j["events"][1]["secure"], true);
    EXPECT_EQ(j["final"]["recoverability"]["subsetsChecked"], 21);
    EXPECT_EQ(j["ok"], true);
    const std::string csv = to_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,R_r,K_c,S,op,dropouts,X,case,measured,closed,lp,match,clamped");
    EXPECT_NE(csv.find("7,5,6,2,update,1,1,case2,9/4,9/4,9/4,true,false"), std::string::npos);
}

TEST(ScenarioSamples, AllShippedSamplesPass) {
    int n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(RDCDS_SAMPLES_DIR)) {
        if (entry.path().extension() != ".json") continue;
        SCOPED_TRACE(entry.path().string());
        const RunReport r = run_scenario(load_scenario(entry.path().string()));
        EXPECT_TRUE(r.ok()) << r.checks.firstFailure.dump();
        ++n;
    }
    EXPECT_GE(n, 3);
}

#pragma once

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rdcds/scenario.hpp"
#include "rdcds/sweep.hpp"

namespace rdcds {

namespace cli {

inline std::string join(const std::vector<int>& v, std::size_t from = 1) {
    std::string s;
    for (std::size_t k = from; k < v.size(); ++k) s += (k > from ? " " : "") + std::to_string(v[k]);
    return s;
}

inline std::string join(const std::vector<long long>& v, std::size_t from = 1) {
    std::string s;
    for (std::size_t k = from; k < v.size(); ++k) s += (k > from ? " " : "") + std::to_string(v[k]);
    return s;
}

inline int cmd_params(const SystemParams& p, std::ostream& out) {
    validate(p);
    out << "N=" << p.N << " R_r=" << p.Rr << " K_c=" << p.Kc << " S=" << p.S << '\n';
    out << "Omega=" << omega(p) << '\n';
    if (p.S >= p.Kc) {
        out << "regime=S>=K_c (bounds only; the coded storage needs S < K_c)\n";
        return 0;
    }
    const DerivedParams d = derive(p);
    out << "q=" << d.q << '\n'
        << "L=" << d.L << '\n'
        << "L'=" << d.Lp << '\n'
        << "P=" << d.P << '\n'
        << "G1=" << d.G1 << '\n'
        << "G2=" << d.G2 << '\n'
        << "beta1=" << d.beta1 << '\n'
        << "wellPosed=" << (d.wellPosed ? "true" : "false") << '\n'
        << "alpha=" << join(d.alpha) << '\n'
        << "beta=" << join(d.beta) << '\n'
        << "gamma=" << join(d.gamma) << '\n'
        << "lambda=" << join(d.lambda, 0) << '\n'
        << "alpha'=" << join(d.alphap) << '\n'
        << "beta'=" << join(d.betap) << '\n'
        << "gamma'=" << join(d.gammap) << '\n'
        << "lambda'=" << join(d.lambdap, 0) << '\n'
        << "s1 symbols=" << d.m1_cols() << " s2 symbols=" << d.m2_cols() << '\n';
    return 0;
}

inline Scenario golden_scenario() {
    Scenario s;
    s.params = {7, 5, 6, 2, 17};
    s.seed = 20240601;
    s.timeline = {{OpKind::Read, {3}, 0, std::nullopt},
                  {OpKind::Update, {1}, 1, std::nullopt},
                  {OpKind::Read, {}, 0, std::nullopt}};
    return s;
}

inline int cmd_demo(std::ostream& out, std::ostream& err) {
    const Scenario s = golden_scenario();
    RunOptions opt;
    opt.seedOverride = s.seed;
    opt.deepVerify = true;
    const RunReport rep = run_scenario(s, opt);

    auto sc = std::make_shared<const Scheme>(s.params);
    Rng rng(s.seed, 0);
    const ClusterState c = init_cluster(sc, rng.symbols(sc->d.L, sc->d.q), rng);
    out << "params " << describe(s.params) << " q=" << sc->d.q << " L=" << sc->d.L << '\n';
    out << "storage fractions";
    for (int n = 1; n <= s.params.N; ++n) out << ' ' << storage_fraction(c, n).fraction();
    out << '\n';
    const auto& e = rep.events;
    out << "read cost " << e[0].measured.fraction() << (e[0].decodeOk ? " (decoded)" : " (DECODE FAILED)") << '\n';
    out << "threshold " << update_threshold(s.params, 1) << '\n';
    out << "update cost " << e[1].measured.fraction() << '\n';
    out << "final read " << (e[2].decodeOk ? "returns W+Delta" : "MISMATCH") << " cost " << e[2].measured.fraction()
        << '\n';
    out << "checks " << rep.checks.passed << '/' << rep.checks.run << '\n';
    if (!rep.ok()) {
        err << "FAIL: " << rep.checks.firstFailure.dump() << '\n';
        return 1;
    }
    return 0;
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::ConfigParse, "cannot write " + path);
    f << text;
}

inline int cmd_simulate(const std::string& config, const RunOptions& opt, const std::string& outPath,
                        const std::string& csvPath, std::ostream& out, std::ostream& err) {
    const Scenario s = load_scenario(config);
    const RunReport rep = run_scenario(s, opt);
    write_text(outPath, to_json(rep).dump(2) + "\n", out);
    if (!csvPath.empty()) write_text(csvPath, to_csv(rep), out);
    if (!rep.ok()) {
        err << "FAIL: " << rep.checks.firstFailure.dump() << '\n';
        return 1;
    }
    return 0;
}

inline int cmd_bounds(const std::string& sweep, int fullLpMaxN, std::size_t sampleRows, std::ostream& out,
                      std::ostream& err) {
    const TupleRanges t = parse_sweep(sweep);
    out << bounds_csv_header();
    long long rows = 0, bad = 0;
    std::string first;
    for_each_tuple(t, [&](const SystemParams& p) {
        for (const auto& r : bound_rows(p, fullLpMaxN, sampleRows)) {
            ++rows;
            const std::string line = to_csv(r);
            if (!r.match && !bad++) first = line;
            out << line;
        }
    });
    if (bad) {
        err << "FAIL: closed form and LP disagree on " << bad << " of " << rows << " rows, first: " << first;
        return 1;
    }
    return 0;
}

/// The full audit plus standalone codec checks; JSON report on `out`.
inline int cmd_verify(const std::string& config, const RunOptions& base, std::ostream& out, std::ostream& err) {
    const Scenario s = load_scenario(config);
    RunOptions opt = base;
    opt.deepVerify = true;
    const RunReport rep = run_scenario(s, opt);
    CheckLog log = rep.checks;

    const DerivedParams d = derive(s.params);
    Rng rng(rep.seed, 0x5ca1e);
    for (int k = 0; k < 20; ++k) {
        NoiseSet z = NoiseSet::from_flat(d, rng.symbols(NoiseSet::dimension(d), d.q));
        const auto pair = pscgen(d, rng.symbols(d.L, d.q), z);
        const CheckResult r = check_staircase(d, pair);
        log.record(r.ok, "staircase", {{"sample", k}, {"diagnostic", r.diagnostic}});
    }
    nlohmann::json j{{"params", params_json(s.params, d.q)},
                     {"seed", rep.seed},
                     {"checksRun", log.run},
                     {"passes", log.passed},
                     {"recoverabilitySubsets", rep.finalRecoverability.checked},
                     {"securitySubsets", rep.securitySubsets},
                     {"firstCounterexample", log.firstFailure},
                     {"ok", log.ok()}};
    out << j.dump(2) << '\n';
    if (!log.ok()) {
        err << "FAIL: " << log.firstFailure.dump() << '\n';
        return 1;
    }
    return 0;
}

} // namespace cli

/// Exit codes: 0 all assertions passed, 1 an assertion failed, 2 bad input or usage.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"rdcds: coded storage with dropout-tolerant reads and secure updates"};
    app.require_subcommand(1);

    auto* params = app.add_subcommand("params", "print the derived construction parameters");
    SystemParams pp;
    std::uint32_t q = 0;
    params->add_option("N", pp.N)->required();
    params->add_option("R_r", pp.Rr)->required();
    params->add_option("K_c", pp.Kc)->required();
    params->add_option("S", pp.S)->required();
    params->add_option("--q", q, "field size (prime); default next prime above N+beta1");

    auto* demo = app.add_subcommand("demo", "run the (7,5,6,2) walkthrough");

    RunOptions opt;
    std::string config, outPath, csvPath;
    std::uint64_t seed = 0;
    double pdrop = 0;
    auto* simulate = app.add_subcommand("simulate", "run a scenario and write the report");
    simulate->add_option("--config", config)->required();
    simulate->add_option("--seed", seed, "overrides RDCDS_SEED and the config seed");
    simulate->add_option("--out", outPath, "report JSON path (default stdout)");
    simulate->add_option("--csv", csvPath, "cost rows CSV path");
    simulate->add_option("--random-dropouts", pdrop, "replace scheduled dropouts by Bernoulli(p) draws")
        ->check(CLI::Range(0.0, 1.0));

    std::string sweep;
    int fullLpMaxN = 12;
    std::size_t sampleRows = 4000;
    auto* bounds = app.add_subcommand("bounds", "tabulate closed-form bounds against the LP");
    bounds->add_option("--sweep", sweep, "ranges, e.g. N=5:7,R_r=3:5,K_c=2:6,S=0:3")->required();
    bounds->add_option("--full-lp-max-n", fullLpMaxN, "largest N solved with every covering row");
    bounds->add_option("--sample-rows", sampleRows, "covering rows drawn beyond that N");

    auto* verify = app.add_subcommand("verify", "security, recoverability and structure suites");
    verify->add_option("--config", config)->required();
    verify->add_option("--seed", seed, "overrides RDCDS_SEED and the config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    for (auto* sub : {simulate, verify})
        if (sub->parsed() && sub->count("--seed")) opt.seedOverride = seed;
    if (simulate->parsed() && simulate->count("--random-dropouts")) opt.randomDropouts = pdrop;

    try {
        if (params->parsed()) {
            pp.q = q;
            return cli::cmd_params(pp, out);
        }
        if (demo->parsed()) return cli::cmd_demo(out, err);
        if (simulate->parsed()) return cli::cmd_simulate(config, opt, outPath, csvPath, out, err);
        if (bounds->parsed()) return cli::cmd_bounds(sweep, fullLpMaxN, sampleRows, out, err);
        if (verify->parsed()) return cli::cmd_verify(config, opt, out, err);
    } catch (const Error& e) {
        err << e.what() << '\n';
        switch (e.code()) {
        case ErrorCode::ConfigParse:
        case ErrorCode::ScenarioInvalid:
        case ErrorCode::InvalidParams:
        case ErrorCode::FieldTooSmall: return 2;
        default: return 1;
        }
    }
    return 2;
}

} // namespace rdcds

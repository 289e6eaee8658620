#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "rdcds/bounds.hpp"
#include "rdcds/verify.hpp"

namespace rdcds {

enum class OpKind { Read, Update };

inline const char* to_string(OpKind k) { return k == OpKind::Read ? "read" : "update"; }

struct ScenarioEvent {
    OpKind op = OpKind::Read;
    std::vector<int> dropouts;
    int X = 0;                                  // update only
    std::optional<std::vector<Symbol>> increment;  // update only; nullopt = random
};

struct Scenario {
    SystemParams params;
    std::uint64_t seed = 0;
    std::optional<std::vector<Symbol>> initialMessage;  // nullopt = random
    std::vector<ScenarioEvent> timeline;
};

namespace detail {

inline std::vector<Symbol> parse_symbols(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw Error(ErrorCode::ConfigParse, std::string(what) + " must be \"random\" or a list");
    std::vector<Symbol> v;
    for (const auto& e : j) {
        if (!e.is_number_integer() || e.get<long long>() < 0)
            throw Error(ErrorCode::ConfigParse, std::string(what) + " entries must be nonnegative integers");
        v.push_back(static_cast<Symbol>(e.get<long long>()));
    }
    return v;
}

inline std::optional<std::vector<Symbol>> parse_message(const nlohmann::json& j, const char* what) {
    if (j.is_string()) {
        if (j.get<std::string>() != "random")
            throw Error(ErrorCode::ConfigParse, std::string(what) + ": only \"random\" is accepted as a string");
        return std::nullopt;
    }
    return parse_symbols(j, what);
}

template <class T>
T field_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigParse, std::string("field '") + key + "': " + e.what());
    }
}

template <class T>
T field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::ConfigParse, std::string("missing field '") + key + "'");
    return field_or<T>(j, key, T{});
}

} // namespace detail

/// Structural parse only; semantic checks happen in validate_scenario.
inline Scenario parse_scenario(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigParse, "scenario must be a JSON object");
    Scenario s;
    const auto& p = j.contains("params") ? j.at("params") : throw Error(ErrorCode::ConfigParse, "missing 'params'");
    s.params.N = detail::field<int>(p, "N");
    s.params.Rr = detail::field<int>(p, "R_r");
    s.params.Kc = detail::field<int>(p, "K_c");
    s.params.S = detail::field<int>(p, "S");
    s.params.q = detail::field_or<std::uint32_t>(p, "q", 0);
    s.seed = detail::field_or<std::uint64_t>(j, "seed", 0);
    if (j.contains("initial_message")) s.initialMessage = detail::parse_message(j.at("initial_message"), "initial_message");
    if (j.contains("timeline")) {
        if (!j.at("timeline").is_array()) throw Error(ErrorCode::ConfigParse, "'timeline' must be a list");
        for (const auto& e : j.at("timeline")) {
            ScenarioEvent ev;
            const auto op = detail::field<std::string>(e, "op");
            if (op == "read") ev.op = OpKind::Read;
            else if (op == "update") ev.op = OpKind::Update;
            else throw Error(ErrorCode::ConfigParse, "unknown op '" + op + "'");
            ev.dropouts = detail::field_or<std::vector<int>>(e, "dropouts", {});
            if (ev.op == OpKind::Update) {
                ev.X = detail::field_or<int>(e, "security", 0);
                if (e.contains("increment")) ev.increment = detail::parse_message(e.at("increment"), "increment");
            }
            s.timeline.push_back(std::move(ev));
        }
    }
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigParse, "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigParse, path + ": " + e.what());
    }
    return parse_scenario(j);
}

/// Eager validation of the whole timeline; the first problem is reported with its index.
inline void validate_scenario(const Scenario& s) {
    DerivedParams d;
    try {
        d = derive(s.params);
    } catch (const Error& e) {
        throw ScenarioInvalid(-1, e.what());
    }
    auto check_symbols = [&](const std::vector<Symbol>& v, int idx, const char* what) {
        if (static_cast<long long>(v.size()) != d.L)
            throw ScenarioInvalid(idx, std::string(what) + " has " + std::to_string(v.size()) + " symbols, L = " +
                                           std::to_string(d.L));
        for (Symbol x : v)
            if (x >= d.q) throw ScenarioInvalid(idx, std::string(what) + " symbol " + std::to_string(x) + " >= q");
    };
    if (s.initialMessage) check_symbols(*s.initialMessage, -1, "initial_message");
    for (std::size_t k = 0; k < s.timeline.size(); ++k) {
        const auto& ev = s.timeline[k];
        const int idx = static_cast<int>(k);
        try {
            DropoutSet D(ev.dropouts, d.N());
            if (ev.op == OpKind::Read) {
                require_readable(s.params, D);
            } else {
                require_updatable(s.params, D, ev.X);
                if (ev.increment) check_symbols(*ev.increment, idx, "increment");
            }
        } catch (const ScenarioInvalid&) {
            throw;
        } catch (const Error& e) {
            throw ScenarioInvalid(idx, e.what());
        }
    }
}

struct RunOptions {
    std::optional<std::uint64_t> seedOverride;  // --seed, beats RDCDS_SEED, beats the config
    std::optional<double> randomDropouts;       // replace scheduled dropouts by Bernoulli(p) draws
    bool deepVerify = false;                    // negative controls, reconstruction, per-event structure
    std::size_t lpRowCap = 0;                   // 0: full LP up to N = 12, sampled beyond
};

/// Seed precedence: explicit override, then RDCDS_SEED, then the config.
inline std::uint64_t effective_seed(const Scenario& s, const RunOptions& o) {
    if (o.seedOverride) return *o.seedOverride;
    if (const char* env = std::getenv("RDCDS_SEED"); env && *env) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigParse, std::string("RDCDS_SEED is not an integer: ") + env);
        }
    }
    return s.seed;
}

struct EventRecord {
    int t = 0;
    OpKind op = OpKind::Read;
    std::vector<int> dropouts;
    int X = 0;
    OpCase kase = OpCase::Case1;
    Rational measured, closed, lp;
    bool lpSampled = false;
    bool match = false;
    bool clamped = false;
    bool decodeOk = false;
    bool storageUntouched = false;
    std::optional<bool> secure;  // updates with X >= 1
};

struct CheckLog {
    long long run = 0;
    long long passed = 0;
    nlohmann::json firstFailure;  // null when everything passed

    void record(bool ok, const std::string& name, nlohmann::json detail = {}) {
        ++run;
        if (ok) {
            ++passed;
        } else if (firstFailure.is_null()) {
            firstFailure = {{"check", name}, {"detail", std::move(detail)}};
        }
    }
    bool ok() const { return run == passed; }
};

struct RunReport {
    SystemParams params;
    std::uint32_t q = 0;
    std::uint64_t seed = 0;
    std::vector<EventRecord> events;
    RecoverabilityReport finalRecoverability;
    bool finalStructure = false;
    long long securitySubsets = 0;
    bool securityOk = true;
    CheckLog checks;
    std::vector<Symbol> finalMessage;

    bool ok() const { return checks.ok(); }
};

namespace detail {

inline std::vector<int> sample_dropouts(Rng& rng, int N, double p, int maxSize) {
    std::vector<int> d;
    for (int n = 1; n <= N; ++n)
        if (rng.bernoulli(p)) d.push_back(n);
    if (static_cast<int>(d.size()) > maxSize) {
        std::shuffle(d.begin(), d.end(), rng.engine());
        d.resize(std::max(0, maxSize));
        std::sort(d.begin(), d.end());
    }
    return d;
}

inline std::string join_servers(const std::vector<int>& v, char sep = ';') {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += sep;
        s += std::to_string(v[k]);
    }
    return s;
}

/// LP minima depend only on (op, D, X); memoized across events.
class LpCache {
public:
    LpCache(const SystemParams& p, std::size_t cap) : p_(p), cap_(cap ? cap : (p.N > 12 ? 5000 : 0)) {}

    std::pair<Rational, bool> get(OpKind op, const DropoutSet& D, int X) {
        auto key = std::make_tuple(op == OpKind::Read ? 0 : 1, D.servers(), X);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        LPProblem lp = op == OpKind::Read ? build_read_lp(p_, D, cap_) : build_update_lp(p_, D, X, cap_);
        auto v = std::make_pair(lp_min(lp), lp.sampled);
        memo_.emplace(key, v);
        return v;
    }

private:
    SystemParams p_;
    std::size_t cap_;
    std::map<std::tuple<int, std::vector<int>, int>, std::pair<Rational, bool>> memo_;
};

/// Every X-subset of the available servers (sampled beyond N = 8) must be secure.
inline std::pair<bool, long long> security_sweep(const Scheme& sc, const UpdatePlan& plan, std::uint64_t seed,
                                                 std::vector<int>* counterexample) {
    SymbolicUpdate su(sc, plan);
    long long n = 0;
    bool ok = true;
    auto test = [&](const std::vector<int>& Xs) {
        ++n;
        if (!check_x_security(su.linearize(Xs)) && ok) {
            ok = false;
            if (counterexample) *counterexample = Xs;
        }
    };
    if (sc.d.N() <= 8) {
        for_each_subset(plan.available, plan.X, test);
    } else {
        Rng rng(seed, 0xc011);
        for (int s = 0; s < 200; ++s) {
            std::vector<int> perm = plan.available;
            std::shuffle(perm.begin(), perm.end(), rng.engine());
            std::vector<int> Xs(perm.begin(), perm.begin() + plan.X);
            std::sort(Xs.begin(), Xs.end());
            test(Xs);
        }
    }
    return {ok, n};
}

} // namespace detail

/// Executes the timeline against one cluster and audits every event.
inline RunReport run_scenario(const Scenario& s, const RunOptions& opt = {}) {
    validate_scenario(s);
    RunReport rep;
    rep.params = s.params;
    rep.seed = effective_seed(s, opt);
    auto sc = std::make_shared<const Scheme>(s.params);
    const auto& d = sc->d;
    rep.q = d.q;

    Rng init_rng(rep.seed, 0);
    const std::vector<Symbol> w0 = s.initialMessage ? *s.initialMessage : init_rng.symbols(d.L, d.q);
    ClusterState c = init_cluster(sc, w0, init_rng);
    detail::LpCache lps(s.params, opt.lpRowCap);
    CheckLog& log = rep.checks;

    for (std::size_t k = 0; k < s.timeline.size(); ++k) {
        const auto& ev = s.timeline[k];
        Rng rng(rep.seed, k + 1);
        EventRecord rec;
        rec.t = static_cast<int>(k);
        rec.op = ev.op;
        rec.X = ev.op == OpKind::Update ? ev.X : 0;
        rec.dropouts = ev.dropouts;
        if (opt.randomDropouts) {
            Rng drng(rep.seed, (1ull << 32) + k);
            const int cap = ev.op == OpKind::Read ? d.N() - d.Rr() : d.Omega - ev.X;
            rec.dropouts = detail::sample_dropouts(drng, d.N(), *opt.randomDropouts, cap);
        }
        const DropoutSet D(rec.dropouts, d.N());
        const std::vector<ServerStorage> before = c.servers;
        nlohmann::json where = {{"event", rec.t}, {"op", to_string(ev.op)}, {"dropouts", rec.dropouts}};

        if (ev.op == OpKind::Read) {
            const ReadPlan plan = plan_read(d, D);
            const ReadTranscript tr = execute_read(c, plan);
            rec.kase = plan.kase;
            rec.decodeOk = decode_read(*sc, plan, tr) == c.referenceMessage;
            rec.measured = read_cost(tr);
            rec.closed = closed_read_bound(s.params, D);
        } else {
            const UpdatePlan plan = plan_update(d, D, ev.X);
            rec.kase = plan.kase;
            rec.clamped = plan.clampFlag;
            const std::vector<Symbol> delta = ev.increment ? *ev.increment : rng.symbols(d.L, d.q);
            const UpdateTranscript tr = encode_increment(*sc, plan, delta, rng);
            apply_update(c, tr);
            rec.measured = update_cost(tr);
            rec.closed = closed_update_bound(s.params, D, ev.X);
            // Spot check: full read plus one random R_r-subset read.
            bool ok = read_message(c, DropoutSet({}, d.N())) == c.referenceMessage;
            std::vector<int> perm(d.N());
            std::iota(perm.begin(), perm.end(), 1);
            std::shuffle(perm.begin(), perm.end(), rng.engine());
            std::vector<int> drop(perm.begin(), perm.begin() + (d.N() - d.Rr()));
            ok = ok && read_message(c, DropoutSet(drop, d.N())) == c.referenceMessage;
            rec.decodeOk = ok;
            if (ev.X >= 1) {
                std::vector<int> bad;
                auto [sec, n] = detail::security_sweep(*sc, plan, rep.seed + k, &bad);
                rec.secure = sec;
                rep.securitySubsets += n;
                rep.securityOk = rep.securityOk && sec;
                log.record(sec, "x_security", {{"event", rec.t}, {"colluders", bad}});
            }
            if (opt.deepVerify) {
                log.record(check_dropout_cancellation(*sc, tr).ok, "dropout_cancellation", where);
                log.record(check_increment_support(d, tr).ok, "increment_support", where);
                log.record(check_structure(c).ok, "structure", where);
                if (ev.X >= 1) {
                    SymbolicUpdate su(*sc, plan);
                    const std::vector<int> colluders(plan.available.begin(), plan.available.begin() + ev.X);
                    log.record(!check_x_security(without_noise(su.linearize(colluders))), "zero_noise_control", where);
                }
                const std::vector<int> R(plan.available.begin(), plan.available.begin() + (d.Rr() - D.size()));
                log.record(reconstruct_increment(*sc, tr, R) == delta, "increment_reconstruction", where);
                // I(delta; Q_R) = L while Q_X alone carries nothing, so Q_{R\X} holds L symbols of delta.
                SymbolicUpdate su(*sc, plan);
                const std::vector<int> Xs(R.begin(), R.begin() + ev.X);
                long long upload = 0;
                for (const auto& u : tr.uploads)
                    if (std::binary_search(R.begin() + ev.X, R.end(), u.n))
                        upload += static_cast<long long>(u.Q1.size() + u.Q2.size());
                log.record(delta_information(su.linearize(R)) == d.L &&
                               delta_information(su.linearize(Xs)) == 0 && upload >= d.L,
                           "increment_information", where);
            }
        }
        bool untouched = true;
        for (int n : D.servers()) untouched = untouched && before[n - 1] == c.servers[n - 1];
        if (ev.op == OpKind::Read) untouched = untouched && before == c.servers;
        rec.storageUntouched = untouched;

        auto [lp, sampled] = lps.get(ev.op, D, rec.X);
        rec.lp = lp;
        rec.lpSampled = sampled;
        if (rec.clamped) {
            rec.match = false;
            log.record(rec.measured >= rec.lp, "clamped_cost_above_lp", where);
        } else if (sampled) {
            rec.match = rec.measured == rec.closed && rec.lp <= rec.closed;
            log.record(rec.match, "cost_match_sampled_lp", where);
        } else {
            rec.match = rec.measured == rec.closed && rec.closed == rec.lp;
            log.record(rec.match, "cost_match", where);
        }
        log.record(rec.decodeOk, ev.op == OpKind::Read ? "read_decode" : "update_then_read", where);
        log.record(rec.storageUntouched, "dropout_storage_untouched", where);
        rep.events.push_back(std::move(rec));
    }

    rep.finalRecoverability = check_recoverability(c, rep.seed);
    log.record(rep.finalRecoverability.ok, "final_recoverability", {{"failing_R", rep.finalRecoverability.failing}});
    rep.finalStructure = check_structure(c).ok;
    log.record(rep.finalStructure, "final_structure");
    rep.finalMessage = c.referenceMessage;
    return rep;
}

inline nlohmann::json to_json(const EventRecord& e) {
    nlohmann::json j{{"t", e.t},
                     {"op", to_string(e.op)},
                     {"dropouts", e.dropouts},
                     {"X", e.X},
                     {"case", to_string(e.kase)},
                     {"measuredCost", e.measured.fraction()},
                     {"closedFormBound", e.closed.fraction()},
                     {"lpBound", e.lp.fraction()},
                     {"costMatch", e.match},
                     {"clampFlag", e.clamped},
                     {"decodeOk", e.decodeOk},
                     {"dropoutStorageUntouched", e.storageUntouched}};
    if (e.lpSampled) j["lpSampled"] = true;
    if (e.clamped) j["gap"] = (e.measured - e.lp).fraction();
    j["secure"] = e.secure ? nlohmann::json(*e.secure) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const RunReport& r) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : r.events) events.push_back(to_json(e));
    return {{"params", params_json(r.params, r.q)},
            {"seed", r.seed},
            {"events", std::move(events)},
            {"final",
             {{"recoverability", {{"subsetsChecked", r.finalRecoverability.checked}, {"ok", r.finalRecoverability.ok}}},
              {"structure", r.finalStructure},
              {"security", {{"subsetsChecked", r.securitySubsets}, {"ok", r.securityOk}}}}},
            {"checks", {{"run", r.checks.run}, {"passed", r.checks.passed}, {"firstFailure", r.checks.firstFailure}}},
            {"ok", r.ok()}};
}

inline std::string to_csv(const RunReport& r) {
    std::ostringstream os;
    os << "N,R_r,K_c,S,op,dropouts,X,case,measured,closed,lp,match,clamped\n";
    for (const auto& e : r.events)
        os << r.params.N << ',' << r.params.Rr << ',' << r.params.Kc << ',' << r.params.S << ',' << to_string(e.op)
           << ',' << detail::join_servers(e.dropouts) << ',' << e.X << ',' << to_string(e.kase) << ','
           << e.measured.fraction() << ',' << e.closed.fraction() << ',' << e.lp.fraction() << ','
           << (e.match ? "true" : "false") << ',' << (e.clamped ? "true" : "false") << '\n';
    return os.str();
}

} // namespace rdcds

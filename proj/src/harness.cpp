#include "nsic/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace nsic {

int SegmentSpec::resolve(int horizon, int c_constant) const {
    const double T = static_cast<double>(horizon);
    double v = 0.0;
    if (text == "C") {
        v = c_constant;
    } else if (text == "logT") {
        v = std::log(T);
    } else if (text == "T^1/3") {
        v = std::cbrt(T);
    } else if (text == "T^1/2") {
        v = std::sqrt(T);
    } else if (text == "T^2/3") {
        v = std::cbrt(T * T);
    } else {
        std::size_t used = 0;
        long long n = 0;
        try {
            n = std::stoll(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != text.size() || text.empty())
            throw Error("segment count '" + text +
                        "' is neither an integer nor one of C, logT, T^1/3, T^1/2, T^2/3");
        if (n < 1)
            throw Error("segment count must be >= 1");
        v = static_cast<double>(n);
    }
    const int s = std::max(1, static_cast<int>(std::floor(v + 1e-9)));
    if (s > horizon)
        throw Error("segment count " + std::to_string(s) + " exceeds T");
    return s;
}

void ExperimentConfig::validate() const {
    if (lead_time < 0)
        throw Error("lead_time must be >= 0");
    if (horizon < 2)
        throw Error("horizon must be >= 2");
    cost.validate();
    if (segments.empty())
        throw Error("at least one S value is required");
    if (c_constant < 1)
        throw Error("C must be >= 1");
    for (const auto& s : segments)
        s.resolve(horizon, c_constant);
    if (!run_nsic && !run_schedule && !run_oracle)
        throw Error("no algorithm selected");
    if (max_per_anchor < 0)
        throw Error("max_per_anchor must be >= 0");
    if (delta && !(*delta > 0.0 && *delta < 1.0))
        throw Error("delta must lie in (0, 1)");
    if (gamma && !(*gamma > 0.0))
        throw Error("gamma must be > 0");
    if (sigma && !(*sigma > 0.0))
        throw Error("sigma must be > 0");
    if (!(scale > 0.0))
        throw Error("scale must be > 0");
    if (change_scale && !(*change_scale > 0.0))
        throw Error("change_scale must be > 0");
    if (replications < 1)
        throw Error("replications must be >= 1");
    if (workers < 1)
        throw Error("workers must be >= 1");
    if (traj_stride < 0)
        throw Error("traj_stride must be >= 0");
    if (n_mc < lead_time + 2)
        throw Error("n_mc must be >= L + 2");
    if (!(u_factor > 0.0))
        throw Error("u_factor must be > 0");
    if (scan_points < 2)
        throw Error("scan_points must be >= 2");
    if (upper && !(*upper > 0.0))
        throw Error("upper must be > 0");
}

double ExperimentConfig::delta_value() const {
    if (delta)
        return *delta;
    const double T = static_cast<double>(horizon);
    return 1.0 / (T * T);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct ParseContext {
    int line;
    std::string key;

    [[noreturn]] void fail(const std::string& what) const {
        throw Error("config line " + std::to_string(line) + ": " + key + ": " + what);
    }

    double number(const std::string& v) const {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(v, &used);
        } catch (const std::exception&) {
            fail("expected a number, got '" + v + "'");
        }
        if (used != v.size())
            fail("expected a number, got '" + v + "'");
        return x;
    }

    long long integer(const std::string& v) const {
        std::size_t used = 0;
        long long x = 0;
        try {
            x = std::stoll(v, &used);
        } catch (const std::exception&) {
            fail("expected an integer, got '" + v + "'");
        }
        if (used != v.size())
            fail("expected an integer, got '" + v + "'");
        return x;
    }

    int int32(const std::string& v) const {
        const long long x = integer(v);
        if (x < INT32_MIN || x > INT32_MAX)
            fail("integer out of range");
        return static_cast<int>(x);
    }

    bool boolean(const std::string& v) const {
        if (v == "true" || v == "yes" || v == "on" || v == "1")
            return true;
        if (v == "false" || v == "no" || v == "off" || v == "0")
            return false;
        fail("expected true or false, got '" + v + "'");
    }

    std::optional<double> number_or_auto(const std::string& v) const {
        if (v == "auto")
            return std::nullopt;
        return number(v);
    }
};

using Setter = std::function<void(ExperimentConfig&, const ParseContext&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"system",
         {
             {"model",
              [](ExperimentConfig& c, const ParseContext& p, const std::string& v) {
                  try {
                      c.model = model_from_string(v);
                  } catch (const Error& e) {
                      p.fail(e.what());
                  }
              }},
             {"lead_time", [](auto& c, auto& p, auto& v) { c.lead_time = p.int32(v); }},
             {"horizon", [](auto& c, auto& p, auto& v) { c.horizon = p.int32(v); }},
             {"T", [](auto& c, auto& p, auto& v) { c.horizon = static_cast<int>(p.number(v)); }},
             {"h", [](auto& c, auto& p, auto& v) { c.cost.h = p.number(v); }},
             {"b", [](auto& c, auto& p, auto& v) { c.cost.b = p.number(v); }},
         }},
        {"demand",
         {
             {"family",
              [](ExperimentConfig& c, const ParseContext& p, const std::string& v) {
                  try {
                      c.family = family_kind_from_string(v);
                  } catch (const Error& e) {
                      p.fail(e.what());
                  }
              }},
             {"S",
              [](ExperimentConfig& c, const ParseContext& p, const std::string& v) {
                  c.segments.clear();
                  std::stringstream ss(v);
                  std::string item;
                  while (std::getline(ss, item, ',')) {
                      item = trim(item);
                      if (item.empty())
                          p.fail("empty S entry");
                      c.segments.push_back({item});
                  }
                  if (c.segments.empty())
                      p.fail("no S values");
              }},
             {"C", [](auto& c, auto& p, auto& v) { c.c_constant = p.int32(v); }},
             {"normal_mean_lo", [](auto& c, auto& p, auto& v) { c.ranges.normal_mean_lo = p.number(v); }},
             {"normal_mean_hi", [](auto& c, auto& p, auto& v) { c.ranges.normal_mean_hi = p.number(v); }},
             {"normal_sd", [](auto& c, auto& p, auto& v) { c.ranges.normal_sd = p.number(v); }},
             {"uniform_a_lo", [](auto& c, auto& p, auto& v) { c.ranges.uniform_a_lo = p.number(v); }},
             {"uniform_a_hi", [](auto& c, auto& p, auto& v) { c.ranges.uniform_a_hi = p.number(v); }},
             {"uniform_width_lo", [](auto& c, auto& p, auto& v) { c.ranges.uniform_width_lo = p.number(v); }},
             {"uniform_width_hi", [](auto& c, auto& p, auto& v) { c.ranges.uniform_width_hi = p.number(v); }},
             {"poisson_rate_lo", [](auto& c, auto& p, auto& v) { c.ranges.poisson_rate_lo = p.number(v); }},
             {"poisson_rate_hi", [](auto& c, auto& p, auto& v) { c.ranges.poisson_rate_hi = p.number(v); }},
             {"exp_rate_lo", [](auto& c, auto& p, auto& v) { c.ranges.exp_rate_lo = p.number(v); }},
             {"exp_rate_hi", [](auto& c, auto& p, auto& v) { c.ranges.exp_rate_hi = p.number(v); }},
         }},
        {"algorithms",
         {
             {"nsic", [](auto& c, auto& p, auto& v) { c.run_nsic = p.boolean(v); }},
             {"schedule", [](auto& c, auto& p, auto& v) { c.run_schedule = p.boolean(v); }},
             {"oracle", [](auto& c, auto& p, auto& v) { c.run_oracle = p.boolean(v); }},
             {"detection_scope",
              [](ExperimentConfig& c, const ParseContext& p, const std::string& v) {
                  if (v == "two")
                      c.detection_scope = DetectionScope::TwoPolicies;
                  else if (v == "all")
                      c.detection_scope = DetectionScope::AllPolicies;
                  else
                      p.fail("expected 'two' or 'all'");
              }},
             {"interval_mode",
              [](ExperimentConfig& c, const ParseContext& p, const std::string& v) {
                  if (v == "pruned")
                      c.interval_mode = IntervalMode::Pruned;
                  else if (v == "exhaustive")
                      c.interval_mode = IntervalMode::Exhaustive;
                  else
                      p.fail("expected 'pruned' or 'exhaustive'");
              }},
             {"max_per_anchor", [](auto& c, auto& p, auto& v) { c.max_per_anchor = p.int32(v); }},
         }},
        {"confidence",
         {
             {"delta", [](auto& c, auto& p, auto& v) { c.delta = p.number_or_auto(v); }},
             {"gamma", [](auto& c, auto& p, auto& v) { c.gamma = p.number_or_auto(v); }},
             {"sigma", [](auto& c, auto& p, auto& v) { c.sigma = p.number_or_auto(v); }},
             {"scale", [](auto& c, auto& p, auto& v) { c.scale = p.number(v); }},
             {"change_scale", [](auto& c, auto& p, auto& v) { c.change_scale = p.number_or_auto(v); }},
         }},
        {"run",
         {
             {"replications", [](auto& c, auto& p, auto& v) { c.replications = p.int32(v); }},
             {"seed",
              [](ExperimentConfig& c, const ParseContext& p, const std::string& v) {
                  const long long s = p.integer(v);
                  if (s < 0)
                      p.fail("seed must be >= 0");
                  c.seed = static_cast<std::uint64_t>(s);
              }},
             {"workers", [](auto& c, auto& p, auto& v) { c.workers = p.int32(v); }},
             {"traj_stride", [](auto& c, auto& p, auto& v) { c.traj_stride = p.int32(v); }},
             {"timing", [](auto& c, auto& p, auto& v) { c.timing = p.boolean(v); }},
         }},
        {"oracle",
         {
             {"n_mc", [](auto& c, auto& p, auto& v) { c.n_mc = p.int32(v); }},
             {"u_factor", [](auto& c, auto& p, auto& v) { c.u_factor = p.number(v); }},
             {"scan_points", [](auto& c, auto& p, auto& v) { c.scan_points = p.int32(v); }},
             {"upper", [](auto& c, auto& p, auto& v) { c.upper = p.number_or_auto(v); }},
         }},
    };
    return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    const auto& table = setters();
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find_first_of("#;");
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error("config line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!table.count(section))
                throw Error("config line " + std::to_string(lineno) + ": unknown section [" +
                            section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw Error("config line " + std::to_string(lineno) + ": key '" + key +
                        "' outside of a section");
        const auto& keys = table.at(section);
        const auto it = keys.find(key);
        if (it == keys.end())
            throw Error("config line " + std::to_string(lineno) + ": unknown key '" + key +
                        "' in [" + section + "]");
        if (value.empty())
            throw Error("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");
        it->second(cfg, ParseContext{lineno, key}, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

double default_gamma(Algorithm a, double upper, int lead_time, int horizon) {
    const double T = static_cast<double>(horizon);
    if (a == Algorithm::LSL)
        return upper * std::pow(lead_time + 1.0, 2.0 / 3.0) / std::cbrt(T);
    return upper / std::sqrt(T);
}

namespace {

std::vector<double> linspace(double hi, int points) {
    std::vector<double> v(static_cast<std::size_t>(points) + 1);
    for (int i = 0; i <= points; ++i)
        v[static_cast<std::size_t>(i)] = hi * i / points;
    return v;
}

}  // namespace

ReplicationSetup prepare_replication(const ExperimentConfig& cfg, int s_requested, int replication) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(replication);
    Rng srng(derive_seed(seed, 0, "schedule"));
    ReplicationSetup rep{
        .replication = replication,
        .s_requested = s_requested,
        .seed = seed,
        .schedule = make_schedule(s_requested, cfg.horizon, cfg.family, cfg.ranges, srng),
        .upper = 0.0,
        .sigma = 1.0,
        .demands = {},
        .table = {},
    };
    const auto& segs = rep.schedule.segments();
    const int L = cfg.lead_time;

    double sd_max = 0.0;
    for (const auto& s : segs)
        sd_max = std::max(sd_max, stddev(s.family));
    rep.sigma = cfg.sigma ? *cfg.sigma : std::max(sd_max, 1e-6);

    if (cfg.upper) {
        rep.upper = *cfg.upper;
    } else {
        double star_max = 0.0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const DemandFamily& f = segs[i].family;
            const double bound = (L + 1.0) * (mean(f) + 6.0 * stddev(f)) + 1.0;
            Rng r(derive_seed(seed, i, "scan"));
            const auto levels = linspace(bound, cfg.scan_points);
            const OptimalTau o =
                optimal_tau_on_levels(f, levels, cfg.model, L, cfg.cost, cfg.n_mc, r);
            star_max = std::max(star_max, o.tau_star);
        }
        rep.upper = cfg.u_factor * star_max;
        if (!(rep.upper > 0.0))
            rep.upper = 1.0;
    }

    const Algorithm alg = algorithm_for(cfg.model, L);
    const double gamma = cfg.gamma ? *cfg.gamma : default_gamma(alg, rep.upper, L, cfg.horizon);
    const PolicyGrid grid(gamma, rep.upper);
    rep.table = build_oracle_table(rep.schedule, grid.levels(), cfg.model, L, cfg.cost, cfg.n_mc,
                                   derive_seed(seed, 0, "oracle"));

    Rng drng(derive_seed(seed, 0, "demand"));
    rep.demands.resize(static_cast<std::size_t>(cfg.horizon));
    for (int t = 1; t <= cfg.horizon; ++t)
        rep.demands[static_cast<std::size_t>(t - 1)] = sample(rep.schedule.family_at(t), drng);
    return rep;
}

std::vector<AlgorithmSpec> algorithms_for(const ExperimentConfig& cfg, const ReplicationSetup& rep) {
    const Algorithm alg = algorithm_for(cfg.model, cfg.lead_time);
    AlgoConfig base;
    base.which = alg;
    base.conf.delta = cfg.delta_value();
    base.conf.gamma = cfg.gamma ? *cfg.gamma
                                : default_gamma(alg, rep.upper, cfg.lead_time, cfg.horizon);
    base.conf.sigma = rep.sigma;
    base.conf.scale = cfg.scale;
    base.conf.change_scale = cfg.change_scale.value_or(0.0);
    base.conf.horizon = cfg.horizon;
    base.conf.upper = rep.upper;
    base.conf.lead_time = cfg.lead_time;
    base.conf.cost = cfg.cost;
    base.detection_scope = cfg.detection_scope;
    base.interval_mode = cfg.interval_mode;
    base.max_per_anchor = cfg.max_per_anchor;

    const std::string suffix = std::string(to_string(alg)).substr(5);
    std::vector<AlgorithmSpec> out;
    if (cfg.run_nsic)
        out.push_back({to_string(alg), base, NoRestart{}});
    AlgoConfig stationary = base;
    stationary.detect_changes = false;
    if (cfg.run_schedule) {
        const int period = (cfg.horizon + rep.s_requested - 1) / rep.s_requested;
        out.push_back({"Schedule-" + suffix, stationary, FixedRestart{period}});
    }
    if (cfg.run_oracle)
        out.push_back({"Oracle-" + suffix, stationary, OracleRestart{rep.schedule.change_points()}});
    return out;
}

SimulationResult simulate(const AlgorithmSpec& spec, std::span<const double> demands,
                          std::uint64_t seed) {
    const Model model = model_of(spec.config.which);
    const CostParams cost = spec.config.conf.cost;
    Agent agent(spec.config, spec.policy, seed);
    InventoryState state = InventoryState::zero(spec.config.conf.lead_time);
    SimulationResult res;
    res.played.reserve(demands.size());
    double level = agent.begin(state);
    for (std::size_t i = 0; i < demands.size(); ++i) {
        const int t = static_cast<int>(i) + 1;
        StepOutcome out = transition(state, base_stock_order(state, level), demands[i], model, cost);
        res.played.push_back(level);
        level = agent.step(t, out.observation, out.next_state);
        state = std::move(out.next_state);
    }
    res.restarts = agent.restarts();
    res.epochs = agent.epochs();
    return res;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    struct Job {
        int s;
        int rep;
    };
    std::vector<Job> jobs;
    for (const auto& spec : cfg.segments) {
        const int s = spec.resolve(cfg.horizon, cfg.c_constant);
        for (int r = 0; r < cfg.replications; ++r)
            jobs.push_back({s, r});
    }
    std::vector<std::vector<RunRecord>> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size())
                return;
            try {
                const ReplicationSetup rep = prepare_replication(cfg, jobs[j].s, jobs[j].rep);
                for (const AlgorithmSpec& spec : algorithms_for(cfg, rep)) {
                    const auto t0 = std::chrono::steady_clock::now();
                    const SimulationResult sim =
                        simulate(spec, rep.demands, derive_seed(rep.seed, 0, "agent:" + spec.name));
                    const auto t1 = std::chrono::steady_clock::now();
                    const RegretResult reg = dynamic_regret(sim.played, rep.schedule, rep.table);
                    RunRecord rec;
                    rec.run_id = spec.name + "_L" + std::to_string(cfg.lead_time) + "_S" +
                                 std::to_string(rep.s_requested) + "_r" +
                                 std::to_string(rep.replication);
                    rec.algorithm = spec.name;
                    rec.model = cfg.model;
                    rec.lead_time = cfg.lead_time;
                    rec.s_requested = rep.s_requested;
                    rec.s_realized = rep.schedule.segment_count();
                    rec.replication = rep.replication;
                    rec.seed = rep.seed;
                    rec.horizon = cfg.horizon;
                    rec.dynamic_regret = reg.total;
                    rec.relative_regret_pct = relative_regret(reg.total, rep.schedule, rep.table);
                    rec.restarts = sim.restarts;
                    rec.epochs = sim.epochs;
                    rec.wall_ms = cfg.timing
                                      ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                                      : 0.0;
                    rec.upper = rep.upper;
                    if (cfg.traj_stride > 0) {
                        for (int t = cfg.traj_stride; t <= cfg.horizon; t += cfg.traj_stride)
                            rec.trajectory.emplace_back(t, reg.trajectory[static_cast<std::size_t>(t - 1)]);
                        if (cfg.horizon % cfg.traj_stride != 0)
                            rec.trajectory.emplace_back(cfg.horizon, reg.total);
                    }
                    results[j].push_back(std::move(rec));
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(jobs.size());
                return;
            }
        }
    };

    const int n = std::min<int>(cfg.workers, static_cast<int>(jobs.size()));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<RunRecord> out;
    for (auto& r : results)
        for (auto& rec : r)
            out.push_back(std::move(rec));
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
    if (records.empty())
        throw Error("summarize needs at least one record");
    using Key = std::tuple<std::string, int, int, int>;
    std::vector<Key> order;
    std::map<Key, std::vector<const RunRecord*>> groups;
    for (const auto& r : records) {
        Key k{r.algorithm, static_cast<int>(r.model), r.lead_time, r.s_requested};
        auto [it, fresh] = groups.try_emplace(k);
        if (fresh)
            order.push_back(k);
        it->second.push_back(&r);
    }
    auto stats = [](const std::vector<double>& xs, double& m, double& se, double& lo, double& hi) {
        const double n = static_cast<double>(xs.size());
        m = 0.0;
        for (double x : xs)
            m += x;
        m /= n;
        double ss = 0.0;
        for (double x : xs)
            ss += (x - m) * (x - m);
        se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
        lo = *std::min_element(xs.begin(), xs.end());
        hi = *std::max_element(xs.begin(), xs.end());
    };
    std::vector<SummaryRow> rows;
    for (const Key& k : order) {
        const auto& g = groups.at(k);
        SummaryRow row;
        row.algorithm = std::get<0>(k);
        row.model = g.front()->model;
        row.lead_time = std::get<2>(k);
        row.s_requested = std::get<3>(k);
        row.n = static_cast<int>(g.size());
        std::vector<double> reg, rel;
        double restarts = 0.0;
        for (const RunRecord* r : g) {
            reg.push_back(r->dynamic_regret);
            rel.push_back(r->relative_regret_pct);
            restarts += r->restarts;
        }
        stats(reg, row.mean_regret, row.stderr_regret, row.min_regret, row.max_regret);
        stats(rel, row.mean_rel, row.stderr_rel, row.min_rel, row.max_rel);
        row.mean_restarts = restarts / row.n;
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::string g6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

std::string runs_csv(const std::vector<RunRecord>& records) {
    std::string out =
        "run_id,algorithm,model,lead_time,S_requested,S_realized,replication,seed,T,"
        "dynamic_regret,relative_regret_pct,restarts,epochs,wall_ms\n";
    for (const auto& r : records) {
        out += r.run_id + ',' + r.algorithm + ',' + to_string(r.model) + ',' +
               std::to_string(r.lead_time) + ',' + std::to_string(r.s_requested) + ',' +
               std::to_string(r.s_realized) + ',' + std::to_string(r.replication) + ',' +
               std::to_string(r.seed) + ',' + std::to_string(r.horizon) + ',' +
               g6(r.dynamic_regret) + ',' + g6(r.relative_regret_pct) + ',' +
               std::to_string(r.restarts) + ',' + std::to_string(r.epochs) + ',' + g6(r.wall_ms) +
               '\n';
    }
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out =
        "algorithm,model,lead_time,S_requested,n,mean_dynamic_regret,stderr_dynamic_regret,"
        "min_dynamic_regret,max_dynamic_regret,mean_relative_regret_pct,stderr_relative_regret_pct,"
        "min_relative_regret_pct,max_relative_regret_pct,mean_restarts\n";
    for (const auto& r : rows) {
        out += r.algorithm + ',' + to_string(r.model) + ',' + std::to_string(r.lead_time) + ',' +
               std::to_string(r.s_requested) + ',' + std::to_string(r.n) + ',' + g6(r.mean_regret) +
               ',' + g6(r.stderr_regret) + ',' + g6(r.min_regret) + ',' + g6(r.max_regret) + ',' +
               g6(r.mean_rel) + ',' + g6(r.stderr_rel) + ',' + g6(r.min_rel) + ',' +
               g6(r.max_rel) + ',' + g6(r.mean_restarts) + '\n';
    }
    return out;
}

std::string trajectory_csv(const RunRecord& record, int /*stride*/) {
    std::string out = "t,cum_regret\n";
    for (const auto& [t, v] : record.trajectory)
        out += std::to_string(t) + ',' + g6(v) + '\n';
    return out;
}

void write_outputs(const std::string& dir, const std::vector<RunRecord>& records, int stride) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto put = [](const fs::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary);
        if (!f)
            throw Error("cannot write '" + p.string() + "'");
        f << text;
    };
    put(fs::path(dir) / "runs.csv", runs_csv(records));
    put(fs::path(dir) / "summary.csv", summary_csv(summarize(records)));
    if (stride > 0)
        for (const auto& r : records)
            put(fs::path(dir) / ("traj_" + r.run_id + ".csv"), trajectory_csv(r, stride));
}

OracleTable experiment_oracle(const ExperimentConfig& cfg) {
    cfg.validate();
    const int s = cfg.segments.front().resolve(cfg.horizon, cfg.c_constant);
    return prepare_replication(cfg, s, 0).table;
}

}  // namespace nsic

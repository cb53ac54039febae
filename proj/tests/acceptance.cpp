#include "nsic/baselines.hpp"
#include "nsic/demand.hpp"
#include "nsic/estimation.hpp"
#include "nsic/harness.hpp"
#include "nsic/verification.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#ifndef NSIC_CONFIG_DIR
#define NSIC_CONFIG_DIR "configs"
#endif

using namespace nsic;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int default_workers() {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c = load_config(std::string(NSIC_CONFIG_DIR) + "/" + name);
    c.workers = default_workers();
    c.timing = false;
    return c;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs)
        s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

EquivalenceReport equivalence_run(double& secs) {
    const auto t0 = std::chrono::steady_clock::now();
    EquivalenceReport rep = counterfactual_equivalence(1000, 20240601);
    secs = seconds_since(t0);
    return rep;
}

Outcome criterion1() {
    double secs = 0.0;
    const EquivalenceReport r = equivalence_run(secs);
    Outcome o;
    o.pass = r.scenarios == 1000 && r.comparisons > 0 && r.max_abs_diff <= 1e-12 && secs < 60.0;
    o.detail = fmt("%d scenarios, %lld comparisons, %d resets, max |diff| %.3g, %.2f s", r.scenarios,
                   r.comparisons, r.resets, r.max_abs_diff, secs);
    if (!r.first_failure.empty())
        o.detail += "; first failure: " + r.first_failure;
    return o;
}

Outcome criterion2() {
    double secs = 0.0;
    const EquivalenceReport r = equivalence_run(secs);
    Outcome o;
    o.pass = r.dominance_checks > 0 && r.cap_checks > 0 && r.dominance_violations == 0 &&
             r.cap_violations == 0;
    o.detail = fmt("dominance %lld/%lld violations, position cap %lld/%lld violations",
                   r.dominance_violations, r.dominance_checks, r.cap_violations, r.cap_checks);
    return o;
}

Outcome criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    const double lambda = 50.0, tau = 60.0;
    const int n = 500, trials = 1000;
    CostParams cost;
    // exact mean: available stock is τ every period, sales min(D, τ)
    double pmf = std::exp(-lambda), expected_sales = 0.0, tail = 1.0;
    for (int k = 0; k < static_cast<int>(tau); ++k) {
        expected_sales += k * pmf;
        tail -= pmf;
        pmf *= lambda / (k + 1);
    }
    expected_sales += tau * tail;
    const double mu = cost.h * tau - (cost.h + cost.b) * expected_sales;

    ConfidenceParams p;
    p.delta = 0.05;
    p.horizon = n;
    p.upper = tau;
    p.gamma = tau / std::sqrt(static_cast<double>(n));
    p.lead_time = 0;
    p.cost = cost;
    const double radius = conf_radius(p, Model::LostSales, n);

    Rng rng(derive_seed(3, 0, "coverage"));
    const DemandFamily fam = Poisson{lambda};
    std::vector<double> d(n);
    int covered = 0;
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
        for (double& x : d)
            x = sample(fam, rng);
        const FixedPolicyTrace tr = simulate_fixed(tau, d, Model::LostSales, 0, cost);
        const double err = std::abs(mean_of(tr.pseudo) - mu);
        worst = std::max(worst, err);
        if (err <= radius)
            ++covered;
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = covered >= 950 && secs < 60.0;
    o.detail = fmt("coverage %d/%d, mu %.4f, b %.4g (T=%d, U=%g, gamma=%.4g), max |err| %.4g, %.2f s",
                   covered, trials, mu, radius, n, tau, p.gamma, worst, secs);
    return o;
}

Outcome criterion4() {
    const auto t0 = std::chrono::steady_clock::now();
    const char* presets[] = {"backlog_L0.ini", "lost_sales_L0.ini", "lost_sales_L2.ini"};
    const FamilyKind families[] = {FamilyKind::TruncNormal, FamilyKind::Uniform,
                                   FamilyKind::Poisson, FamilyKind::Exponential};
    bool all = true;
    std::string cells;
    for (const char* name : presets)
        for (FamilyKind f : families) {
            ExperimentConfig c = preset(name);
            c.family = f;
            c.segments = {SegmentSpec{"1"}};
            c.horizon = 10000;
            c.delta.reset();
            c.run_schedule = c.run_oracle = false;
            c.replications = 20;
            const auto records = run_experiment(c);
            int zero = 0;
            for (const RunRecord& r : records)
                zero += r.restarts == 0 ? 1 : 0;
            const bool ok = zero >= 0.95 * static_cast<double>(records.size());
            all = all && ok;
            cells += fmt(" %s/%s %d/%zu", records.front().algorithm.c_str(), to_string(f), zero,
                         records.size());
        }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = all && secs < 600.0;
    o.detail = "zero-restart runs:" + cells + fmt("; %.1f s", secs);
    return o;
}

Outcome criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    const int T = 10000;
    const auto [fa, fb] = lower_bound_pair(T);
    CostParams cost;
    cost.h = 1.0;
    cost.b = 1.0;
    const SystemConfig sys{Model::Backlog, 0, 420.0, T};
    Rng ra(derive_seed(5, 0, "lower-bound-a"));
    Rng rb(derive_seed(5, 0, "lower-bound-b"));
    const OptimalTau a = optimal_tau(fa, sys, cost, 0.25, 100000, ra);
    const OptimalTau b = optimal_tau(fb, sys, cost, 0.25, 100000, rb);
    // continuous minimizer of E|D − τ| (h = b) is the median
    const auto median = [](const DemandFamily& f) {
        double lo = 0.0, hi = 420.0;
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            (cdf(f, mid) < 0.5 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = a.tau_star > 2.0 && a.tau_star < 4.0 && b.tau_star > 400.0 && b.tau_star < 402.0 &&
             secs < 120.0;
    o.detail = fmt("grid argmin F^a %.2f (median %.4f), F^b %.2f (median %.4f), %.1f s",
                   a.tau_star, median(fa), b.tau_star, median(fb), secs);
    return o;
}

Outcome criterion6() {
    const SystemConfig sys{Model::Backlog, 2, 40.0, 5000};
    Rng rng(derive_seed(6, 0, "steady-state"));
    const OracleEstimate e = mu_oracle(Poisson{10.0}, 25.0, sys, CostParams{}, 5000, rng);
    Outcome o;
    o.pass = std::abs(e.mean_available - 5.0) <= 3.0 * e.stderr_available;
    o.detail = fmt("mean pre-demand on-hand %.4f, stderr %.4f, |dev|/se %.2f", e.mean_available,
                   e.stderr_available, std::abs(e.mean_available - 5.0) / e.stderr_available);
    return o;
}

Outcome criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, ExperimentConfig>> configs;
    configs.emplace_back("defaults", parse_config(""));
    for (const char* name : {"backlog_L0.ini", "lost_sales_L0.ini", "lost_sales_L2.ini",
                             "uniform_S100.ini", "backlog_scaling.ini"})
        configs.emplace_back(name, preset(name));
    std::size_t tables = 0, segments = 0, convex = 0, lipschitz = 0;
    std::string detail;
    for (const auto& [name, c] : configs) {
        for (int rep = 0; rep < 3; ++rep) {
            const int s = c.segments.front().resolve(c.horizon, c.c_constant);
            const ReplicationSetup setup = prepare_replication(c, s, rep);
            const auto cv = convexity_violations(setup.table);
            const auto lv = lipschitz_violations(setup.table, c.cost);
            ++tables;
            segments += setup.table.segment_count();
            convex += cv.size();
            lipschitz += lv.size();
            if ((!cv.empty() || !lv.empty()) && detail.empty())
                detail = fmt("; first offender %s replication %d", name.c_str(), rep);
        }
    }
    Outcome o;
    o.pass = convex == 0 && lipschitz == 0;
    o.detail = fmt("%zu tables, %zu segments, %zu convexity and %zu Lipschitz violations, %.1f s",
                   tables, segments, convex, lipschitz, seconds_since(t0)) +
               detail;
    return o;
}

Outcome criterion8() {
    const auto t0 = std::chrono::steady_clock::now();
    bool all = true;
    std::string detail;
    for (const char* name : {"backlog_L0.ini", "lost_sales_L0.ini"}) {
        ExperimentConfig c = preset(name);
        c.replications = 50;
        c.run_schedule = c.run_oracle = false;
        const auto rows = summarize(run_experiment(c));
        const SummaryRow& r = rows.front();
        const bool ok = r.mean_rel >= 2.0 && r.mean_rel <= 15.0;
        all = all && ok;
        detail += fmt("%s%s %.2f%% (se %.2f, scale %g, change scale %g)", detail.empty() ? "" : "; ",
                      r.algorithm.c_str(), r.mean_rel, r.stderr_rel, c.scale,
                      c.change_scale.value_or(c.scale));
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = all && secs < 900.0;
    o.detail = detail + fmt("; %.1f s", secs);
    return o;
}

Outcome criterion9() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig c = preset("uniform_S100.ini");
    c.replications = 30;
    c.run_schedule = true;
    c.run_oracle = false;
    const auto records = run_experiment(c);
    std::map<int, double> nsic, sched;
    for (const RunRecord& r : records)
        (r.algorithm.rfind("NSIC", 0) == 0 ? nsic : sched)[r.replication] = r.dynamic_regret;
    int wins = 0;
    std::vector<double> a, b;
    for (const auto& [rep, regret] : nsic) {
        wins += regret < sched.at(rep) ? 1 : 0;
        a.push_back(regret);
        b.push_back(sched.at(rep));
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = wins >= 0.7 * static_cast<double>(nsic.size()) && secs < 1200.0;
    o.detail = fmt("NSIC-LS better in %d/%zu pairs, mean regret %.4g vs %.4g (S=%d), %.1f s", wins,
                   nsic.size(), mean_of(a), mean_of(b),
                   c.segments.front().resolve(c.horizon, c.c_constant), secs);
    return o;
}

Outcome criterion10() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> per_t;
    std::string detail;
    for (int T : {2500, 5000, 10000}) {
        ExperimentConfig c = preset("backlog_scaling.ini");
        c.horizon = T;
        c.replications = 20;
        c.run_schedule = c.run_oracle = false;
        c.segments = {SegmentSpec{"5"}};
        const auto rows = summarize(run_experiment(c));
        per_t.push_back(rows.front().mean_regret / T);
        detail += fmt(" T=%d %.4g", T, per_t.back());
    }
    Outcome o;
    o.pass = per_t[0] > per_t[1] && per_t[1] > per_t[2];
    o.detail = "regret/T:" + detail + fmt("; %.1f s", seconds_since(t0));
    return o;
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>>& criteria() {
    static const std::map<int, std::pair<const char*, std::function<Outcome()>>> table{
        {1, {"counterfactual equivalence", criterion1}},
        {2, {"dominance and position cap", criterion2}},
        {3, {"concentration coverage", criterion3}},
        {4, {"no false restarts", criterion4}},
        {5, {"lower-bound pair optima", criterion5}},
        {6, {"backlog steady state", criterion6}},
        {7, {"convexity and Lipschitz numerics", criterion7}},
        {8, {"stationary relative regret", criterion8}},
        {9, {"non-stationary ordering", criterion9}},
        {10, {"regret scaling", criterion10}},
    };
    return table;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    int which = 0;
    app.add_option("--criterion", which, "criterion number (default: all)")
        ->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    for (const auto& [n, entry] : criteria()) {
        if (which != 0 && which != n)
            continue;
        Outcome o;
        try {
            o = entry.second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, entry.first,
                    o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}

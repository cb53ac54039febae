#include "nsic/verification.hpp"

#include "nsic/baselines.hpp"
#include "nsic/counterfactual.hpp"
#include "nsic/demand.hpp"
#include "nsic/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nsic {

namespace {

struct Track {
    int start = -1;  // first period covered by `ref`, -1 when untracked
    FixedPolicyTrace ref;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

void run_scenario(std::uint64_t seed, EquivalenceReport& rep) {
    Rng rng(seed);
    const Model model = uniform01(rng) < 0.5 ? Model::Backlog : Model::LostSales;
    const int leads[] = {0, 2, 5};
    const int L = leads[uniform_index(rng, 3)];
    const double U = uniform_real(rng, 5.0, 120.0);
    const double gamma = uniform_real(rng, U / 60.0, U / 4.0);
    const PolicyGrid grid(gamma, U);
    const FamilyKind kinds[] = {FamilyKind::TruncNormal, FamilyKind::Uniform, FamilyKind::Poisson,
                                FamilyKind::Exponential};
    const DemandFamily fam = draw_family(kinds[uniform_index(rng, 4)], ParamRanges{}, rng);
    CostParams cost;
    cost.h = uniform_real(rng, 0.5, 3.0);
    cost.b = uniform_real(rng, 1.0, 60.0);
    const int n = 120;
    std::vector<double> d(n);
    for (double& x : d)
        x = sample(fam, rng);

    CounterfactualBank bank = CounterfactualBank::init_zero(grid, L);
    const std::size_t G = grid.size();
    std::vector<Track> track(G);
    std::vector<char> touched(G, 0);
    auto begin_track = [&](std::size_t i, int t, const InventoryState& init) {
        track[i].start = t;
        const std::span<const double> rest(d.data() + t, d.size() - static_cast<std::size_t>(t));
        track[i].ref = simulate_fixed(grid[i], rest, model, L, cost, &init);
    };
    auto compare = [&](const std::vector<LevelCost>& costs, int t, double factual_avail) {
        for (const LevelCost& lc : costs) {
            Track& tr = track[lc.level];
            if (tr.start < 0)
                continue;
            const double ref = tr.ref.pseudo[static_cast<std::size_t>(t - tr.start)];
            const double diff = std::abs(ref - lc.cost);
            ++rep.comparisons;
            rep.max_abs_diff = std::max(rep.max_abs_diff, diff);
            if (diff > 1e-12 && rep.first_failure.empty())
                rep.first_failure = std::string(to_string(model)) + " L=" + std::to_string(L) +
                                    " seed " + std::to_string(seed) + " level " +
                                    std::to_string(lc.level) + fmt(" t=%g bank=%.17g ref=%.17g", t,
                                                                   lc.cost, ref);
            if (model == Model::LostSales) {
                ++rep.dominance_checks;
                if (bank.last_available(lc.level) > factual_avail + 1e-9)
                    ++rep.dominance_violations;
            }
            ++rep.cap_checks;
            if (inventory_position(bank.state(lc.level)) > grid[lc.level] + 1e-9)
                ++rep.cap_violations;
        }
    };

    if (model == Model::Backlog) {
        for (std::size_t i = 0; i < G; ++i)
            begin_track(i, 0, InventoryState::zero(L));
        for (int t = 0; t < n; ++t)
            compare(bank.advance_backlog(d[static_cast<std::size_t>(t)], cost), t, 0.0);
        return;
    }

    // lost sales: non-decreasing plays from a random level, optional reset
    std::size_t played = uniform_index(rng, G);
    const bool with_reset = uniform01(rng) < 0.7;
    const int reset_at = 20 + static_cast<int>(uniform_index(rng, 60));
    bool reducing = false;
    bool reset_done = false;
    InventoryState factual = InventoryState::zero(L);
    for (int t = 0; t < n; ++t) {
        if (with_reset && !reset_done && !reducing && t == reset_at) {
            played = uniform_index(rng, played + 1);
            reducing = true;
        }
        if (reducing && inventory_position(factual) <= grid[played] + 1e-9) {
            bank.reset_lsl(factual, grid[played]);
            ++rep.resets;
            for (std::size_t i = 0; i < G; ++i) {
                track[i].start = -1;
                if (i <= played) {
                    begin_track(i, t, reset_state(factual, grid[i]));
                    touched[i] = 1;
                }
            }
            reducing = false;
            reset_done = true;
        } else if (!reducing && !reset_done && t > 0 && uniform01(rng) < 0.05) {
            played = played + uniform_index(rng, G - played);
        } else if (!reducing && reset_done && t > 0 && uniform01(rng) < 0.05) {
            played = played + uniform_index(rng, G - played);
        }
        const double level = grid[played];
        StepOutcome out = transition(factual, base_stock_order(factual, level),
                                     d[static_cast<std::size_t>(t)], Model::LostSales, cost);
        if (!reducing) {
            for (std::size_t i = 0; i <= played; ++i)
                if (!touched[i]) {
                    touched[i] = 1;
                    // a fresh zero-state system is only comparable without lead time
                    if (track[i].start < 0 && (t == 0 || L == 0))
                        begin_track(i, t, InventoryState::zero(L));
                }
            compare(bank.advance_lost_sales(played + 1, level, out.sales, cost), t, out.available);
        }
        factual = std::move(out.next_state);
    }
}

template <class F>
SelftestItem check(const std::string& name, F&& body) {
    SelftestItem item{name, false, ""};
    try {
        item.detail = body(item.pass);
    } catch (const std::exception& e) {
        item.pass = false;
        item.detail = std::string("exception: ") + e.what();
    }
    return item;
}

}  // namespace

EquivalenceReport counterfactual_equivalence(int scenarios, std::uint64_t seed) {
    EquivalenceReport rep;
    for (int s = 0; s < scenarios; ++s) {
        run_scenario(derive_seed(seed, static_cast<std::uint64_t>(s), "equivalence"), rep);
        ++rep.scenarios;
    }
    return rep;
}

std::vector<SelftestItem> run_selftest() {
    std::vector<SelftestItem> items;

    const EquivalenceReport eq = counterfactual_equivalence(200, 7);
    items.push_back(check("counterfactual equivalence", [&](bool& ok) {
        ok = eq.max_abs_diff <= 1e-12 && eq.comparisons > 0;
        return fmt("max |diff| = %.3g over %g comparisons", eq.max_abs_diff,
                   static_cast<double>(eq.comparisons)) +
               (eq.first_failure.empty() ? "" : "; " + eq.first_failure);
    }));
    items.push_back(check("dominance and position cap", [&](bool& ok) {
        ok = eq.dominance_violations == 0 && eq.cap_violations == 0;
        return fmt("%g dominance and %g cap violations", static_cast<double>(eq.dominance_violations),
                   static_cast<double>(eq.cap_violations));
    }));
    items.push_back(check("deterministic oracle values", [](bool& ok) {
        CostParams cost;
        SystemConfig sys{Model::LostSales, 0, 20.0, 100};
        Rng rng(1);
        const auto a = mu_oracle(Deterministic{7.0}, 7.0, sys, cost, 50, rng);
        const auto b = mu_oracle(Deterministic{7.0}, 10.0, sys, cost, 50, rng);
        ok = a.pseudo == -343.0 && a.true_cost == 0.0 && b.pseudo == -340.0 && b.true_cost == 3.0;
        return fmt("tau=7: %g, tau=10: %g", a.pseudo, b.pseudo);
    }));
    items.push_back(check("backlog steady state", [](bool& ok) {
        SystemConfig sys{Model::Backlog, 2, 40.0, 100};
        Rng rng(derive_seed(3, 0, "mrp"));
        const auto e = mu_oracle(Poisson{10.0}, 25.0, sys, CostParams{}, 5000, rng);
        ok = std::abs(e.mean_available - 5.0) <= 3.0 * e.stderr_available;
        return fmt("mean on-hand %.4f, stderr %.4f", e.mean_available, e.stderr_available);
    }));
    items.push_back(check("restart schedule", [](bool& ok) {
        AlgoConfig cfg;
        cfg.conf.horizon = 100;
        cfg.conf.upper = 10.0;
        cfg.conf.gamma = 1.0;
        cfg.detect_changes = false;
        Agent agent(cfg, FixedRestart{25}, 1);
        std::vector<int> hits;
        for (int t = 1; t <= 100; ++t)
            if (agent.triggers(t))
                hits.push_back(t);
        ok = hits == std::vector<int>{26, 51, 76};
        std::string s;
        for (int h : hits)
            s += std::to_string(h) + ' ';
        return "fires at " + s;
    }));
    items.push_back(check("config defaults", [](bool& ok) {
        const ExperimentConfig c = parse_config("");
        ok = c.horizon == 10000 && c.cost.h == 1.0 && c.cost.b == 49.0 &&
             c.delta_value() == 1e-8 && SegmentSpec{"logT"}.resolve(10000, 5) == 9;
        return std::string("T, h, b, delta, logT");
    }));
    items.push_back(check("oracle table round trip and shape", [](bool& ok) {
        Rng rng(5);
        const DemandSchedule sched({{1, Poisson{20.0}}, {40, Uniform{10.0, 20.0}}}, 80);
        const PolicyGrid grid(2.0, 50.0);
        const OracleTable t =
            build_oracle_table(sched, grid.levels(), Model::LostSales, 0, CostParams{}, 2000, 11);
        std::stringstream ss;
        t.write(ss);
        const OracleTable back = OracleTable::read(ss);
        bool same = back.levels() == t.levels() && back.segment_count() == t.segment_count();
        for (std::size_t s = 0; same && s < t.segment_count(); ++s)
            for (std::size_t i = 0; i < t.levels().size(); ++i)
                same = same && back.segment(s).values[i].pseudo == t.segment(s).values[i].pseudo;
        const auto cv = convexity_violations(t);
        const auto lv = lipschitz_violations(t, CostParams{});
        ok = same && cv.empty() && lv.empty();
        return fmt("round trip %g, convexity violations %g, Lipschitz violations %g", same ? 1 : 0,
                   static_cast<double>(cv.size()), static_cast<double>(lv.size()));
    }));
    items.push_back(check("reproducible runs", [](bool& ok) {
        ExperimentConfig c = parse_config(
            "[system]\nmodel = lost_sales\nhorizon = 600\n[demand]\nfamily = poisson\nS = 2\n"
            "[algorithms]\nschedule = true\n[run]\nreplications = 2\ntiming = false\n"
            "[oracle]\nn_mc = 500\n");
        const std::string a = runs_csv(run_experiment(c));
        c.workers = 2;
        const std::string b = runs_csv(run_experiment(c));
        ok = a == b;
        return std::string(ok ? "identical CSV" : "CSV differs");
    }));
    return items;
}

}  // namespace nsic

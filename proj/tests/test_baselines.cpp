#include <doctest.h>

#include "nsic/baselines.hpp"

#include <cmath>
#include <sstream>

using namespace nsic;

namespace {

OracleSegment segment_from(const std::vector<double>& pseudo, const std::vector<double>& truth,
                           std::span<const double> levels) {
    OracleSegment seg;
    for (std::size_t i = 0; i < pseudo.size(); ++i) {
        OracleEstimate e;
        e.pseudo = pseudo[i];
        e.true_cost = truth[i];
        seg.values.push_back(e);
    }
    finalize_segment(seg, levels);
    return seg;
}

}  // namespace

TEST_CASE("deterministic demand oracle values") {
    const SystemConfig sys{Model::LostSales, 0, 20.0, 100};
    Rng rng(1);
    const OracleEstimate a = mu_oracle(Deterministic{7.0}, 7.0, sys, CostParams{}, 100, rng);
    CHECK(a.pseudo == -343.0);
    CHECK(a.true_cost == 0.0);
    const OracleEstimate b = mu_oracle(Deterministic{7.0}, 10.0, sys, CostParams{}, 100, rng);
    CHECK(b.pseudo == -340.0);
    CHECK(b.true_cost == 3.0);
}

TEST_CASE("optimal levels for point-mass demand") {
    Rng rng(2);
    const OptimalTau ls =
        optimal_tau(Deterministic{7.0}, SystemConfig{Model::LostSales, 0, 20.0, 100}, CostParams{},
                    0.5, 200, rng);
    CHECK(ls.tau_star == 7.0);
    const OptimalTau bl =
        optimal_tau(Deterministic{7.0}, SystemConfig{Model::Backlog, 2, 30.0, 100}, CostParams{},
                    0.5, 200, rng);
    CHECK(bl.tau_star == 21.0);
}

TEST_CASE("backlog steady state on-hand") {
    const SystemConfig sys{Model::Backlog, 2, 40.0, 5000};
    Rng rng(derive_seed(3, 0, "mrp"));
    const OracleEstimate e = mu_oracle(Poisson{10.0}, 25.0, sys, CostParams{}, 5000, rng);
    CHECK(std::abs(e.mean_available - 5.0) <= 3.0 * e.stderr_available);
}

TEST_CASE("lower-bound instance A has its optimum near four") {
    Rng rng(4);
    const auto [fa, fb] = lower_bound_pair(10000);
    const OptimalTau a = optimal_tau(fa, SystemConfig{Model::Backlog, 0, 10.0, 10000},
                                     CostParams{1.0, 1.0}, 0.25, 50000, rng);
    CHECK(a.tau_star >= 2.0);
    CHECK(a.tau_star <= 4.0);
}

TEST_CASE("batch means standard error") {
    const std::vector<double> flat(1000, 3.0);
    CHECK(batch_mean_stderr(flat) == 0.0);
    Rng rng(5);
    std::vector<double> xs(25000);
    for (double& x : xs)
        x = uniform01(rng);
    CHECK(batch_mean_stderr(xs) == doctest::Approx(std::sqrt(1.0 / 12.0 / 25000.0)).epsilon(0.4));
}

TEST_CASE("restart policies") {
    AlgoConfig cfg;
    cfg.conf.horizon = 100;
    cfg.conf.upper = 10.0;
    cfg.conf.gamma = 1.0;
    cfg.detect_changes = false;

    Agent never(cfg, FixedRestart{100}, 1);
    for (int t = 2; t <= 100; ++t)
        CHECK_FALSE(never.triggers(t));

    Agent oracle(cfg, OracleRestart{{50}}, 1);
    for (int t = 1; t <= 100; ++t)
        CHECK(oracle.triggers(t) == (t == 50));

    Agent fixed(cfg, FixedRestart{25}, 1);
    std::vector<int> hits;
    for (int t = 1; t <= 100; ++t)
        if (fixed.triggers(t))
            hits.push_back(t);
    CHECK(hits == std::vector<int>{26, 51, 76});
    CHECK_THROWS_AS(Agent(cfg, FixedRestart{0}, 1), Error);
}

TEST_CASE("dynamic regret against a hand-built table") {
    const std::vector<double> levels{0.0, 1.0, 2.0};
    std::vector<OracleSegment> segs{segment_from({5.0, 3.0, 4.0}, {5.0, 3.0, 4.0}, levels)};
    const OracleTable table(levels, segs, 1000, 1);
    const DemandSchedule sched({{1, Poisson{1.0}}}, 1);
    CHECK(dynamic_regret(std::vector<double>{1.0}, sched, table).total == 0.0);
    CHECK(dynamic_regret(std::vector<double>{0.0}, sched, table).total == 2.0);

    const DemandSchedule two({{1, Poisson{1.0}}, {3, Poisson{2.0}}}, 4);
    std::vector<OracleSegment> segs2{segment_from({5.0, 3.0, 4.0}, {5.0, 3.0, 4.0}, levels),
                                     segment_from({1.0, 2.0, 0.0}, {1.0, 2.0, 0.0}, levels)};
    const OracleTable t2(levels, segs2, 1000, 1);
    const RegretResult r = dynamic_regret(std::vector<double>{1.0, 2.0, 2.0, 0.0}, two, t2);
    CHECK(r.total == 2.0);
    CHECK(r.trajectory == std::vector<double>{0.0, 1.0, 1.0, 2.0});
}

TEST_CASE("relative regret") {
    const std::vector<double> levels{0.0, 1.0};
    std::vector<OracleSegment> segs{segment_from({0.0, 1.0}, {100.0, 101.0}, levels)};
    const OracleTable table(levels, segs, 1000, 1);
    const DemandSchedule sched({{1, Poisson{1.0}}}, 10);
    CHECK(optimal_cost_sum(sched, table) == 1000.0);
    CHECK(relative_regret(50.0, sched, table) == 5.0);
    CHECK(relative_regret(0.0, sched, table) == 0.0);

    std::vector<OracleSegment> zero{segment_from({0.0, 0.0}, {0.0, 0.0}, levels)};
    const OracleTable zt(levels, zero, 1000, 1);
    CHECK_THROWS_AS(relative_regret(1.0, sched, zt), Error);
}

TEST_CASE("oracle table round trip and shape checks") {
    const DemandSchedule sched({{1, Poisson{20.0}}, {40, Uniform{10.0, 20.0}}}, 80);
    const PolicyGrid grid(2.0, 50.0);
    for (Model m : {Model::Backlog, Model::LostSales}) {
        const OracleTable t = build_oracle_table(sched, grid.levels(), m, 0, CostParams{}, 2000, 11);
        std::stringstream ss;
        t.write(ss);
        const OracleTable back = OracleTable::read(ss);
        REQUIRE(back.segment_count() == 2);
        CHECK(back.levels() == t.levels());
        CHECK(back.mc_horizon() == 2000);
        for (std::size_t s = 0; s < 2; ++s) {
            CHECK(back.segment(s).tau_star == t.segment(s).tau_star);
            for (std::size_t i = 0; i < t.levels().size(); ++i)
                CHECK(back.segment(s).values[i].pseudo == t.segment(s).values[i].pseudo);
        }
        CHECK(convexity_violations(t).empty());
        CHECK(lipschitz_violations(t, CostParams{}).empty());
    }
    std::stringstream bad("segment,tau,pseudo,true,stderr\n0,1,x,2,3\n");
    CHECK_THROWS_AS(OracleTable::read(bad), Error);
}

TEST_CASE("shape checks flag a concave kink") {
    const std::vector<double> levels{0.0, 1.0, 2.0};
    std::vector<OracleSegment> segs{segment_from({0.0, 5.0, 0.0}, {0.0, 5.0, 0.0}, levels)};
    const OracleTable t(levels, segs, 1000, 1);
    CHECK(convexity_violations(t).size() == 1);
    CHECK(lipschitz_violations(t, CostParams{1.0, 2.0}).size() == 2);
}

TEST_CASE("fixed policy simulation matches transitions") {
    const std::vector<double> d{3.0, 0.0, 8.0, 2.0};
    const FixedPolicyTrace tr = simulate_fixed(5.0, d, Model::LostSales, 1, CostParams{});
    InventoryState s = InventoryState::zero(1);
    for (std::size_t t = 0; t < d.size(); ++t) {
        const StepOutcome o = transition(s, base_stock_order(s, 5.0), d[t], Model::LostSales,
                                         CostParams{});
        CHECK(tr.pseudo[t] == o.pseudo_cost);
        CHECK(tr.available[t] == o.available);
        s = o.next_state;
    }
}

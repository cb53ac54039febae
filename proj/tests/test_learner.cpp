#include <doctest.h>

#include "nsic/demand.hpp"
#include "nsic/harness.hpp"
#include "nsic/learner.hpp"

#include <cmath>

using namespace nsic;

namespace {

AlgoConfig make_config(Algorithm a, int L, int T, double U, double gamma) {
    AlgoConfig c;
    c.which = a;
    c.conf.lead_time = L;
    c.conf.horizon = T;
    c.conf.upper = U;
    c.conf.gamma = gamma;
    c.conf.delta = 1.0 / (static_cast<double>(T) * T);
    return c;
}

std::vector<double> stream(const DemandFamily& f, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> d(static_cast<std::size_t>(n));
    for (double& x : d)
        x = sample(f, rng);
    return d;
}

SimulationResult run(const AlgoConfig& c, const std::vector<double>& d, std::uint64_t seed = 1) {
    return simulate(AlgorithmSpec{to_string(c.which), c, NoRestart{}}, d, seed);
}

}  // namespace

TEST_CASE("algorithm selection") {
    CHECK(algorithm_for(Model::Backlog, 3) == Algorithm::BL);
    CHECK(algorithm_for(Model::LostSales, 0) == Algorithm::LS);
    CHECK(algorithm_for(Model::LostSales, 2) == Algorithm::LSL);
    CHECK_THROWS_AS(Learner(make_config(Algorithm::LS, 1, 100, 10.0, 1.0), 1), Error);
    CHECK_THROWS_AS(Learner(make_config(Algorithm::LSL, 0, 100, 10.0, 1.0), 1), Error);
}

TEST_CASE("fresh learner plays U over the full grid") {
    for (Algorithm a : {Algorithm::BL, Algorithm::LS, Algorithm::LSL}) {
        const int L = a == Algorithm::LSL ? 2 : 0;
        Learner l(make_config(a, L, 100, 10.0, 1.0), 3);
        CHECK(l.begin(InventoryState::zero(L)) == 10.0);
        CHECK(l.episode().v == 1);
        CHECK(l.episode().active.size() == l.grid().size());
        CHECK(l.tau_cur() == 10.0);
    }
}

TEST_CASE("NSIC-LSL opens estimation at once from the zero state") {
    Learner l(make_config(Algorithm::LSL, 2, 100, 10.0, 1.0), 3);
    l.begin(InventoryState::zero(2));
    REQUIRE(l.episode().alpha_bar.has_value());
    CHECK(*l.episode().alpha_bar == l.episode().alpha);
}

TEST_CASE("reduction to a lower target takes one period per unit of demand") {
    InventoryState s;
    s.on_hand = 5.0;
    s.pipeline = {4.0};
    int periods = 0;
    while (inventory_position(s) > 4.0) {
        const StepOutcome o =
            transition(s, base_stock_order(s, 4.0), 1.0, Model::LostSales, CostParams{});
        s = o.next_state;
        ++periods;
    }
    CHECK(periods == 5);
}

TEST_CASE("no checks fire in the first L periods of an episode") {
    AlgoConfig c = make_config(Algorithm::BL, 3, 1000, 60.0, 1.0);
    c.conf.scale = 1e-12;
    Learner l(c, 1);
    InventoryState s = InventoryState::zero(3);
    double level = l.begin(s);
    const double demands[] = {0.0, 50.0, 0.0};
    for (int t = 1; t <= 3; ++t) {
        const StepOutcome o = transition(s, base_stock_order(s, level), demands[t - 1],
                                         Model::Backlog, c.conf.cost);
        s = o.next_state;
        level = l.step(t, o.observation, s);
        CHECK(l.episode().restarts == 0);
        CHECK(l.episode().epochs_total == 1);
    }
}

TEST_CASE("obligation eligibility and sizes") {
    AlgoConfig c = make_config(Algorithm::LS, 0, 100, 1.0, 0.125);
    Learner l(c, 1);
    l.begin(InventoryState::zero(0));
    CHECK(l.eligible_obligation_indices() == std::vector<int>{1, 2, 3});

    // ln(2T²U/(δγ)) = 1
    AlgoConfig unit = make_config(Algorithm::LS, 0, 1, 1.0, 1.0);
    unit.conf.delta = 2.0 / std::exp(1.0);
    Learner u(unit, 1);
    u.begin(InventoryState::zero(0));
    CHECK(u.obligation_log_term() == doctest::Approx(1.0));
    CHECK(u.obligation_increment(1) == 8);
    CHECK(u.obligation_probability(1) == doctest::Approx(0.5));
    CHECK(u.obligation_probability(3) == doctest::Approx(0.125));
}

TEST_CASE("obligation probability formula") {
    AlgoConfig c = make_config(Algorithm::LS, 0, 400, 4.0, 0.5);
    Learner l(c, 1);
    l.begin(InventoryState::zero(0));
    const double lg = std::log(2.0 * 400.0 * 400.0 * 4.0 / (c.conf.delta * 0.5));
    CHECK(l.obligation_log_term() == doctest::Approx(lg));
    CHECK(l.obligation_probability(2) == doctest::Approx(0.25 * std::sqrt(1.0 / (4.0 * 400.0 * lg))));
    CHECK(l.obligation_increment(2) == static_cast<long long>(std::ceil(32.0 * lg)));
}

TEST_CASE("stationary constant demand never restarts") {
    for (Algorithm a : {Algorithm::BL, Algorithm::LS, Algorithm::LSL}) {
        const int L = a == Algorithm::LSL ? 2 : 0;
        const int T = 10000;
        const std::vector<double> d(T, 5.0);
        const SimulationResult r = run(make_config(a, L, T, 20.0, 20.0 / 100.0), d);
        CHECK(r.restarts == 0);
        CHECK(r.played.size() == static_cast<std::size_t>(T));
    }
}

TEST_CASE("played levels stay on the grid and never exceed the current target") {
    AlgoConfig c = make_config(Algorithm::LS, 0, 3000, 80.0, 2.0);
    c.conf.scale = 1e-5;
    const auto d = stream(Poisson{30.0}, 3000, 5);
    const SimulationResult r = run(c, d);
    const PolicyGrid g(2.0, 80.0);
    for (double x : r.played)
        CHECK(g[g.nearest(x)] == x);
}

TEST_CASE("elimination converges near the optimum on stationary demand") {
    AlgoConfig c = make_config(Algorithm::LS, 0, 10000, 72.0, 72.0 / 100.0);
    c.conf.scale = 1e-5;
    c.conf.change_scale = 1e-3;
    const auto d = stream(Poisson{50.0}, 10000, 21);
    Learner l(c, 4);
    InventoryState s = InventoryState::zero(0);
    double level = l.begin(s);
    for (int t = 1; t <= 10000; ++t) {
        const StepOutcome o = transition(s, base_stock_order(s, level),
                                         d[static_cast<std::size_t>(t - 1)], Model::LostSales,
                                         c.conf.cost);
        s = o.next_state;
        level = l.step(t, o.observation, s);
    }
    CHECK(l.episode().restarts == 0);
    // newsvendor optimum of Poisson(50) at the 49/50 quantile is 65
    const std::size_t star = l.grid().nearest(65.0);
    const auto& active = l.episode().active;
    CHECK(active.size() < l.grid().size());
    CHECK(active.front() <= star + 1);
    CHECK(active.back() + 1 >= star);
}

TEST_CASE("a large demand switch triggers a restart") {
    AlgoConfig c = make_config(Algorithm::BL, 0, 4000, 120.0, 1.2);
    c.conf.scale = 5e-4;
    c.conf.change_scale = 0.15;
    c.conf.sigma = 3.0;
    std::vector<double> d = stream(TruncNormal{20.0, 3.0}, 2000, 8);
    const auto tail = stream(TruncNormal{90.0, 3.0}, 2000, 9);
    d.insert(d.end(), tail.begin(), tail.end());
    const SimulationResult r = run(c, d);
    CHECK(r.restarts >= 1);
}

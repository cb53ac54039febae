#include <doctest.h>

#include "nsic/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nsic;

namespace {

const char* kSmall =
    "[system]\nmodel = lost_sales\nhorizon = 400\n"
    "[demand]\nfamily = poisson\nS = 1\n"
    "[confidence]\nscale = 1e-5\nchange_scale = 1e-3\n"
    "[run]\nreplications = 1\nseed = 3\ntiming = false\n"
    "[oracle]\nn_mc = 400\n";

RunRecord record(const std::string& alg, double regret, double rel) {
    RunRecord r;
    r.algorithm = alg;
    r.dynamic_regret = regret;
    r.relative_regret_pct = rel;
    return r;
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
    const ExperimentConfig c = parse_config("");
    CHECK(c.horizon == 10000);
    CHECK(c.cost.h == 1.0);
    CHECK(c.cost.b == 49.0);
    CHECK(c.model == Model::Backlog);
    CHECK(c.replications == 500);
    CHECK(c.delta_value() == doctest::Approx(1e-8));
    CHECK(c.segments.size() == 1);
}

TEST_CASE("config errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_config("[system]\nlead_time = -1\n"),
                         doctest::Contains("lead_time must be >= 0"), Error);
    CHECK_THROWS_WITH_AS(parse_config("[system]\nmodel = backlog\nbogus = 1\n"),
                         doctest::Contains("config line 3"), Error);
    CHECK_THROWS_WITH_AS(parse_config("[nowhere]\n"), doctest::Contains("unknown section"), Error);
    CHECK_THROWS_AS(parse_config("[run]\nreplications = many\n"), Error);
    CHECK_THROWS_AS(parse_config("[system]\nmodel\n"), Error);
    CHECK_THROWS_AS(parse_config("[confidence]\ndelta = 2\n"), Error);
}

TEST_CASE("comments, auto values and lists") {
    const ExperimentConfig c = parse_config(
        "# header\n[demand]\nS = 1, logT, T^1/2 ; trailing\n[confidence]\ngamma = auto\n"
        "sigma = 2.5\nchange_scale = auto\n");
    REQUIRE(c.segments.size() == 3);
    CHECK_FALSE(c.gamma.has_value());
    CHECK(c.sigma == 2.5);
    CHECK_FALSE(c.change_scale.has_value());
}

TEST_CASE("symbolic segment counts") {
    CHECK(SegmentSpec{"logT"}.resolve(10000, 5) == 9);
    CHECK(SegmentSpec{"C"}.resolve(10000, 5) == 5);
    CHECK(SegmentSpec{"T^1/3"}.resolve(10000, 5) == 21);
    CHECK(SegmentSpec{"T^1/2"}.resolve(10000, 5) == 100);
    CHECK(SegmentSpec{"T^2/3"}.resolve(10000, 5) == 464);
    CHECK(SegmentSpec{"T^1/3"}.resolve(1000, 5) == 10);
    CHECK(SegmentSpec{"7"}.resolve(100, 5) == 7);
    CHECK_THROWS_AS(SegmentSpec{"200"}.resolve(100, 5), Error);
    CHECK_THROWS_AS(SegmentSpec{"lots"}.resolve(100, 5), Error);
}

TEST_CASE("default grid steps") {
    CHECK(default_gamma(Algorithm::BL, 100.0, 0, 10000) == doctest::Approx(1.0));
    CHECK(default_gamma(Algorithm::LS, 100.0, 0, 10000) == doctest::Approx(1.0));
    CHECK(default_gamma(Algorithm::LSL, 100.0, 2, 1000) ==
          doctest::Approx(100.0 * std::pow(3.0, 2.0 / 3.0) / 10.0));
}

TEST_CASE("a single seeded run") {
    const auto records = run_experiment(parse_config(kSmall));
    REQUIRE(records.size() == 1);
    CHECK(records[0].algorithm == "NSIC-LS");
    CHECK(records[0].run_id == "NSIC-LS_L0_S1_r0");
    CHECK(records[0].restarts == 0);
    CHECK(records[0].wall_ms == 0.0);
    CHECK(records[0].trajectory.empty());
}

TEST_CASE("paired algorithms share the seed and schedule") {
    ExperimentConfig c = parse_config(kSmall);
    c.run_schedule = c.run_oracle = true;
    c.segments = {SegmentSpec{"3"}};
    const auto records = run_experiment(c);
    REQUIRE(records.size() == 3);
    for (const RunRecord& r : records) {
        CHECK(r.seed == records[0].seed);
        CHECK(r.s_realized == 3);
        CHECK(r.upper == records[0].upper);
    }
    CHECK(records[1].algorithm == "Schedule-LS");
    CHECK(records[2].algorithm == "Oracle-LS");
    CHECK(records[2].restarts == 2);
}

TEST_CASE("replications are reproducible and independent of workers") {
    ExperimentConfig c = parse_config(kSmall);
    c.replications = 3;
    const std::string a = runs_csv(run_experiment(c));
    c.workers = 3;
    CHECK(runs_csv(run_experiment(c)) == a);
}

TEST_CASE("trajectories") {
    ExperimentConfig c = parse_config(kSmall);
    c.traj_stride = 150;
    const auto records = run_experiment(c);
    const auto& tr = records[0].trajectory;
    REQUIRE(tr.size() == 3);
    CHECK(tr[0].first == 150);
    CHECK(tr[2].first == 400);
    CHECK(tr[2].second == doctest::Approx(records[0].dynamic_regret));
    CHECK(trajectory_csv(records[0], 150).rfind("t,cum_regret\n150,", 0) == 0);
}

TEST_CASE("summaries") {
    const auto one = summarize({record("A", 4.0, 1.0)});
    REQUIRE(one.size() == 1);
    CHECK(one[0].mean_regret == 4.0);
    CHECK(one[0].stderr_regret == 0.0);

    const auto three = summarize({record("A", 1.0, 0.0), record("A", 2.0, 0.0), record("A", 3.0, 0.0)});
    CHECK(three[0].mean_regret == 2.0);
    CHECK(three[0].min_regret == 1.0);
    CHECK(three[0].max_regret == 3.0);

    const auto two = summarize({record("A", 1.0, 0.0), record("B", 2.0, 0.0)});
    CHECK(two.size() == 2);
    CHECK_THROWS_AS(summarize({}), Error);
}

TEST_CASE("output files") {
    const auto dir = std::filesystem::temp_directory_path() / "nsic_harness_test";
    std::filesystem::remove_all(dir);
    ExperimentConfig c = parse_config(kSmall);
    const auto records = run_experiment(c);
    write_outputs(dir.string(), records, 0);
    CHECK(std::filesystem::exists(dir / "runs.csv"));
    CHECK(std::filesystem::exists(dir / "summary.csv"));
    std::ifstream f(dir / "runs.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header ==
          "run_id,algorithm,model,lead_time,S_requested,S_realized,replication,seed,T,"
          "dynamic_regret,relative_regret_pct,restarts,epochs,wall_ms");
    std::size_t traj = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        traj += e.path().filename().string().rfind("traj_", 0) == 0 ? 1 : 0;
    CHECK(traj == 0);
    std::filesystem::remove_all(dir);
}

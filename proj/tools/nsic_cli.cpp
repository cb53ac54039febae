#include "nsic/nsic.h"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

namespace {

int report_failure(const char* what) {
    std::fprintf(stderr, "error: %s: %s\n", what, nsic_last_error());
    return 1;
}

struct ConfigGuard {
    nsic_config* cfg = nullptr;
    ~ConfigGuard() { nsic_config_free(cfg); }
};

struct ResultsGuard {
    nsic_results* res = nullptr;
    ~ResultsGuard() { nsic_results_free(res); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-stationary inventory control experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<int> reps, workers, stride;
    std::optional<std::uint64_t> seed;
    bool no_timing = false;
    auto* run = app.add_subcommand("run", "run the replication matrix of a config");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--reps", reps, "replications")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "base seed");
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--emit-traj", stride, "write traj_<run_id>.csv every STRIDE periods")
        ->check(CLI::NonNegativeNumber);
    run->add_flag("--no-timing", no_timing, "write wall_ms = 0 for byte-identical output");

    std::string oracle_config, oracle_out;
    auto* oracle = app.add_subcommand("oracle", "write the oracle table of replication 0");
    oracle->add_option("--config", oracle_config, "config file")->required();
    oracle->add_option("--out", oracle_out, "output file")->required();

    auto* selftest = app.add_subcommand("selftest", "run the invariant suite");

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        ConfigGuard c;
        if (nsic_config_load(config_path.c_str(), &c.cfg) != NSIC_OK)
            return report_failure("config");
        if (reps && nsic_config_set_replications(c.cfg, *reps) != NSIC_OK)
            return report_failure("--reps");
        if (seed && nsic_config_set_seed(c.cfg, *seed) != NSIC_OK)
            return report_failure("--seed");
        if (workers && nsic_config_set_workers(c.cfg, *workers) != NSIC_OK)
            return report_failure("--workers");
        if (stride && nsic_config_set_traj_stride(c.cfg, *stride) != NSIC_OK)
            return report_failure("--emit-traj");
        if (no_timing)
            nsic_config_set_timing(c.cfg, 0);
        ResultsGuard r;
        if (nsic_experiment_run(c.cfg, &r.res) != NSIC_OK)
            return report_failure("run");
        if (nsic_results_write(r.res, out_dir.c_str(), nsic_config_traj_stride(c.cfg)) != NSIC_OK)
            return report_failure("write");
        std::printf("%zu runs written to %s\n", nsic_results_count(r.res), out_dir.c_str());
        return 0;
    }
    if (*oracle) {
        ConfigGuard c;
        if (nsic_config_load(oracle_config.c_str(), &c.cfg) != NSIC_OK)
            return report_failure("config");
        if (nsic_oracle_write(c.cfg, oracle_out.c_str()) != NSIC_OK)
            return report_failure("oracle");
        std::printf("oracle table written to %s\n", oracle_out.c_str());
        return 0;
    }
    if (*selftest) {
        int failures = 0;
        const auto print = [](const char* name, int pass, const char* detail, void*) {
            std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail);
        };
        if (nsic_selftest(print, nullptr, &failures) != NSIC_OK)
            return report_failure("selftest");
        std::printf("%d failure(s)\n", failures);
        return failures == 0 ? 0 : 1;
    }
    return 0;
}

#pragma once

#include "nsic/baselines.hpp"
#include "nsic/demand.hpp"
#include "nsic/learner.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nsic {

/// One requested segment count, literal or symbolic ("C", "logT", "T^1/2", …).
struct SegmentSpec {
    std::string text;
    int resolve(int horizon, int c_constant) const;
};

struct ExperimentConfig {
    // [system]
    Model model = Model::Backlog;
    int lead_time = 0;
    int horizon = 10000;
    CostParams cost;
    // [demand]
    FamilyKind family = FamilyKind::TruncNormal;
    ParamRanges ranges;
    std::vector<SegmentSpec> segments{{"1"}};
    int c_constant = 5;
    // [algorithms]
    bool run_nsic = true;
    bool run_schedule = false;
    bool run_oracle = false;
    DetectionScope detection_scope = DetectionScope::TwoPolicies;
    IntervalMode interval_mode = IntervalMode::Pruned;
    int max_per_anchor = 4;
    // [confidence]
    std::optional<double> delta;  ///< T^-2 when unset
    std::optional<double> gamma;  ///< theorem default when unset
    std::optional<double> sigma;  ///< largest segment standard deviation when unset
    double scale = 1.0;
    std::optional<double> change_scale;  ///< equals `scale` when unset
    // [run]
    int replications = 500;
    std::uint64_t seed = 1;
    int workers = 1;
    int traj_stride = 0;
    bool timing = true;
    // [oracle]
    int n_mc = 5000;
    double u_factor = 1.2;
    int scan_points = 200;
    std::optional<double> upper;  ///< fixed U instead of the oracle rule

    void validate() const;
    double delta_value() const;
};

/// Parses the INI-like config text; errors carry the line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Default grid step: U/√T (L = 0 or backlog), U(L+1)^{2/3}T^{-1/3} (NSIC-LSL).
double default_gamma(Algorithm a, double upper, int lead_time, int horizon);

struct RunRecord {
    std::string run_id;
    std::string algorithm;
    Model model = Model::Backlog;
    int lead_time = 0;
    int s_requested = 0;
    int s_realized = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    int horizon = 0;
    double dynamic_regret = 0.0;
    double relative_regret_pct = 0.0;
    int restarts = 0;
    int epochs = 0;
    double wall_ms = 0.0;
    double upper = 0.0;
    std::vector<std::pair<int, double>> trajectory;  ///< (t, cumulative regret) every stride periods
};

/// Everything shared by the algorithms of one replication.
struct ReplicationSetup {
    int replication = 0;
    int s_requested = 0;
    std::uint64_t seed = 0;
    DemandSchedule schedule;
    double upper = 0.0;
    double sigma = 1.0;
    std::vector<double> demands;
    OracleTable table;
};

ReplicationSetup prepare_replication(const ExperimentConfig& cfg, int s_requested, int replication);

struct AlgorithmSpec {
    std::string name;
    AlgoConfig config;
    RestartPolicy policy;
};

/// The configured algorithms for one replication (NSIC and wrapped baselines).
std::vector<AlgorithmSpec> algorithms_for(const ExperimentConfig& cfg, const ReplicationSetup& rep);

struct SimulationResult {
    std::vector<double> played;
    int restarts = 0;
    int epochs = 0;
};

SimulationResult simulate(const AlgorithmSpec& spec, std::span<const double> demands,
                          std::uint64_t seed);

/// Runs every (S, replication, algorithm) cell; records come back in a fixed
/// order independent of the worker count.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
    std::string algorithm;
    Model model = Model::Backlog;
    int lead_time = 0;
    int s_requested = 0;
    int n = 0;
    double mean_regret = 0, stderr_regret = 0, min_regret = 0, max_regret = 0;
    double mean_rel = 0, stderr_rel = 0, min_rel = 0, max_rel = 0;
    double mean_restarts = 0;
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

std::string runs_csv(const std::vector<RunRecord>& records);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string trajectory_csv(const RunRecord& record, int stride);

/// Writes runs.csv, summary.csv and trajectory files into `dir`.
void write_outputs(const std::string& dir, const std::vector<RunRecord>& records, int stride);

/// Oracle table for replication 0 of the first S value.
OracleTable experiment_oracle(const ExperimentConfig& cfg);

}  // namespace nsic

#pragma once

#include "nsic/demand.hpp"
#include "nsic/inventory.hpp"
#include "nsic/learner.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nsic {

/// Per-period trace of a fixed base-stock policy run from the zero state.
struct FixedPolicyTrace {
    std::vector<double> pseudo;     ///< pseudo cost per period
    std::vector<double> available;  ///< on-hand before demand per period
    std::vector<double> sales;
};

/// Starts from `initial` when given, otherwise from the zero state.
FixedPolicyTrace simulate_fixed(double tau, std::span<const double> demands, Model model,
                                int lead_time, const CostParams& cost,
                                const InventoryState* initial = nullptr);

/// Standard error of the mean of an autocorrelated series by batch means.
double batch_mean_stderr(std::span<const double> xs, int batches = 25);

struct OracleEstimate {
    double pseudo = 0.0;
    double true_cost = 0.0;
    double stderr_pseudo = 0.0;
    double mean_available = 0.0;  ///< mean pre-demand on-hand
    double stderr_available = 0.0;
};

/// Evaluates τ on a given demand stream, discarding the first L+1 periods.
/// True cost is pseudo cost plus b times the sample mean demand of the same
/// periods.
OracleEstimate evaluate_on_stream(double tau, std::span<const double> demands, Model model,
                                  int lead_time, const CostParams& cost);

OracleEstimate mu_oracle(const DemandFamily& family, double tau, const SystemConfig& config,
                         const CostParams& cost, int n_mc, Rng& rng);

struct OptimalTau {
    double tau_star = 0.0;
    std::size_t index = 0;
    double pseudo_star = 0.0;
    double true_star = 0.0;
    std::vector<double> levels;
    std::vector<OracleEstimate> values;
};

/// Grid argmin over {0, res, 2res, …, U} using one shared demand stream;
/// ties go to the smallest level.
OptimalTau optimal_tau(const DemandFamily& family, const SystemConfig& config,
                       const CostParams& cost, double grid_resolution, int n_mc, Rng& rng);

/// Same scan over explicit levels.
OptimalTau optimal_tau_on_levels(const DemandFamily& family, std::span<const double> levels,
                                 Model model, int lead_time, const CostParams& cost, int n_mc,
                                 Rng& rng);

struct OracleSegment {
    std::vector<OracleEstimate> values;  ///< one per level
    std::size_t star_index = 0;
    double tau_star = 0.0;
    double pseudo_star = 0.0;
    double true_star = 0.0;
};

class OracleTable {
public:
    OracleTable() = default;
    OracleTable(std::vector<double> levels, std::vector<OracleSegment> segments, int mc_horizon,
                std::uint64_t mc_seed);

    const std::vector<double>& levels() const { return levels_; }
    std::size_t segment_count() const { return segments_.size(); }
    const OracleSegment& segment(std::size_t s) const;
    int mc_horizon() const { return mc_horizon_; }
    std::uint64_t mc_seed() const { return mc_seed_; }

    /// Index of the nearest table level; ties go to the smaller level.
    std::size_t nearest(double tau) const;

    /// Columnar text: segment,tau,pseudo,true,stderr with round-trip precision.
    void write(std::ostream& os) const;
    static OracleTable read(std::istream& is);

private:
    std::vector<double> levels_;
    std::vector<OracleSegment> segments_;
    int mc_horizon_ = 0;
    std::uint64_t mc_seed_ = 0;
};

/// Marks the per-level minimum of pseudo cost (ties to the smallest level).
void finalize_segment(OracleSegment& seg, std::span<const double> levels);

OracleTable build_oracle_table(const DemandSchedule& schedule, std::span<const double> levels,
                               Model model, int lead_time, const CostParams& cost, int n_mc,
                               std::uint64_t seed);

struct ShapeViolation {
    std::size_t segment;
    std::size_t index;
    double value;
    double tolerance;
};

/// Discrete second differences of pseudo cost ≥ −3 pooled standard errors
/// (plus a relative rounding slack of 1e-12).
std::vector<ShapeViolation> convexity_violations(const OracleTable& table);
/// Adjacent slopes bounded by max{h,b} plus 3 pooled standard errors and the
/// same rounding slack.
std::vector<ShapeViolation> lipschitz_violations(const OracleTable& table, const CostParams& cost);

struct NoRestart {};
struct OracleRestart {
    std::vector<int> change_points;
};
struct FixedRestart {
    int period;
};
using RestartPolicy = std::variant<NoRestart, OracleRestart, FixedRestart>;

std::string describe(const RestartPolicy& policy);

/// A learner plus a restart trigger; with NoRestart it is the plain learner.
class Agent {
public:
    Agent(AlgoConfig config, RestartPolicy policy, std::uint64_t seed);

    double begin(const InventoryState& initial);
    /// Observes period t and returns the level for t+1, restarting first if
    /// the policy triggers at t+1.
    double step(int t, const Observation& obs, const InventoryState& next_state);

    const Learner& learner() const { return learner_; }
    int restarts() const { return learner_.episode().restarts; }
    int epochs() const { return learner_.episode().epochs_total; }
    bool triggers(int t) const;

private:
    Learner learner_;
    RestartPolicy policy_;
};

struct RegretResult {
    double total = 0.0;
    std::vector<double> trajectory;  ///< cumulative regret after each period
    int clipped = 0;                 ///< periods whose increment was clipped
};

RegretResult dynamic_regret(std::span<const double> played, const DemandSchedule& schedule,
                            const OracleTable& table);

/// Σ_t true optimal cost over the horizon.
double optimal_cost_sum(const DemandSchedule& schedule, const OracleTable& table);
double relative_regret(double total, const DemandSchedule& schedule, const OracleTable& table);

}  // namespace nsic

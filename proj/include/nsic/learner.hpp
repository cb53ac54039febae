#pragma once

#include "nsic/counterfactual.hpp"
#include "nsic/estimation.hpp"
#include "nsic/inventory.hpp"
#include "nsic/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nsic {

enum class Algorithm { BL, LS, LSL };
enum class DetectionScope { TwoPolicies, AllPolicies };
enum class IntervalMode { Pruned, Exhaustive };

const char* to_string(Algorithm a);
/// NSIC variant matching an inventory model and lead time.
Algorithm algorithm_for(Model model, int lead_time);
Model model_of(Algorithm a);

struct AlgoConfig {
    Algorithm which = Algorithm::BL;
    ConfidenceParams conf;  ///< carries T, U, L, γ, δ, h, b
    DetectionScope detection_scope = DetectionScope::TwoPolicies;
    IntervalMode interval_mode = IntervalMode::Pruned;
    int max_per_anchor = 4;
    /// false turns the learner into a stationary eliminator: no change checks
    /// and no forced exploration.
    bool detect_changes = true;

    void validate() const;
};

struct EpisodeState {
    int v = 0;       ///< episode count
    int t_v = 1;     ///< episode start
    int k = 0;       ///< epoch count within the episode
    int alpha = 1;   ///< epoch start
    std::optional<int> alpha_bar;  ///< first period of the epoch with position <= τ_v^k
    std::vector<std::size_t> active;  ///< sorted grid indices
    std::size_t tau_cur = 0;          ///< grid index of max(active)
    std::map<std::size_t, EvictionRecord> evicted;
    long long obligations = 0;        ///< N, pending forced plays of U
    std::optional<int> u_block_start;
    int restarts = 0;
    int epochs_total = 0;
    /// Closed estimation runs of earlier epochs, [ᾱ_{k'}, α_{k'+1}).
    std::vector<Window> past_epochs;
};

/// Step-driven NSIC learner. Usage per period t:
///   level = learner.next_level(); play it; then
///   learner.step(t, observation, next_state) returns the level for t+1.
class Learner {
public:
    Learner(AlgoConfig config, std::uint64_t seed);

    /// Level for period 1 given the initial factual state.
    double begin(const InventoryState& initial);
    double step(int t, const Observation& obs, const InventoryState& next_state);
    /// Starts a new episode at period t (before it is played).
    void restart(int t, const InventoryState& state);

    double next_level() const { return grid_[next_index_]; }
    std::size_t next_index() const { return next_index_; }
    const EpisodeState& episode() const { return ep_; }
    const AlgoConfig& config() const { return cfg_; }
    const PolicyGrid& grid() const { return grid_; }
    const CounterfactualBank& bank() const { return bank_; }
    const IntervalStats& stats() const { return stats_; }
    double tau_cur() const { return grid_[ep_.tau_cur]; }

    /// Sampling-obligation draw for one period (NSIC-LS only).
    void draw_obligations();
    /// Normalized change sizes 2^{-i} eligible for obligation draws.
    std::vector<int> eligible_obligation_indices() const;
    double obligation_log_term() const;
    double obligation_probability(int i) const;
    long long obligation_increment(int i) const;

private:
    void start_episode(int t, const InventoryState& state);
    void start_epoch(int t);
    void maybe_open_estimation(int t, const InventoryState& state);
    void choose_next(int t);

    void step_bl(int t, double demand);
    void step_ls(int t, double sales);
    void step_lsl(int t, double sales);

    CandidateWindows windows_from(int first, int now, std::span<const int> anchors, int min_len) const;
    void remove_from_active(const std::vector<Violation>& evictions, bool record);

    AlgoConfig cfg_;
    Model model_;
    PolicyGrid grid_;
    CounterfactualBank bank_;
    IntervalStats stats_;
    RadiusTable radius_;
    RadiusTable change_radius_;
    Rng rng_;
    EpisodeState ep_;
    std::size_t played_index_ = 0;
    std::size_t next_index_ = 0;
    bool restart_pending_ = false;
};

}  // namespace nsic

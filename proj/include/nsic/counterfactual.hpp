#pragma once

#include "nsic/inventory.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace nsic {

/// Discretized base-stock levels {0, γ, 2γ, …, ⌊U/γ⌋γ, U}.
class PolicyGrid {
public:
    PolicyGrid(double gamma, double upper);

    double gamma() const { return gamma_; }
    double upper() const { return levels_.back(); }
    std::size_t size() const { return levels_.size(); }
    double operator[](std::size_t i) const { return levels_[i]; }
    const std::vector<double>& levels() const { return levels_; }

    /// Index of the largest level <= tau (levels are sorted).
    std::size_t index_at_most(double tau) const;
    /// Index of the level nearest to tau; ties go to the smaller level.
    std::size_t nearest(double tau) const;

private:
    double gamma_;
    std::vector<double> levels_;
};

/// One cost observation for a grid level.
struct LevelCost {
    std::size_t level;
    double cost;
};

/// Shadow inventory states, one per grid level, each evolved under its own
/// fixed base-stock policy from shared demand (backlog) or shared sales
/// (lost sales).
class CounterfactualBank {
public:
    static CounterfactualBank init_zero(const PolicyGrid& grid, int lead_time);

    const PolicyGrid& grid() const { return grid_; }
    int lead_time() const { return lead_time_; }
    const InventoryState& state(std::size_t level) const { return states_[level]; }
    std::uint64_t segment_id(std::size_t level) const { return segment_ids_[level]; }
    /// Post-replenishment stock of each level in the most recent advance.
    double last_available(std::size_t level) const { return last_available_[level]; }

    /// Full-information update: every level sees the realized demand.
    std::vector<LevelCost> advance_backlog(double demand, const CostParams& cost);

    /// Left-sided update for the levels [0, count) given the factual sales.
    /// Levels at or above `count` are frozen; a frozen level gets a new
    /// segment id when it resumes. `played_level` is the factual base-stock
    /// level this period; every updated level must lie at or below it.
    std::vector<LevelCost> advance_lost_sales(std::size_t count, double played_level,
                                              double sales_cap, const CostParams& cost);

    /// Counterfactual reset against the factual state for every level <= tau_cap.
    /// Requires inventory_position(factual) <= tau_cap.
    void reset_lsl(const InventoryState& factual, double tau_cap);

    /// Marks every level's cost stream as interrupted.
    void break_all();

private:
    CounterfactualBank(PolicyGrid grid, int lead_time);

    PolicyGrid grid_;
    int lead_time_;
    std::vector<InventoryState> states_;
    std::vector<std::uint64_t> segment_ids_;
    std::vector<char> frozen_;
    std::vector<double> last_available_;
};

/// Levels whose cost can be inferred this period: the whole grid under
/// backlog, levels <= played_tau under lost sales. Returned as a prefix count.
std::size_t valid_policies(Model model, const PolicyGrid& grid, double played_tau);

/// Reset vector for one level: I = min(τ, I_f), then pipeline slots filled
/// oldest first up to the remaining room below τ.
InventoryState reset_state(const InventoryState& factual, double tau);

}  // namespace nsic

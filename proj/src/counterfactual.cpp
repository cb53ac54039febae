#include "nsic/counterfactual.hpp"

#include <algorithm>
#include <cmath>

namespace nsic {

PolicyGrid::PolicyGrid(double gamma, double upper) : gamma_(gamma) {
    if (!(gamma > 0.0))
        throw Error("grid step gamma must be > 0");
    if (!(upper > 0.0))
        throw Error("grid upper bound must be > 0");
    const auto steps = static_cast<std::size_t>(std::floor(upper / gamma + 1e-12));
    levels_.reserve(steps + 2);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double v = static_cast<double>(i) * gamma;
        if (v < upper)
            levels_.push_back(v);
    }
    if (levels_.empty() || levels_.back() < upper)
        levels_.push_back(upper);
}

std::size_t PolicyGrid::index_at_most(double tau) const {
    const auto it = std::upper_bound(levels_.begin(), levels_.end(), tau);
    if (it == levels_.begin())
        throw Error("level below the grid");
    return static_cast<std::size_t>(it - levels_.begin()) - 1;
}

std::size_t PolicyGrid::nearest(double tau) const {
    const auto it = std::lower_bound(levels_.begin(), levels_.end(), tau);
    if (it == levels_.begin())
        return 0;
    if (it == levels_.end())
        return levels_.size() - 1;
    const auto hi = static_cast<std::size_t>(it - levels_.begin());
    return (tau - levels_[hi - 1] <= levels_[hi] - tau) ? hi - 1 : hi;
}

CounterfactualBank::CounterfactualBank(PolicyGrid grid, int lead_time)
    : grid_(std::move(grid)), lead_time_(lead_time) {
    if (lead_time < 0)
        throw Error("lead time must be >= 0");
    states_.assign(grid_.size(), InventoryState::zero(lead_time));
    segment_ids_.assign(grid_.size(), 0);
    frozen_.assign(grid_.size(), 0);
    last_available_.assign(grid_.size(), 0.0);
}

CounterfactualBank CounterfactualBank::init_zero(const PolicyGrid& grid, int lead_time) {
    return CounterfactualBank(grid, lead_time);
}

std::vector<LevelCost> CounterfactualBank::advance_backlog(double demand, const CostParams& cost) {
    std::vector<LevelCost> out;
    out.reserve(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double order = base_stock_order(states_[i], grid_[i]);
        StepOutcome step = transition(states_[i], order, demand, Model::Backlog, cost);
        states_[i] = std::move(step.next_state);
        last_available_[i] = step.available;
        if (frozen_[i]) {
            frozen_[i] = 0;
            ++segment_ids_[i];
        }
        out.push_back({i, step.pseudo_cost});
    }
    return out;
}

std::vector<LevelCost> CounterfactualBank::advance_lost_sales(std::size_t count, double played_level,
                                                              double sales_cap,
                                                              const CostParams& cost) {
    if (count > grid_.size())
        throw Error("advance_lost_sales: update set larger than the grid");
    if (count > 0 && grid_[count - 1] > played_level + 1e-12)
        throw Error("advance_lost_sales: cannot update a level above the played level");
    if (!(sales_cap >= 0.0))
        throw Error("advance_lost_sales: sales must be non-negative");

    std::vector<LevelCost> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        InventoryState& s = states_[i];
        const double order = base_stock_order(s, grid_[i]);
        const double arriving = s.pipeline.empty() ? order : s.pipeline.front();
        const double available = s.on_hand + arriving;
        // an excess of a few ulps over the factual sales is a stockout
        const double sales =
            available <= sales_cap + 1e-13 * std::max(1.0, std::abs(sales_cap)) ? available : sales_cap;
        s.on_hand = available - sales;
        if (!s.pipeline.empty()) {
            std::rotate(s.pipeline.begin(), s.pipeline.begin() + 1, s.pipeline.end());
            s.pipeline.back() = order;
        }
        last_available_[i] = available;
        if (frozen_[i]) {
            frozen_[i] = 0;
            ++segment_ids_[i];
        }
        out.push_back({i, pseudo_cost(available, sales, cost)});
    }
    for (std::size_t i = count; i < grid_.size(); ++i)
        frozen_[i] = 1;
    return out;
}

InventoryState reset_state(const InventoryState& factual, double tau) {
    InventoryState s;
    s.on_hand = std::min(tau, factual.on_hand);
    s.pipeline.assign(factual.pipeline.size(), 0.0);
    double filled = s.on_hand;
    // pipeline is stored oldest first, i.e. Q_{t-L}, ..., Q_{t-1}
    for (std::size_t j = 0; j < factual.pipeline.size(); ++j) {
        s.pipeline[j] = std::min(factual.pipeline[j], tau - filled);
        filled += s.pipeline[j];
    }
    return s;
}

void CounterfactualBank::reset_lsl(const InventoryState& factual, double tau_cap) {
    if (static_cast<int>(factual.pipeline.size()) != lead_time_)
        throw Error("reset_lsl: factual pipeline length differs from the lead time");
    if (inventory_position(factual) > tau_cap + 1e-9)
        throw Error("reset_lsl: factual inventory position exceeds the cap");
    for (std::size_t i = 0; i < grid_.size() && grid_[i] <= tau_cap + 1e-12; ++i)
        states_[i] = reset_state(factual, grid_[i]);
    break_all();
}

void CounterfactualBank::break_all() {
    for (auto& id : segment_ids_)
        ++id;
    std::fill(frozen_.begin(), frozen_.end(), 0);
}

std::size_t valid_policies(Model model, const PolicyGrid& grid, double played_tau) {
    if (model == Model::Backlog)
        return grid.size();
    if (played_tau < grid[0])
        return 0;
    return grid.index_at_most(played_tau + 1e-12) + 1;
}

}  // namespace nsic

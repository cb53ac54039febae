#include "nsic/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nsic {

const char* to_string(Model m) {
    return m == Model::Backlog ? "backlog" : "lost_sales";
}

Model model_from_string(const std::string& s) {
    if (s == "backlog" || s == "backlogging" || s == "bl")
        return Model::Backlog;
    if (s == "lost_sales" || s == "lost-sales" || s == "lostsales" || s == "ls")
        return Model::LostSales;
    throw Error("unknown inventory model '" + s + "'");
}

void CostParams::validate() const {
    if (!(h >= 0.0) || !(b >= 0.0))
        throw Error("cost parameters h and b must be non-negative");
    if (h == 0.0 && b == 0.0)
        throw Error("cost parameters h and b must not both be zero");
}

void SystemConfig::validate() const {
    if (lead_time < 0)
        throw Error("lead time must be >= 0");
    if (!(upper > 0.0))
        throw Error("upper bound U must be > 0");
    if (horizon < 1)
        throw Error("horizon T must be >= 1");
}

InventoryState InventoryState::zero(int lead_time) {
    InventoryState s;
    s.pipeline.assign(static_cast<std::size_t>(std::max(lead_time, 0)), 0.0);
    return s;
}

double observed_value(const Observation& obs) {
    return std::visit([](const auto& o) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(o)>, DemandObservation>)
            return o.demand;
        else
            return o.sales;
    }, obs);
}

double inventory_position(const InventoryState& state) {
    return std::accumulate(state.pipeline.begin(), state.pipeline.end(), state.on_hand);
}

double base_stock_order(const InventoryState& state, double tau) {
    return std::max(0.0, tau - inventory_position(state));
}

StepOutcome transition(const InventoryState& state, double order, double demand, Model model,
                       const CostParams& cost) {
    if (!(order >= 0.0))
        throw Error("transition: order must be non-negative");
    if (!(demand >= 0.0))
        throw Error("transition: demand must be non-negative");

    StepOutcome out;
    const bool no_lead = state.pipeline.empty();
    const double arriving = no_lead ? order : state.pipeline.front();
    out.available = state.on_hand + arriving;
    // Negative under backlog when the available stock is itself a backlog.
    out.sales = std::min(out.available, demand);
    out.pseudo_cost = pseudo_cost(out.available, out.sales, cost);

    out.next_state.on_hand =
        model == Model::Backlog ? out.available - demand : std::max(0.0, out.available - demand);
    if (!no_lead) {
        out.next_state.pipeline.reserve(state.pipeline.size());
        out.next_state.pipeline.assign(state.pipeline.begin() + 1, state.pipeline.end());
        out.next_state.pipeline.push_back(order);
    }
    if (model == Model::Backlog)
        out.observation = DemandObservation{demand};
    else
        out.observation = SalesObservation{out.sales};
    return out;
}

double true_cost(double available, double demand, const CostParams& cost) {
    return cost.h * std::max(0.0, available - demand) + cost.b * std::max(0.0, demand - available);
}

}  // namespace nsic

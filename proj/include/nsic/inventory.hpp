#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace nsic {

/// Raised on any contract violation in the core library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Model { Backlog, LostSales };

const char* to_string(Model m);
Model model_from_string(const std::string& s);

struct CostParams {
    double h = 1.0;   ///< holding cost per unit per period
    double b = 49.0;  ///< shortage (backlog) or lost-sales penalty per unit

    void validate() const;
    double max_hb() const { return h > b ? h : b; }
};

struct SystemConfig {
    Model model = Model::Backlog;
    int lead_time = 0;   ///< L
    double upper = 1.0;  ///< U, upper bound on the optimal base-stock level
    int horizon = 1;     ///< T

    void validate() const;
};

/// On-hand stock plus the order pipeline, oldest order first.
struct InventoryState {
    double on_hand = 0.0;
    std::vector<double> pipeline;

    static InventoryState zero(int lead_time);

    bool operator==(const InventoryState&) const = default;
};

struct DemandObservation {
    double demand;
};
struct SalesObservation {
    double sales;
};
/// Backlog reveals the demand, lost-sales only the (censored) sales.
using Observation = std::variant<DemandObservation, SalesObservation>;

double observed_value(const Observation& obs);

struct StepOutcome {
    double available = 0.0;  ///< on-hand after the arriving order, before demand
    double sales = 0.0;      ///< Y_t = min(available, demand)
    double pseudo_cost = 0.0;
    InventoryState next_state;
    Observation observation = DemandObservation{0.0};
};

double inventory_position(const InventoryState& state);

/// Order that raises the inventory position up to `tau`; never negative.
double base_stock_order(const InventoryState& state, double tau);

/// One period of the system: receive the oldest order (or `order` itself when
/// there is no lead time), serve demand, place `order`.
StepOutcome transition(const InventoryState& state, double order, double demand, Model model,
                       const CostParams& cost);

/// Pseudo cost h·(available − Y) − b·Y.
inline double pseudo_cost(double available, double sales, const CostParams& cost) {
    return cost.h * (available - sales) - cost.b * sales;
}

/// True holding+penalty cost for one period.
double true_cost(double available, double demand, const CostParams& cost);

}  // namespace nsic

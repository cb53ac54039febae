#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nsic {

struct EquivalenceReport {
    int scenarios = 0;
    long long comparisons = 0;
    double max_abs_diff = 0.0;
    long long dominance_checks = 0;
    long long dominance_violations = 0;
    long long cap_checks = 0;
    long long cap_violations = 0;
    int resets = 0;
    std::string first_failure;
};

/// Randomized scenarios over both models, L in {0, 2, 5}, random grids and
/// demand streams; lost-sales scenarios use non-decreasing played sequences
/// with one optional downward reset. Every tracked counterfactual cost is
/// compared against a direct fixed-level simulation from the same start.
EquivalenceReport counterfactual_equivalence(int scenarios, std::uint64_t seed);

struct SelftestItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Fast invariant checks over every module.
std::vector<SelftestItem> run_selftest();

}  // namespace nsic

#pragma once

#include "nsic/inventory.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace nsic {

/// Half-open window of periods [begin, end), so μ̂ averages C_begin..C_{end−1}.
struct Window {
    int begin;
    int end;
    int length() const { return end - begin; }
    bool operator==(const Window&) const = default;
};

/// Per-level contiguous runs of recorded pseudo costs with prefix sums, so
/// any interval mean inside a run is O(1).
class IntervalStats {
public:
    explicit IntervalStats(std::size_t levels = 0);

    std::size_t levels() const { return runs_.size(); }

    /// Records C_t(level). A gap since the previous record, or a pending
    /// break, starts a new run.
    void append(std::size_t level, int t, double cost);
    /// The next append for `level` starts a new run.
    void break_run(std::size_t level);
    void break_all();
    void clear();

    bool covers(std::size_t level, Window w) const;
    /// Interval mean; throws if the window leaves a contiguous run.
    double mean(std::size_t level, Window w) const;

    /// Start of the run containing the most recent record, if any.
    std::optional<int> current_run_start(std::size_t level) const;
    std::optional<int> last_period(std::size_t level) const;

private:
    struct Run {
        int start;
        std::vector<long double> prefix;  // prefix[i] = Σ of the first i costs
        int end() const { return start + static_cast<int>(prefix.size()) - 1; }
    };
    const Run* find_run(std::size_t level, Window w) const;

    std::vector<std::vector<Run>> runs_;
    std::vector<char> pending_break_;
};

double mu_hat(const IntervalStats& stats, std::size_t level, int s, int t);

struct ConfidenceParams {
    double delta = 1e-8;
    double gamma = 1.0;
    double sigma = 1.0;  ///< sub-Gaussian proxy, backlog only
    double scale = 1.0;         ///< multiplies the elimination radius
    double change_scale = 0.0;  ///< multiplies the change-detection radius; 0 means `scale`
    int horizon = 1;
    double upper = 1.0;
    int lead_time = 0;
    CostParams cost;

    void validate() const;
    /// δ' = δγ / (T²U)
    double delta_prime() const;
    double h_backlog() const;
    double h_lost_sales() const;
    double detection_scale() const { return change_scale > 0.0 ? change_scale : scale; }
};

/// Confidence radius b for a window of n observations.
double conf_radius(const ConfidenceParams& params, Model model, int n);

/// Radius lookup with the logarithm and constants hoisted out.
class RadiusTable {
public:
    RadiusTable() = default;
    RadiusTable(const ConfidenceParams& params, Model model);
    RadiusTable(const ConfidenceParams& params, Model model, double scale);
    double operator()(int n) const;

private:
    double numerator_ = 0.0;  // scale·H·√(2·ln(·))
};

struct CandidateWindows {
    std::vector<Window> recent;      ///< suffixes ending at `now`, newest start first
    std::vector<Window> historical;  ///< anchored dyadic windows and anchor-to-split prefixes
};

/// Recent windows start at now − 2^j + 1 and at each anchor (not before the
/// first anchor); historical windows are the dyadic windows anchored at each
/// anchor (longest `max_per_anchor` kept) plus [first anchor, s) for every
/// recent start s. `now` is the last observed period.
CandidateWindows candidate_intervals(int now, std::span<const int> anchors, int max_per_anchor,
                                     int min_length = 1);

/// Every window [s, now] with s in [first, now]; for small-T verification.
std::vector<Window> exhaustive_recent(int first, int now, int min_length = 1);
std::vector<Window> exhaustive_historical(int first, int now, int min_length = 1);

struct Violation {
    std::size_t level;
    double mu;   ///< μ̂ over the triggering window
    double gap;  ///< μ̂ − min over the comparison set
    Window window;
};

/// Active levels whose estimate exceeds the smallest estimate among grid
/// levels [0, compare_count) by more than threshold_mult·b on some window.
/// The first triggering window (in list order) is reported per level.
std::vector<Violation> elimination_violators(const IntervalStats& stats,
                                             std::span<const std::size_t> active,
                                             std::size_t compare_count,
                                             std::span<const Window> windows, double threshold_mult,
                                             const RadiusTable& radius);

/// True iff some level shows |μ̂(hist) − μ̂(recent)| > b(hist) + b(recent) on
/// an ordered pair hist.end <= recent.begin.
bool change_pair_check(const IntervalStats& stats, std::span<const std::size_t> levels,
                       std::span<const Window> historical, std::span<const Window> recent,
                       const RadiusTable& radius);

struct EvictionRecord {
    double mu_tilde;
    double delta_tilde;
};

/// True iff some evicted level drifts from its recorded mean by more than
/// Δ̃/4 + b on one of the given windows.
bool change_evicted_check(const IntervalStats& stats,
                          const std::map<std::size_t, EvictionRecord>& evicted,
                          std::span<const Window> windows, const RadiusTable& radius);

/// Separation gate on the next-lower grid level: μ̂(τ−γ) − min μ̂ over levels
/// [0, compare_count) exceeds 2b + max{h,b}·γ on `window`. False for level 0.
bool separation_check(const IntervalStats& stats, std::size_t level, std::size_t compare_count,
                      double gamma, Window window, const RadiusTable& radius,
                      const CostParams& cost);

}  // namespace nsic

#include "nsic/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nsic {

IntervalStats::IntervalStats(std::size_t levels) : runs_(levels), pending_break_(levels, 0) {}

void IntervalStats::append(std::size_t level, int t, double cost) {
    auto& runs = runs_.at(level);
    if (runs.empty() || pending_break_[level] || runs.back().end() != t) {
        if (!runs.empty() && t < runs.back().end())
            throw Error("IntervalStats::append: periods must be increasing");
        runs.push_back(Run{t, {0.0L}});
        pending_break_[level] = 0;
    }
    auto& prefix = runs.back().prefix;
    prefix.push_back(prefix.back() + static_cast<long double>(cost));
}

void IntervalStats::break_run(std::size_t level) {
    pending_break_.at(level) = 1;
}

void IntervalStats::break_all() {
    std::fill(pending_break_.begin(), pending_break_.end(), 1);
}

void IntervalStats::clear() {
    for (auto& r : runs_)
        r.clear();
    std::fill(pending_break_.begin(), pending_break_.end(), 0);
}

const IntervalStats::Run* IntervalStats::find_run(std::size_t level, Window w) const {
    const auto& runs = runs_.at(level);
    if (runs.empty() || w.end <= w.begin)
        return nullptr;
    // runs are ordered by start; most queries hit the newest run
    if (runs.back().start <= w.begin)
        return w.end <= runs.back().end() ? &runs.back() : nullptr;
    const auto it = std::upper_bound(runs.begin(), runs.end(), w.begin,
                                     [](int v, const Run& r) { return v < r.start; });
    if (it == runs.begin())
        return nullptr;
    const Run& r = *(it - 1);
    return w.end <= r.end() ? &r : nullptr;
}

bool IntervalStats::covers(std::size_t level, Window w) const {
    return find_run(level, w) != nullptr;
}

double IntervalStats::mean(std::size_t level, Window w) const {
    const Run* r = find_run(level, w);
    if (!r)
        throw Error("interval [" + std::to_string(w.begin) + ", " + std::to_string(w.end) +
                    ") is not inside one contiguous run for level " + std::to_string(level));
    const auto i = static_cast<std::size_t>(w.begin - r->start);
    const auto j = static_cast<std::size_t>(w.end - r->start);
    return static_cast<double>((r->prefix[j] - r->prefix[i]) / static_cast<long double>(j - i));
}

std::optional<int> IntervalStats::current_run_start(std::size_t level) const {
    const auto& runs = runs_.at(level);
    if (runs.empty())
        return std::nullopt;
    return runs.back().start;
}

std::optional<int> IntervalStats::last_period(std::size_t level) const {
    const auto& runs = runs_.at(level);
    if (runs.empty())
        return std::nullopt;
    return runs.back().end() - 1;
}

double mu_hat(const IntervalStats& stats, std::size_t level, int s, int t) {
    if (t <= s)
        throw Error("mu_hat requires t > s");
    return stats.mean(level, Window{s, t});
}

void ConfidenceParams::validate() const {
    if (!(delta > 0.0 && delta < 1.0))
        throw Error("delta must lie in (0, 1)");
    if (!(scale > 0.0))
        throw Error("confidence scale must be > 0");
    if (change_scale < 0.0)
        throw Error("change scale must be >= 0");
    if (!(gamma > 0.0))
        throw Error("gamma must be > 0");
    if (!(upper > 0.0))
        throw Error("U must be > 0");
    if (horizon < 1)
        throw Error("T must be >= 1");
    if (lead_time < 0)
        throw Error("L must be >= 0");
    cost.validate();
}

double ConfidenceParams::delta_prime() const {
    const double T = static_cast<double>(horizon);
    return delta * gamma / (T * T * upper);
}

double ConfidenceParams::h_backlog() const {
    const double L = static_cast<double>(lead_time);
    const double hb = cost.h + cost.b;
    return 2.0 * std::sqrt(2.0) * sigma *
           std::sqrt((L + 1.0) * (L * cost.h * cost.h + hb * hb * (4.0 * L + 5.0)));
}

double ConfidenceParams::h_lost_sales() const {
    return 72.0 * (static_cast<double>(lead_time) + 3.0) * upper * cost.max_hb();
}

RadiusTable::RadiusTable(const ConfidenceParams& p, Model model) : RadiusTable(p, model, p.scale) {}

RadiusTable::RadiusTable(const ConfidenceParams& p, Model model, double scale) {
    const double dp = p.delta_prime();
    if (model == Model::Backlog) {
        const double lg = std::log(4.0 * (p.lead_time + 1.0) / dp);
        numerator_ = scale * p.h_backlog() * std::sqrt(2.0 * lg);
    } else {
        const double lg = std::log(2.0 / dp);
        numerator_ = scale * p.h_lost_sales() * std::sqrt(2.0 * lg);
    }
}

double RadiusTable::operator()(int n) const {
    if (n < 1)
        throw Error("confidence radius needs n >= 1");
    return numerator_ / std::sqrt(static_cast<double>(n));
}

double conf_radius(const ConfidenceParams& params, Model model, int n) {
    return RadiusTable(params, model)(n);
}

CandidateWindows candidate_intervals(int now, std::span<const int> anchors, int max_per_anchor,
                                     int min_length) {
    CandidateWindows out;
    if (anchors.empty())
        return out;
    const int first = anchors.front();
    if (now < first)
        return out;

    std::vector<int> starts;
    for (long long len = 1; now - len + 1 >= first; len *= 2)
        starts.push_back(static_cast<int>(now - len + 1));
    for (int a : anchors)
        if (a >= first && a <= now)
            starts.push_back(a);
    std::sort(starts.begin(), starts.end(), std::greater<>());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    for (int s : starts)
        if (now + 1 - s >= min_length)
            out.recent.push_back({s, now + 1});

    for (int a : anchors) {
        if (a > now)
            continue;
        std::vector<Window> mine;
        for (long long len = 1; a + len <= now + 1; len *= 2)
            if (len >= min_length)
                mine.push_back({a, static_cast<int>(a + len)});
        const auto keep = std::min<std::size_t>(mine.size(), static_cast<std::size_t>(
                                                                 std::max(max_per_anchor, 0)));
        out.historical.insert(out.historical.end(), mine.end() - static_cast<long>(keep), mine.end());
    }
    for (int s : starts)
        if (s - first >= min_length)
            out.historical.push_back({first, s});
    std::sort(out.historical.begin(), out.historical.end(), [](Window x, Window y) {
        return x.begin != y.begin ? x.begin < y.begin : x.end < y.end;
    });
    out.historical.erase(std::unique(out.historical.begin(), out.historical.end()),
                         out.historical.end());
    return out;
}

std::vector<Window> exhaustive_recent(int first, int now, int min_length) {
    std::vector<Window> out;
    for (int s = now; s >= first; --s)
        if (now + 1 - s >= min_length)
            out.push_back({s, now + 1});
    return out;
}

std::vector<Window> exhaustive_historical(int first, int now, int min_length) {
    std::vector<Window> out;
    for (int s1 = first; s1 <= now; ++s1)
        for (int s2 = s1 + std::max(min_length, 1); s2 <= now + 1; ++s2)
            out.push_back({s1, s2});
    return out;
}

std::vector<Violation> elimination_violators(const IntervalStats& stats,
                                             std::span<const std::size_t> active,
                                             std::size_t compare_count,
                                             std::span<const Window> windows, double threshold_mult,
                                             const RadiusTable& radius) {
    std::vector<Violation> out;
    if (windows.empty() || active.empty() || compare_count == 0)
        return out;
    std::vector<char> found(compare_count, 0);
    std::vector<double> mu(compare_count);
    for (const Window& w : windows) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < compare_count; ++j) {
            mu[j] = stats.mean(j, w);
            best = std::min(best, mu[j]);
        }
        const double threshold = threshold_mult * radius(w.length());
        for (std::size_t level : active) {
            if (level >= compare_count)
                throw Error("elimination_violators: active level above the comparison set");
            if (found[level])
                continue;
            const double gap = mu[level] - best;
            if (gap > threshold) {
                found[level] = 1;
                out.push_back({level, mu[level], gap, w});
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Violation& a, const Violation& b) { return a.level < b.level; });
    return out;
}

bool change_pair_check(const IntervalStats& stats, std::span<const std::size_t> levels,
                       std::span<const Window> historical, std::span<const Window> recent,
                       const RadiusTable& radius) {
    if (historical.empty() || recent.empty())
        return false;
    std::vector<double> hb(historical.size()), rb(recent.size());
    for (std::size_t i = 0; i < historical.size(); ++i)
        hb[i] = radius(historical[i].length());
    for (std::size_t i = 0; i < recent.size(); ++i)
        rb[i] = radius(recent[i].length());
    std::vector<double> hm(historical.size()), rm(recent.size());
    for (std::size_t level : levels) {
        for (std::size_t i = 0; i < historical.size(); ++i)
            hm[i] = stats.mean(level, historical[i]);
        for (std::size_t i = 0; i < recent.size(); ++i)
            rm[i] = stats.mean(level, recent[i]);
        for (std::size_t r = 0; r < recent.size(); ++r)
            for (std::size_t h = 0; h < historical.size(); ++h)
                if (historical[h].end <= recent[r].begin &&
                    std::abs(hm[h] - rm[r]) > hb[h] + rb[r])
                    return true;
    }
    return false;
}

bool change_evicted_check(const IntervalStats& stats,
                          const std::map<std::size_t, EvictionRecord>& evicted,
                          std::span<const Window> windows, const RadiusTable& radius) {
    for (const auto& [level, rec] : evicted)
        for (const Window& w : windows)
            if (std::abs(stats.mean(level, w) - rec.mu_tilde) > rec.delta_tilde / 4.0 + radius(w.length()))
                return true;
    return false;
}

bool separation_check(const IntervalStats& stats, std::size_t level, std::size_t compare_count,
                      double gamma, Window window, const RadiusTable& radius,
                      const CostParams& cost) {
    if (level == 0 || compare_count == 0)
        return false;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < compare_count; ++j)
        best = std::min(best, stats.mean(j, window));
    const double below = stats.mean(level - 1, window);
    return below - best > 2.0 * radius(window.length()) + cost.max_hb() * gamma;
}

}  // namespace nsic

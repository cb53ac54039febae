#include "nsic/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nsic {

namespace {

bool at_most(double x, double cap) {
    return x <= cap + 1e-9 * (1.0 + std::abs(cap));
}

}  // namespace

const char* to_string(Algorithm a) {
    switch (a) {
    case Algorithm::BL: return "NSIC-BL";
    case Algorithm::LS: return "NSIC-LS";
    case Algorithm::LSL: return "NSIC-LSL";
    }
    return "?";
}

Algorithm algorithm_for(Model model, int lead_time) {
    if (model == Model::Backlog)
        return Algorithm::BL;
    return lead_time == 0 ? Algorithm::LS : Algorithm::LSL;
}

Model model_of(Algorithm a) {
    return a == Algorithm::BL ? Model::Backlog : Model::LostSales;
}

void AlgoConfig::validate() const {
    conf.validate();
    if (which == Algorithm::LS && conf.lead_time != 0)
        throw Error("NSIC-LS requires lost sales with L = 0");
    if (which == Algorithm::LSL && conf.lead_time < 1)
        throw Error("NSIC-LSL requires lost sales with L >= 1");
    if (max_per_anchor < 0)
        throw Error("max_per_anchor must be >= 0");
}

Learner::Learner(AlgoConfig config, std::uint64_t seed)
    : cfg_((config.validate(), std::move(config))),
      model_(model_of(cfg_.which)),
      grid_(cfg_.conf.gamma, cfg_.conf.upper),
      bank_(CounterfactualBank::init_zero(grid_, cfg_.conf.lead_time)),
      stats_(grid_.size()),
      radius_(cfg_.conf, model_),
      change_radius_(cfg_.conf, model_, cfg_.conf.detection_scale()),
      rng_(seed) {}

double Learner::begin(const InventoryState& initial) {
    start_episode(1, initial);
    choose_next(1);
    return next_level();
}

void Learner::restart(int t, const InventoryState& state) {
    ++ep_.restarts;
    start_episode(t, state);
    choose_next(t);
}

void Learner::start_episode(int t, const InventoryState& state) {
    ++ep_.v;
    ep_.t_v = t;
    ep_.k = 0;
    ep_.active.resize(grid_.size());
    std::iota(ep_.active.begin(), ep_.active.end(), std::size_t{0});
    ep_.evicted.clear();
    ep_.past_epochs.clear();
    ep_.u_block_start.reset();
    stats_.clear();
    start_epoch(t);
    if (cfg_.which == Algorithm::LSL)
        maybe_open_estimation(t, state);
}

void Learner::start_epoch(int t) {
    ++ep_.k;
    ++ep_.epochs_total;
    ep_.alpha = t;
    ep_.tau_cur = ep_.active.back();
    if (cfg_.which == Algorithm::LSL)
        ep_.alpha_bar.reset();
    else
        ep_.alpha_bar = t;
}

void Learner::maybe_open_estimation(int t, const InventoryState& state) {
    if (ep_.alpha_bar)
        return;
    const double cap = grid_[ep_.tau_cur];
    if (!at_most(inventory_position(state), cap))
        return;
    ep_.alpha_bar = t;
    bank_.reset_lsl(state, cap + 1e-9 * (1.0 + cap));
    stats_.break_all();
}

void Learner::choose_next(int /*t*/) {
    next_index_ = ep_.tau_cur;
    if (cfg_.which == Algorithm::LS && cfg_.detect_changes) {
        draw_obligations();
        if (ep_.obligations >= 1) {
            next_index_ = grid_.size() - 1;
            --ep_.obligations;
        }
    }
}

double Learner::step(int t, const Observation& obs, const InventoryState& next_state) {
    played_index_ = next_index_;
    restart_pending_ = false;
    switch (cfg_.which) {
    case Algorithm::BL:
        if (!std::holds_alternative<DemandObservation>(obs))
            throw Error("NSIC-BL expects demand observations");
        step_bl(t, std::get<DemandObservation>(obs).demand);
        break;
    case Algorithm::LS:
        if (!std::holds_alternative<SalesObservation>(obs))
            throw Error("NSIC-LS expects sales observations");
        step_ls(t, std::get<SalesObservation>(obs).sales);
        break;
    case Algorithm::LSL:
        if (!std::holds_alternative<SalesObservation>(obs))
            throw Error("NSIC-LSL expects sales observations");
        step_lsl(t, std::get<SalesObservation>(obs).sales);
        break;
    }
    if (restart_pending_) {
        ++ep_.restarts;
        start_episode(t + 1, next_state);
    } else if (cfg_.which == Algorithm::LSL) {
        maybe_open_estimation(t + 1, next_state);
    }
    choose_next(t + 1);
    return next_level();
}

CandidateWindows Learner::windows_from(int first, int now, std::span<const int> anchors,
                                       int min_len) const {
    if (cfg_.interval_mode == IntervalMode::Exhaustive)
        return {exhaustive_recent(first, now, min_len), exhaustive_historical(first, now, min_len)};
    return candidate_intervals(now, anchors, cfg_.max_per_anchor, min_len);
}

void Learner::remove_from_active(const std::vector<Violation>& evictions, bool record) {
    std::vector<std::size_t> keep;
    keep.reserve(ep_.active.size());
    for (std::size_t level : ep_.active) {
        const bool evict = std::any_of(evictions.begin(), evictions.end(),
                                       [&](const Violation& v) { return v.level == level; });
        if (!evict)
            keep.push_back(level);
    }
    std::vector<Violation> applied = evictions;
    if (keep.empty()) {
        // never empty the active set: the violator with the smallest gap survives
        const auto best = std::min_element(applied.begin(), applied.end(),
                                           [](const Violation& a, const Violation& b) {
                                               return a.gap < b.gap;
                                           });
        keep.push_back(best->level);
        applied.erase(best);
    }
    ep_.active = std::move(keep);
    if (record)
        for (const Violation& v : applied)
            ep_.evicted[v.level] = EvictionRecord{v.mu, v.gap};
    ep_.tau_cur = ep_.active.back();
}

void Learner::step_bl(int t, double demand) {
    for (const LevelCost& lc : bank_.advance_backlog(demand, cfg_.conf.cost))
        stats_.append(lc.level, t, lc.cost);

    const int L = cfg_.conf.lead_time;
    if (t < ep_.t_v + L)
        return;
    const int anchors[] = {ep_.t_v};
    const CandidateWindows cw = windows_from(ep_.t_v, t, anchors, std::max(1, L));

    if (cfg_.detect_changes) {
        std::vector<std::size_t> all(grid_.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        if (change_pair_check(stats_, all, cw.historical, cw.recent, change_radius_)) {
            restart_pending_ = true;
            return;
        }
    }
    const auto viol =
        elimination_violators(stats_, ep_.active, grid_.size(), cw.recent, 4.0, radius_);
    if (!viol.empty()) {
        remove_from_active(viol, false);
        start_epoch(t + 1);
    }
}

void Learner::step_ls(int t, double sales) {
    const std::size_t top = grid_.size() - 1;
    const double played = grid_[played_index_];
    for (const LevelCost& lc :
         bank_.advance_lost_sales(played_index_ + 1, played, sales, cfg_.conf.cost))
        stats_.append(lc.level, t, lc.cost);

    if (played_index_ == top) {
        if (!ep_.u_block_start)
            ep_.u_block_start = t;
    } else {
        ep_.u_block_start.reset();
    }

    const std::size_t tau = ep_.tau_cur;
    const int anchors[] = {ep_.t_v};
    const CandidateWindows cw = windows_from(ep_.t_v, t, anchors, 1);

    if (cfg_.detect_changes) {
        std::vector<std::size_t> lower(tau + 1);
        std::iota(lower.begin(), lower.end(), std::size_t{0});
        if (change_pair_check(stats_, lower, cw.historical, cw.recent, change_radius_)) {
            restart_pending_ = true;
            return;
        }
        if (ep_.u_block_start) {
            std::map<std::size_t, EvictionRecord> above;
            for (const auto& [level, rec] : ep_.evicted)
                if (level > tau)
                    above.emplace(level, rec);
            if (!above.empty()) {
                const int block[] = {*ep_.u_block_start};
                const auto uw = cfg_.interval_mode == IntervalMode::Exhaustive
                                    ? exhaustive_recent(*ep_.u_block_start, t)
                                    : candidate_intervals(t, block, 0).recent;
                if (change_evicted_check(stats_, above, uw, change_radius_)) {
                    restart_pending_ = true;
                    return;
                }
            }
        }
    }

    const auto viol = elimination_violators(stats_, ep_.active, tau + 1, cw.recent, 6.0, radius_);
    if (!viol.empty()) {
        remove_from_active(viol, true);
        if (ep_.tau_cur != tau)
            start_epoch(t + 1);
    }
}

void Learner::step_lsl(int t, double sales) {
    if (!ep_.alpha_bar || *ep_.alpha_bar > t)
        return;  // reduction phase: data is not used for estimation
    const std::size_t tau = ep_.tau_cur;
    const double played = grid_[played_index_];
    for (const LevelCost& lc : bank_.advance_lost_sales(tau + 1, played, sales, cfg_.conf.cost))
        stats_.append(lc.level, t, lc.cost);

    const int ab = *ep_.alpha_bar;
    const Window since{ab, t + 1};
    const int anchors[] = {ab};
    CandidateWindows cw = windows_from(ab, t, anchors, 1);

    if (cfg_.detect_changes) {
        std::vector<std::size_t> levels;
        if (cfg_.detection_scope == DetectionScope::AllPolicies) {
            levels.resize(tau + 1);
            std::iota(levels.begin(), levels.end(), std::size_t{0});
        } else {
            std::size_t best = 0;
            double best_mu = stats_.mean(0, since);
            for (std::size_t j = 1; j <= tau; ++j) {
                const double m = stats_.mean(j, since);
                if (m < best_mu) {
                    best_mu = m;
                    best = j;
                }
            }
            levels.push_back(best);
            if (best != tau)
                levels.push_back(tau);
        }
        std::vector<Window> historical = cw.historical;
        for (const Window& past : ep_.past_epochs) {
            if (cfg_.interval_mode == IntervalMode::Exhaustive) {
                const auto all = exhaustive_historical(past.begin, past.end - 1);
                historical.insert(historical.end(), all.begin(), all.end());
            } else {
                const int a[] = {past.begin};
                const auto pw = candidate_intervals(past.end - 1, a, cfg_.max_per_anchor).historical;
                historical.insert(historical.end(), pw.begin(), pw.end());
                historical.push_back(past);
            }
        }
        if (change_pair_check(stats_, levels, historical, cw.recent, change_radius_)) {
            restart_pending_ = true;
            return;
        }
    }

    auto viol = elimination_violators(stats_, ep_.active, tau + 1, cw.recent, 4.0, radius_);
    std::erase_if(viol, [&](const Violation& v) {
        return !separation_check(stats_, v.level, tau + 1, grid_.gamma(), since, radius_,
                                 cfg_.conf.cost);
    });
    if (!viol.empty()) {
        remove_from_active(viol, false);
        if (ep_.tau_cur != tau) {
            ep_.past_epochs.push_back(since);
            start_epoch(t + 1);
        }
    }
}

double Learner::obligation_log_term() const {
    const auto& c = cfg_.conf;
    const double T = static_cast<double>(c.horizon);
    return std::log(2.0 * T * T * c.upper / (c.delta * c.gamma));
}

std::vector<int> Learner::eligible_obligation_indices() const {
    const auto& c = cfg_.conf;
    const std::size_t top = grid_.size() - 1;
    double gap_u = 0.0;
    if (const auto it = ep_.evicted.find(top); it != ep_.evicted.end())
        gap_u = it->second.delta_tilde;
    const double floor_eps =
        std::max(c.gamma / c.upper, gap_u / (16.0 * c.detection_scale() * c.h_lost_sales()));
    std::vector<int> out;
    for (int i = 1; i < 60 && std::ldexp(1.0, -i) >= floor_eps; ++i)
        out.push_back(i);
    return out;
}

double Learner::obligation_probability(int i) const {
    const auto& c = cfg_.conf;
    const double p = std::ldexp(1.0, -i) *
                     std::sqrt(static_cast<double>(ep_.v) /
                               (c.upper * static_cast<double>(c.horizon) * obligation_log_term()));
    return std::min(1.0, p);
}

long long Learner::obligation_increment(int i) const {
    const double s = cfg_.conf.detection_scale();
    return static_cast<long long>(
        std::ceil(std::ldexp(1.0, 2 * i + 1) * obligation_log_term() * s * s));
}

void Learner::draw_obligations() {
    for (int i : eligible_obligation_indices())
        if (uniform01(rng_) < obligation_probability(i))
            ep_.obligations += obligation_increment(i);
}

}  // namespace nsic

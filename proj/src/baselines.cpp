#include "nsic/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace nsic {

FixedPolicyTrace simulate_fixed(double tau, std::span<const double> demands, Model model,
                                int lead_time, const CostParams& cost,
                                const InventoryState* initial) {
    FixedPolicyTrace out;
    out.pseudo.reserve(demands.size());
    out.available.reserve(demands.size());
    out.sales.reserve(demands.size());
    InventoryState s = initial ? *initial : InventoryState::zero(lead_time);
    for (double d : demands) {
        StepOutcome step = transition(s, base_stock_order(s, tau), d, model, cost);
        out.pseudo.push_back(step.pseudo_cost);
        out.available.push_back(step.available);
        out.sales.push_back(step.sales);
        s = std::move(step.next_state);
    }
    return out;
}

double batch_mean_stderr(std::span<const double> xs, int batches) {
    const std::size_t n = xs.size();
    if (n < 2)
        return 0.0;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(batches, 2)), n);
    const std::size_t len = n / k;
    std::vector<double> means;
    means.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        for (std::size_t j = i * len; j < (i + 1) * len; ++j)
            sum += xs[j];
        means.push_back(sum / static_cast<double>(len));
    }
    double m = 0.0;
    for (double v : means)
        m += v;
    m /= static_cast<double>(k);
    double ss = 0.0;
    for (double v : means)
        ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
}

namespace {

double mean_of(std::span<const double> xs) {
    long double sum = 0.0L;
    for (double v : xs)
        sum += v;
    return xs.empty() ? 0.0 : static_cast<double>(sum / static_cast<long double>(xs.size()));
}

}  // namespace

OracleEstimate evaluate_on_stream(double tau, std::span<const double> demands, Model model,
                                  int lead_time, const CostParams& cost) {
    const std::size_t burn = static_cast<std::size_t>(lead_time) + 1;
    if (demands.size() < burn + 1)
        throw Error("Monte-Carlo horizon must be at least L + 2");
    const FixedPolicyTrace tr = simulate_fixed(tau, demands, model, lead_time, cost);
    const std::span<const double> pc(tr.pseudo.data() + burn, tr.pseudo.size() - burn);
    const std::span<const double> av(tr.available.data() + burn, tr.available.size() - burn);
    OracleEstimate e;
    e.pseudo = mean_of(pc);
    e.true_cost = e.pseudo + cost.b * mean_of(demands.subspan(burn));
    e.stderr_pseudo = batch_mean_stderr(pc);
    e.mean_available = mean_of(av);
    e.stderr_available = batch_mean_stderr(av);
    return e;
}

namespace {

std::vector<double> draw_demands(const DemandFamily& family, int n, Rng& rng) {
    std::vector<double> d(static_cast<std::size_t>(n));
    for (double& x : d)
        x = sample(family, rng);
    return d;
}

}  // namespace

OracleEstimate mu_oracle(const DemandFamily& family, double tau, const SystemConfig& config,
                         const CostParams& cost, int n_mc, Rng& rng) {
    if (n_mc < config.lead_time + 2)
        throw Error("n_mc must be >= L + 2");
    const auto d = draw_demands(family, n_mc, rng);
    return evaluate_on_stream(tau, d, config.model, config.lead_time, cost);
}

void finalize_segment(OracleSegment& seg, std::span<const double> levels) {
    if (seg.values.empty() || seg.values.size() != levels.size())
        throw Error("oracle segment does not match the level list");
    std::size_t best = 0;
    for (std::size_t i = 1; i < seg.values.size(); ++i)
        if (seg.values[i].pseudo < seg.values[best].pseudo)
            best = i;
    seg.star_index = best;
    seg.tau_star = levels[best];
    seg.pseudo_star = seg.values[best].pseudo;
    seg.true_star = seg.values[best].true_cost;
}

OptimalTau optimal_tau_on_levels(const DemandFamily& family, std::span<const double> levels,
                                 Model model, int lead_time, const CostParams& cost, int n_mc,
                                 Rng& rng) {
    if (levels.empty())
        throw Error("optimal_tau needs at least one level");
    if (n_mc < lead_time + 2)
        throw Error("n_mc must be >= L + 2");
    const auto d = draw_demands(family, n_mc, rng);
    OracleSegment seg;
    seg.values.reserve(levels.size());
    for (double tau : levels)
        seg.values.push_back(evaluate_on_stream(tau, d, model, lead_time, cost));
    finalize_segment(seg, levels);
    OptimalTau out;
    out.tau_star = seg.tau_star;
    out.index = seg.star_index;
    out.pseudo_star = seg.pseudo_star;
    out.true_star = seg.true_star;
    out.levels.assign(levels.begin(), levels.end());
    out.values = std::move(seg.values);
    return out;
}

OptimalTau optimal_tau(const DemandFamily& family, const SystemConfig& config,
                       const CostParams& cost, double grid_resolution, int n_mc, Rng& rng) {
    if (!(grid_resolution > 0.0))
        throw Error("grid resolution must be > 0");
    const PolicyGrid grid(grid_resolution, config.upper);
    return optimal_tau_on_levels(family, grid.levels(), config.model, config.lead_time, cost, n_mc,
                                 rng);
}

OracleTable::OracleTable(std::vector<double> levels, std::vector<OracleSegment> segments,
                         int mc_horizon, std::uint64_t mc_seed)
    : levels_(std::move(levels)), segments_(std::move(segments)), mc_horizon_(mc_horizon),
      mc_seed_(mc_seed) {
    if (levels_.empty())
        throw Error("oracle table needs levels");
    if (!std::is_sorted(levels_.begin(), levels_.end()))
        throw Error("oracle table levels must be sorted");
    for (auto& s : segments_)
        finalize_segment(s, levels_);
}

const OracleSegment& OracleTable::segment(std::size_t s) const {
    if (s >= segments_.size())
        throw Error("oracle table has no segment " + std::to_string(s));
    return segments_[s];
}

std::size_t OracleTable::nearest(double tau) const {
    const auto it = std::lower_bound(levels_.begin(), levels_.end(), tau);
    if (it == levels_.begin())
        return 0;
    if (it == levels_.end())
        return levels_.size() - 1;
    const auto hi = static_cast<std::size_t>(it - levels_.begin());
    return (tau - levels_[hi - 1] <= levels_[hi] - tau) ? hi - 1 : hi;
}

void OracleTable::write(std::ostream& os) const {
    os << "# mc_horizon=" << mc_horizon_ << " mc_seed=" << mc_seed_ << '\n';
    os << "segment,tau,pseudo,true,stderr\n";
    char buf[160];
    for (std::size_t s = 0; s < segments_.size(); ++s)
        for (std::size_t i = 0; i < levels_.size(); ++i) {
            const OracleEstimate& e = segments_[s].values[i];
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", s, levels_[i], e.pseudo,
                          e.true_cost, e.stderr_pseudo);
            os << buf;
        }
}

OracleTable OracleTable::read(std::istream& is) {
    std::string line;
    int horizon = 0;
    std::uint64_t seed = 0;
    bool header = false;
    std::vector<double> levels;
    std::vector<OracleSegment> segs;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            unsigned long long sd = 0;
            if (std::sscanf(line.c_str(), "# mc_horizon=%d mc_seed=%llu", &horizon, &sd) == 2)
                seed = sd;
            continue;
        }
        if (!header) {
            if (line != "segment,tau,pseudo,true,stderr")
                throw Error("oracle table: unexpected header on line " + std::to_string(lineno));
            header = true;
            continue;
        }
        std::size_t s = 0;
        double tau = 0, pseudo = 0, tru = 0, se = 0;
        if (std::sscanf(line.c_str(), "%zu,%lf,%lf,%lf,%lf", &s, &tau, &pseudo, &tru, &se) != 5)
            throw Error("oracle table: malformed row on line " + std::to_string(lineno));
        if (s == segs.size()) {
            segs.emplace_back();
        } else if (s + 1 != segs.size()) {
            throw Error("oracle table: segments out of order on line " + std::to_string(lineno));
        }
        OracleSegment& seg = segs.back();
        if (segs.size() == 1)
            levels.push_back(tau);
        else if (seg.values.size() >= levels.size() || levels[seg.values.size()] != tau)
            throw Error("oracle table: level mismatch on line " + std::to_string(lineno));
        OracleEstimate e;
        e.pseudo = pseudo;
        e.true_cost = tru;
        e.stderr_pseudo = se;
        seg.values.push_back(e);
    }
    if (!header || segs.empty())
        throw Error("oracle table: no rows");
    for (const auto& seg : segs)
        if (seg.values.size() != levels.size())
            throw Error("oracle table: ragged segment");
    return OracleTable(std::move(levels), std::move(segs), horizon, seed);
}

OracleTable build_oracle_table(const DemandSchedule& schedule, std::span<const double> levels,
                               Model model, int lead_time, const CostParams& cost, int n_mc,
                               std::uint64_t seed) {
    std::vector<OracleSegment> segs;
    segs.reserve(static_cast<std::size_t>(schedule.segment_count()));
    for (int s = 0; s < schedule.segment_count(); ++s) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s), "oracle"));
        const OptimalTau o = optimal_tau_on_levels(schedule.segments()[static_cast<std::size_t>(s)].family,
                                                   levels, model, lead_time, cost, n_mc, rng);
        OracleSegment seg;
        seg.values = o.values;
        segs.push_back(std::move(seg));
    }
    return OracleTable(std::vector<double>(levels.begin(), levels.end()), std::move(segs), n_mc,
                       seed);
}

namespace {

double rounding_slack(double a, double b, double c) {
    return 1e-12 * std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
}

}  // namespace

std::vector<ShapeViolation> convexity_violations(const OracleTable& table) {
    std::vector<ShapeViolation> out;
    const auto& lv = table.levels();
    for (std::size_t s = 0; s < table.segment_count(); ++s) {
        const auto& v = table.segment(s).values;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            const double dl = lv[i] - lv[i - 1], dr = lv[i + 1] - lv[i];
            // second difference of the piecewise-linear interpolant, unequal spacing allowed
            const double d2 = (v[i + 1].pseudo - v[i].pseudo) / dr - (v[i].pseudo - v[i - 1].pseudo) / dl;
            const double se = std::sqrt(std::pow(v[i - 1].stderr_pseudo / dl, 2) +
                                        std::pow(v[i].stderr_pseudo * (1.0 / dl + 1.0 / dr), 2) +
                                        std::pow(v[i + 1].stderr_pseudo / dr, 2));
            const double tol = 3.0 * se + rounding_slack(v[i - 1].pseudo, v[i].pseudo, v[i + 1].pseudo) *
                                              (1.0 / dl + 1.0 / dr);
            if (d2 < -tol)
                out.push_back({s, i, d2, tol});
        }
    }
    return out;
}

std::vector<ShapeViolation> lipschitz_violations(const OracleTable& table, const CostParams& cost) {
    std::vector<ShapeViolation> out;
    const auto& lv = table.levels();
    for (std::size_t s = 0; s < table.segment_count(); ++s) {
        const auto& v = table.segment(s).values;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const double diff = std::abs(v[i + 1].pseudo - v[i].pseudo);
            const double se = std::hypot(v[i].stderr_pseudo, v[i + 1].stderr_pseudo);
            const double tol = cost.max_hb() * (lv[i + 1] - lv[i]) + 3.0 * se +
                               rounding_slack(v[i].pseudo, v[i + 1].pseudo, 0.0);
            if (diff > tol)
                out.push_back({s, i, diff, tol});
        }
    }
    return out;
}

std::string describe(const RestartPolicy& policy) {
    if (std::holds_alternative<NoRestart>(policy))
        return "none";
    if (const auto* o = std::get_if<OracleRestart>(&policy))
        return "oracle(" + std::to_string(o->change_points.size()) + " change points)";
    return "fixed(period=" + std::to_string(std::get<FixedRestart>(policy).period) + ")";
}

namespace {

void validate_policy(const RestartPolicy& policy) {
    if (const auto* o = std::get_if<OracleRestart>(&policy)) {
        if (!std::is_sorted(o->change_points.begin(), o->change_points.end()) ||
            std::adjacent_find(o->change_points.begin(), o->change_points.end()) !=
                o->change_points.end())
            throw Error("oracle restart points must be strictly increasing");
        if (!o->change_points.empty() && o->change_points.front() < 2)
            throw Error("oracle restart points must be >= 2");
    } else if (const auto* f = std::get_if<FixedRestart>(&policy)) {
        if (f->period < 1)
            throw Error("fixed restart period must be >= 1");
    }
}

}  // namespace

Agent::Agent(AlgoConfig config, RestartPolicy policy, std::uint64_t seed)
    : learner_((validate_policy(policy), std::move(config)), seed), policy_(std::move(policy)) {}

bool Agent::triggers(int t) const {
    if (const auto* o = std::get_if<OracleRestart>(&policy_))
        return std::binary_search(o->change_points.begin(), o->change_points.end(), t);
    if (const auto* f = std::get_if<FixedRestart>(&policy_))
        return t > 1 && (t - 1) % f->period == 0;
    return false;
}

double Agent::begin(const InventoryState& initial) {
    return learner_.begin(initial);
}

double Agent::step(int t, const Observation& obs, const InventoryState& next_state) {
    const double next = learner_.step(t, obs, next_state);
    if (t + 1 > learner_.config().conf.horizon || !triggers(t + 1))
        return next;
    learner_.restart(t + 1, next_state);
    return learner_.next_level();
}

RegretResult dynamic_regret(std::span<const double> played, const DemandSchedule& schedule,
                            const OracleTable& table) {
    if (static_cast<int>(played.size()) != schedule.horizon())
        throw Error("played sequence length differs from the horizon");
    if (table.segment_count() < static_cast<std::size_t>(schedule.segment_count()))
        throw Error("oracle table is missing segments");
    RegretResult r;
    r.trajectory.reserve(played.size());
    long double cum = 0.0L;
    for (std::size_t i = 0; i < played.size(); ++i) {
        const int t = static_cast<int>(i) + 1;
        const OracleSegment& seg = table.segment(static_cast<std::size_t>(schedule.segment_index(t)));
        const OracleEstimate& e = seg.values[table.nearest(played[i])];
        double inc = e.true_cost - seg.true_star;
        const double floor = -3.0 * e.stderr_pseudo;
        if (inc < floor) {
            inc = floor;
            ++r.clipped;
        }
        cum += inc;
        r.trajectory.push_back(static_cast<double>(cum));
    }
    r.total = r.trajectory.empty() ? 0.0 : r.trajectory.back();
    return r;
}

double optimal_cost_sum(const DemandSchedule& schedule, const OracleTable& table) {
    long double sum = 0.0L;
    const auto& segs = schedule.segments();
    for (std::size_t s = 0; s < segs.size(); ++s) {
        const int end = s + 1 < segs.size() ? segs[s + 1].start : schedule.horizon() + 1;
        sum += static_cast<long double>(end - segs[s].start) * table.segment(s).true_star;
    }
    return static_cast<double>(sum);
}

double relative_regret(double total, const DemandSchedule& schedule, const OracleTable& table) {
    const double denom = optimal_cost_sum(schedule, table);
    if (!(denom > 0.0))
        throw Error("relative regret undefined: optimal cost sum is not positive");
    return 100.0 * total / denom;
}

}  // namespace nsic

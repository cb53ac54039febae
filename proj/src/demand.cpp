#include "nsic/demand.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <unordered_set>

namespace nsic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double poisson_cdf(double rate, double x) {
    if (x < 0.0)
        return 0.0;
    const auto k_max = static_cast<long>(std::floor(x));
    // pmf recurrence in log space keeps large rates finite
    double log_pmf = -rate;
    double acc = std::exp(log_pmf);
    for (long k = 1; k <= k_max; ++k) {
        log_pmf += std::log(rate) - std::log(static_cast<double>(k));
        acc += std::exp(log_pmf);
        if (acc >= 1.0)
            return 1.0;
    }
    return std::min(acc, 1.0);
}

// Integrals of (1 − F) and 2x(1 − F) over one linear piece; Simpson is exact
// for the quadratic integrand.
std::pair<double, double> piece_moments(double x0, double f0, double x1, double f1) {
    const double w = x1 - x0;
    const double m1 = w * ((1.0 - f0) + (1.0 - f1)) / 2.0;
    const double xm = 0.5 * (x0 + x1);
    const double fm = 0.5 * (f0 + f1);
    const double m2 =
        w / 6.0 * (2.0 * x0 * (1.0 - f0) + 4.0 * 2.0 * xm * (1.0 - fm) + 2.0 * x1 * (1.0 - f1));
    return {m1, m2};
}

}  // namespace

FamilyKind family_kind_from_string(const std::string& s) {
    if (s == "normal" || s == "trunc_normal" || s == "truncnormal")
        return FamilyKind::TruncNormal;
    if (s == "uniform")
        return FamilyKind::Uniform;
    if (s == "poisson")
        return FamilyKind::Poisson;
    if (s == "exponential")
        return FamilyKind::Exponential;
    throw Error("unknown demand family '" + s + "'");
}

const char* to_string(FamilyKind k) {
    switch (k) {
    case FamilyKind::TruncNormal: return "normal";
    case FamilyKind::Uniform: return "uniform";
    case FamilyKind::Poisson: return "poisson";
    case FamilyKind::Exponential: return "exponential";
    }
    return "?";
}

void validate(const DemandFamily& family) {
    std::visit(overloaded{
                   [](const TruncNormal& f) {
                       if (!std::isfinite(f.mean) || !(f.sd >= 0.0))
                           throw Error("TruncNormal needs finite mean and sd >= 0");
                   },
                   [](const Uniform& f) {
                       if (!(f.a >= 0.0) || !(f.width >= 0.0))
                           throw Error("Uniform needs a >= 0 and width >= 0");
                   },
                   [](const Poisson& f) {
                       if (!(f.rate > 0.0))
                           throw Error("Poisson needs rate > 0");
                   },
                   [](const Exponential& f) {
                       if (!(f.rate > 0.0))
                           throw Error("Exponential needs rate > 0");
                   },
                   [](const PiecewiseLinearCdf& f) {
                       const auto& k = f.knots;
                       if (k.size() < 2 || k.front().first != 0.0 || k.front().second < 0.0)
                           throw Error("PiecewiseLinearCdf must start at x = 0 with F >= 0");
                       for (std::size_t i = 1; i < k.size(); ++i) {
                           if (!(k[i].first > k[i - 1].first))
                               throw Error("PiecewiseLinearCdf knots must be strictly increasing in x");
                           if (k[i].second < k[i - 1].second)
                               throw Error("PiecewiseLinearCdf values must be nondecreasing");
                       }
                       if (k.back().second != 1.0)
                           throw Error("PiecewiseLinearCdf must end at F = 1");
                   },
                   [](const Deterministic& f) {
                       if (!(f.value >= 0.0))
                           throw Error("Deterministic demand must be >= 0");
                   },
               },
               family);
}

std::string describe(const DemandFamily& family) {
    char buf[128];
    std::visit(overloaded{
                   [&](const TruncNormal& f) { std::snprintf(buf, sizeof buf, "normal(%g,%g)", f.mean, f.sd); },
                   [&](const Uniform& f) { std::snprintf(buf, sizeof buf, "uniform(%g,%g)", f.a, f.a + f.width); },
                   [&](const Poisson& f) { std::snprintf(buf, sizeof buf, "poisson(%g)", f.rate); },
                   [&](const Exponential& f) { std::snprintf(buf, sizeof buf, "exponential(%g)", f.rate); },
                   [&](const PiecewiseLinearCdf& f) {
                       std::snprintf(buf, sizeof buf, "piecewise_linear(%zu knots)", f.knots.size());
                   },
                   [&](const Deterministic& f) { std::snprintf(buf, sizeof buf, "deterministic(%g)", f.value); },
               },
               family);
    return buf;
}

double inverse_cdf(const PiecewiseLinearCdf& family, double u) {
    const auto& k = family.knots;
    if (u <= k.front().second)
        return k.front().first;
    for (std::size_t i = 1; i < k.size(); ++i) {
        const auto [x0, f0] = k[i - 1];
        const auto [x1, f1] = k[i];
        if (u <= f1 && f1 > f0)
            return x0 + (u - f0) / (f1 - f0) * (x1 - x0);
    }
    return k.back().first;
}

double sample(const DemandFamily& family, Rng& rng) {
    return std::visit(overloaded{
                          [&](const TruncNormal& f) {
                              std::normal_distribution<double> n(f.mean, f.sd);
                              return std::max(0.0, n(rng));
                          },
                          [&](const Uniform& f) { return f.a + f.width * uniform01(rng); },
                          [&](const Poisson& f) {
                              std::poisson_distribution<long> p(f.rate);
                              return static_cast<double>(p(rng));
                          },
                          [&](const Exponential& f) { return -std::log1p(-uniform01(rng)) / f.rate; },
                          [&](const PiecewiseLinearCdf& f) { return inverse_cdf(f, uniform01(rng)); },
                          [&](const Deterministic& f) { return f.value; },
                      },
                      family);
}

double cdf(const DemandFamily& family, double x) {
    return std::visit(overloaded{
                          [&](const TruncNormal& f) {
                              if (x < 0.0)
                                  return 0.0;
                              if (f.sd == 0.0)
                                  return std::max(0.0, f.mean) <= x ? 1.0 : 0.0;
                              return normal_cdf((x - f.mean) / f.sd);
                          },
                          [&](const Uniform& f) {
                              if (x < f.a)
                                  return 0.0;
                              if (x >= f.a + f.width)
                                  return 1.0;
                              return (x - f.a) / f.width;
                          },
                          [&](const Poisson& f) { return poisson_cdf(f.rate, x); },
                          [&](const Exponential& f) { return x <= 0.0 ? 0.0 : -std::expm1(-f.rate * x); },
                          [&](const PiecewiseLinearCdf& f) {
                              const auto& k = f.knots;
                              if (x < k.front().first)
                                  return 0.0;
                              for (std::size_t i = 1; i < k.size(); ++i) {
                                  if (x < k[i].first) {
                                      const auto [x0, f0] = k[i - 1];
                                      const auto [x1, f1] = k[i];
                                      return f0 + (f1 - f0) * (x - x0) / (x1 - x0);
                                  }
                              }
                              return 1.0;
                          },
                          [&](const Deterministic& f) { return x >= f.value ? 1.0 : 0.0; },
                      },
                      family);
}

double mean(const DemandFamily& family) {
    return std::visit(overloaded{
                          [](const TruncNormal& f) {
                              if (f.sd == 0.0)
                                  return std::max(0.0, f.mean);
                              const double z = f.mean / f.sd;
                              return f.mean * normal_cdf(z) + f.sd * normal_pdf(z);
                          },
                          [](const Uniform& f) { return f.a + 0.5 * f.width; },
                          [](const Poisson& f) { return f.rate; },
                          [](const Exponential& f) { return 1.0 / f.rate; },
                          [](const PiecewiseLinearCdf& f) {
                              double m = 0.0;
                              for (std::size_t i = 1; i < f.knots.size(); ++i)
                                  m += piece_moments(f.knots[i - 1].first, f.knots[i - 1].second,
                                                     f.knots[i].first, f.knots[i].second)
                                           .first;
                              return m;
                          },
                          [](const Deterministic& f) { return f.value; },
                      },
                      family);
}

double stddev(const DemandFamily& family) {
    const double var = std::visit(
        overloaded{
            [](const TruncNormal& f) {
                if (f.sd == 0.0)
                    return 0.0;
                const double z = f.mean / f.sd;
                const double m1 = f.mean * normal_cdf(z) + f.sd * normal_pdf(z);
                const double m2 =
                    (f.mean * f.mean + f.sd * f.sd) * normal_cdf(z) + f.mean * f.sd * normal_pdf(z);
                return m2 - m1 * m1;
            },
            [](const Uniform& f) { return f.width * f.width / 12.0; },
            [](const Poisson& f) { return f.rate; },
            [](const Exponential& f) { return 1.0 / (f.rate * f.rate); },
            [](const PiecewiseLinearCdf& f) {
                double m1 = 0.0, m2 = 0.0;
                for (std::size_t i = 1; i < f.knots.size(); ++i) {
                    const auto [a, b] = piece_moments(f.knots[i - 1].first, f.knots[i - 1].second,
                                                      f.knots[i].first, f.knots[i].second);
                    m1 += a;
                    m2 += b;
                }
                return m2 - m1 * m1;
            },
            [](const Deterministic&) { return 0.0; },
        },
        family);
    return std::sqrt(std::max(0.0, var));
}

CdfAndMean cdf_and_mean(const DemandFamily& family) {
    return CdfAndMean{family, mean(family)};
}

DemandSchedule::DemandSchedule(std::vector<Segment> segments, int horizon)
    : segments_(std::move(segments)), horizon_(horizon) {
    if (horizon_ < 1)
        throw Error("schedule horizon must be >= 1");
    if (segments_.empty() || segments_.front().start != 1)
        throw Error("schedule must have a first segment starting at t = 1");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (i > 0 && segments_[i].start <= segments_[i - 1].start)
            throw Error("schedule segment starts must be strictly increasing");
        if (segments_[i].start > horizon_)
            throw Error("schedule segment starts must be <= T");
        validate(segments_[i].family);
    }
}

int DemandSchedule::segment_index(int t) const {
    if (t < 1 || t > horizon_)
        throw Error("period " + std::to_string(t) + " outside [1, T]");
    const auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                     [](int v, const Segment& s) { return v < s.start; });
    return static_cast<int>(it - segments_.begin()) - 1;
}

const DemandFamily& DemandSchedule::family_at(int t) const {
    return segments_[static_cast<std::size_t>(segment_index(t))].family;
}

std::vector<int> DemandSchedule::change_points() const {
    std::vector<int> cps;
    for (std::size_t i = 1; i < segments_.size(); ++i)
        cps.push_back(segments_[i].start);
    return cps;
}

DemandFamily draw_family(FamilyKind kind, const ParamRanges& r, Rng& rng) {
    switch (kind) {
    case FamilyKind::TruncNormal:
        return TruncNormal{uniform_real(rng, r.normal_mean_lo, r.normal_mean_hi), r.normal_sd};
    case FamilyKind::Uniform: {
        const double a = uniform_real(rng, r.uniform_a_lo, r.uniform_a_hi);
        const double w = uniform_real(rng, r.uniform_width_lo, r.uniform_width_hi);
        return Uniform{a, w};
    }
    case FamilyKind::Poisson:
        return Poisson{uniform_real(rng, r.poisson_rate_lo, r.poisson_rate_hi)};
    case FamilyKind::Exponential:
        return Exponential{uniform_real(rng, r.exp_rate_lo, r.exp_rate_hi)};
    }
    throw Error("unknown family kind");
}

DemandSchedule make_schedule(int segments, int horizon, FamilyKind kind, const ParamRanges& ranges,
                             Rng& rng) {
    if (horizon < 1)
        throw Error("make_schedule: T must be >= 1");
    if (segments < 1 || segments > horizon)
        throw Error("make_schedule: need 1 <= S <= T (S=" + std::to_string(segments) +
                    ", T=" + std::to_string(horizon) + ")");

    // Floyd's sampling of S−1 distinct points from {2..T}.
    const int pool = horizon - 1;
    const int want = segments - 1;
    std::unordered_set<int> chosen;
    std::vector<int> points;
    points.reserve(static_cast<std::size_t>(want));
    for (int j = pool - want; j < pool; ++j) {
        const int r = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(j) + 1));
        const int pick = chosen.count(r) ? j : r;
        chosen.insert(pick);
        points.push_back(pick + 2);
    }
    std::sort(points.begin(), points.end());

    std::vector<Segment> segs;
    segs.reserve(static_cast<std::size_t>(segments));
    segs.push_back({1, draw_family(kind, ranges, rng)});
    for (int cp : points)
        segs.push_back({cp, draw_family(kind, ranges, rng)});
    return DemandSchedule(std::move(segs), horizon);
}

std::pair<DemandFamily, DemandFamily> lower_bound_pair(int horizon) {
    if (horizon < 5)
        throw Error("lower_bound_pair requires T >= 5");
    const double r = 1.0 / std::sqrt(static_cast<double>(horizon));
    const double lo = 0.125 - r / 4.0;
    const double hi = 0.125 + r / 4.0;
    PiecewiseLinearCdf fa{{{0.0, 0.0}, {4.0, 4.0 * hi}, {400.0, 0.5 + r}, {404.0, 1.0}}};
    PiecewiseLinearCdf fb{{{0.0, 0.0}, {4.0, 4.0 * lo}, {400.0, 0.5 - r}, {404.0, 1.0}}};
    // 4·(1/8 ± r/4) = 1/2 ± r, so the flat middle piece is consistent.
    fa.knots[1].second = 0.5 + r;
    fb.knots[1].second = 0.5 - r;
    return {fa, fb};
}

}  // namespace nsic

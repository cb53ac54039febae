#pragma once

#include "nsic/inventory.hpp"
#include "nsic/rng.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nsic {

/// [D]^+ with D ~ N(mean, sd²): clamped at zero, not renormalized.
struct TruncNormal {
    double mean;
    double sd;
};
/// Continuous Uniform(a, a + width).
struct Uniform {
    double a;
    double width;
};
struct Poisson {
    double rate;
};
struct Exponential {
    double rate;
};
/// Continuous CDF given by linear interpolation between (x, F(x)) knots.
/// Knots start at (0, 0) and end at F = 1.
struct PiecewiseLinearCdf {
    std::vector<std::pair<double, double>> knots;
};
struct Deterministic {
    double value;
};

using DemandFamily =
    std::variant<TruncNormal, Uniform, Poisson, Exponential, PiecewiseLinearCdf, Deterministic>;

enum class FamilyKind { TruncNormal, Uniform, Poisson, Exponential };

FamilyKind family_kind_from_string(const std::string& s);
const char* to_string(FamilyKind k);

void validate(const DemandFamily& family);
std::string describe(const DemandFamily& family);

double sample(const DemandFamily& family, Rng& rng);

/// Inverse-CDF draw for a piecewise-linear family at a given uniform value.
double inverse_cdf(const PiecewiseLinearCdf& family, double u);

double cdf(const DemandFamily& family, double x);
double mean(const DemandFamily& family);
double stddev(const DemandFamily& family);

/// Closed-form CDF callable and mean.
struct CdfAndMean {
    DemandFamily family;
    double mean;
    double operator()(double x) const { return cdf(family, x); }
};
CdfAndMean cdf_and_mean(const DemandFamily& family);

/// Sampling ranges for randomly drawn segments.
struct ParamRanges {
    double normal_mean_lo = 1.0, normal_mean_hi = 100.0, normal_sd = 20.0;
    double uniform_a_lo = 1.0, uniform_a_hi = 100.0;
    double uniform_width_lo = 0.0, uniform_width_hi = 50.0;
    double poisson_rate_lo = 1.0, poisson_rate_hi = 100.0;
    double exp_rate_lo = 0.01, exp_rate_hi = 1.0;
};

struct Segment {
    int start;  ///< first period (1-based) of the segment
    DemandFamily family;
};

class DemandSchedule {
public:
    DemandSchedule(std::vector<Segment> segments, int horizon);

    int horizon() const { return horizon_; }
    int segment_count() const { return static_cast<int>(segments_.size()); }
    const std::vector<Segment>& segments() const { return segments_; }

    /// Index of the segment containing period t.
    int segment_index(int t) const;
    const DemandFamily& family_at(int t) const;
    /// Starts of segments 2..S, i.e. the change points.
    std::vector<int> change_points() const;

private:
    std::vector<Segment> segments_;
    int horizon_;
};

DemandFamily draw_family(FamilyKind kind, const ParamRanges& ranges, Rng& rng);

/// S segments with S−1 change points drawn without replacement from {2..T}.
DemandSchedule make_schedule(int segments, int horizon, FamilyKind kind,
                             const ParamRanges& ranges, Rng& rng);

/// The two hard-to-distinguish piecewise-linear demand laws of the stationary
/// lower-bound instance; requires T >= 5.
std::pair<DemandFamily, DemandFamily> lower_bound_pair(int horizon);

}  // namespace nsic

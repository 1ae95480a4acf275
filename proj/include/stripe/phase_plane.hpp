#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "stripe/core_model.hpp"
#include "stripe/ode.hpp"

namespace stripe {

/// A state (V, V') of the inner Hamiltonian flow V'' + f(V) = 0.
struct PhasePoint {
    double v = 0.0;
    double w = 0.0;
};

struct FlowOptions {
    ode::Tolerances tol{};
    /// Integration aborts once |v| or |w| exceeds this bound.
    double blowup_bound = 10.0;
};

/// Result of a flow integration. When `escaped` is set, `end` is the first accepted
/// state outside the box and `length_reached` the abscissa where it was hit.
struct FlowResult {
    PhasePoint end;
    bool escaped = false;
    double length_reached = 0.0;
    /// (y, v, w) after every accepted step, y measured from the start; only filled
    /// when requested.
    std::vector<std::array<double, 3>> trajectory;
};

/// w^2/2 + F(v); conserved by the flow.
double hamiltonian(const PhasePoint& pt, const Params& p);

/// Φ over `length` (>= 0). Never throws on escape; inspect `escaped`.
FlowResult flow(const PhasePoint& start, double length, const Params& p,
                const FlowOptions& opt = {}, bool keep_trajectory = false);

/// Same as flow() but throws BlowUp on escape.
PhasePoint flow_to(const PhasePoint& start, double length, const Params& p,
                   const FlowOptions& opt = {});

/// Backward flow: integrates the time-reversed system (v, w) -> (v, -w) dynamics,
/// i.e. returns Φ_{-length}(start).
FlowResult flow_backward(const PhasePoint& start, double length, const Params& p,
                         const FlowOptions& opt = {});

/// One point of the image curve Φ_R D, D = R·(1, sqrt(alpha)).
struct CurveSample {
    double s = 0.0;
    PhasePoint endpoint;
    /// w + sqrt(alpha) v at the endpoint; zero exactly on profiles.
    double residual = 0.0;
    /// Trajectory escaped the box; `residual` is then a sentinel carrying the sign of
    /// w + sqrt(alpha) v at the escape point.
    bool blowup = false;
};

/// Launch from (s, sqrt(alpha) s) at y = -R and integrate over 2R.
CurveSample shoot(double s, const Params& p, const FlowOptions& opt = {});

struct SamplingOptions {
    FlowOptions flow{};
    /// Number of geometrically graded points in (0, graded_until).
    std::size_t graded_points = 96;
    double graded_from = 1e-10;
    double graded_until = 1e-2;
    /// Adjacent endpoints farther apart than this are refined dyadically.
    double fold_distance = 0.05;
    int max_depth = 20;
    /// Worker threads for the initial grid; output does not depend on it.
    unsigned jobs = 1;
};

/// Samples Φ_R D for s on a graded grid in [0, s_max] (n uniform points on
/// [graded_until, s_max] plus the graded block and s = 0), refining between adjacent
/// samples whose endpoints are far apart or whose residuals change sign, so that every
/// sign change of the residual is bracketed by adjacent samples. Sorted by s.
std::vector<CurveSample> sample_image_of_line(const Params& p, double s_max, std::size_t n,
                                              const SamplingOptions& opt = {});

struct HomoclinicTest {
    Regime regime;
    /// Unstable slope sqrt(a lambda) of the saddle at the origin.
    double unstable_slope = 0.0;
    /// Launch-line slope sqrt(alpha).
    double line_slope = 0.0;
    /// True iff the launch line D meets the homoclinic orbit of 0.
    bool line_meets_homoclinic = false;
};

/// alpha < a lambda (strict); the boundary case goes to the ">=" side.
HomoclinicTest homoclinic_crossing(const Params& p);

}  // namespace stripe

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "stripe/core_model.hpp"
#include "stripe/phase_plane.hpp"

namespace stripe {

enum class ProfileKind { trivial, nontrivial };

/**
 * A solution of V'' + f(V) = 0 on (-R, R) with V'(-R) = sqrt(alpha) V(-R) and
 * V'(R) = -sqrt(alpha) V(R), sampled on a uniform grid, plus the decaying
 * exponential tails V(R) exp(-sqrt(alpha)(|y| - R)) outside the stripe.
 */
struct Profile {
    Params params;
    /// Shooting parameter V(-R).
    double s = 0.0;
    std::vector<double> y;
    std::vector<double> v;
    std::vector<double> w;
    double center_value = 0.0;
    /// c = V(R) exp(sqrt(alpha) R).
    double tail_coeff = 0.0;
    double parity_defect = 0.0;
    bool even = true;
    ProfileKind kind = ProfileKind::trivial;
    /// Shooting residual at s.
    double residual = 0.0;
    /// |d residual / ds| at s; small values flag a nearly tangential crossing.
    double transversality = 0.0;

    std::size_t size() const { return y.size(); }
    double spacing() const { return y.size() > 1 ? y[1] - y[0] : 0.0; }
    /// V at any y; cubic Hermite inside the stripe, analytic tails outside.
    double value_at(double yy) const;
    double slope_at(double yy) const;
    double min_value() const;
    double max_value() const;
};

struct Residual {
    double value = 0.0;
    /// Escape from the phase-plane box; `value` is then a ±1e6 sentinel.
    bool blowup = false;
};

struct ProfileWarning {
    enum class Kind { tangency, negative_values } kind;
    double s = 0.0;
    std::string message;
};

struct ProfileSet {
    /// Ordered by s ascending; the trivial profile comes first.
    std::vector<Profile> profiles;
    std::size_t largest = 0;
    std::vector<ProfileWarning> warnings;

    std::size_t nontrivial_count() const { return profiles.empty() ? 0 : profiles.size() - 1; }
    const Profile& vm() const { return profiles.at(largest); }
};

struct ProfileOptions {
    SamplingOptions sampling{};
    double s_max = 2.0;
    std::size_t n_samples = 400;
    std::size_t grid_intervals = 2048;
    double root_width = 1e-12;
    /// Roots closer than this in s trigger a tangency warning.
    double tangency_s = 1e-6;
    /// Residual extrema within this of zero without a sign change trigger one too.
    double tangency_residual = 1e-8;
    /// Only sampled local minima of |residual| below this are polished.
    double extremum_screen = 0.1;
};

/// w(R) + sqrt(alpha) v(R) after shooting from (s, sqrt(alpha) s) at -R.
Residual residual(double s, const Params& p, const FlowOptions& opt = {});

/// Integrates from (s, sqrt(alpha) s) and samples (V, V') on `intervals` + 1 uniform
/// nodes of [-R, R]. Throws BlowUp if the trajectory escapes.
Profile make_profile(double s, const Params& p, std::size_t intervals = 2048,
                     const FlowOptions& opt = {});

/// Interior local minimum of |residual| located by Brent's method.
struct ResidualExtremum {
    double s = 0.0;
    double value = 0.0;
    /// Sampled neighbours enclosing the extremum.
    double lo = 0.0;
    double hi = 0.0;
};

/// Polished interior local minima of |residual| whose neighbours share a sign, for
/// sampled values below `screen`. These are fold (saddle-node) candidates.
std::vector<ResidualExtremum> residual_extrema(const Params& p, const std::vector<CurveSample>& samples,
                                              double screen, const FlowOptions& opt = {});

/// All nonnegative-launch profiles, trivial one included.
ProfileSet find_profiles(const Params& p, const ProfileOptions& opt = {});

/// V_M: the profile with the largest s. Throws NoNontrivialProfile when R < R0, and
/// Error when the evenness or V_M(0) < 1 checks fail.
Profile largest_profile(const Params& p, const ProfileOptions& opt = {});

/// (y, V) on n uniform points of [-y_max, y_max]; requires y_max > R.
std::vector<std::pair<double, double>> extend_to_line(const Profile& profile, double y_max,
                                                      std::size_t n);

}  // namespace stripe

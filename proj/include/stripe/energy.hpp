#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stripe/profile_solver.hpp"
#include "stripe/stability.hpp"

namespace stripe {

struct EnergyReport {
    /// Energy over the whole line (tails included).
    double e_line = 0.0;
    /// Robin energy of the restriction to (-R, R).
    double e_interval = 0.0;
    double quadrature_error_estimate = 0.0;
};

/// Composite Simpson of |V'|^2/2 - F(V) on the profile grid plus the Robin boundary
/// terms sqrt(alpha)/2 (V(R)^2 + V(-R)^2).
double energy_interval(const Profile& V);

/// Richardson estimate of the Simpson error (grid vs every other node).
double energy_interval_error(const Profile& V);

/// Stripe part plus closed-form integrals of the exponential tails.
double energy_line(const Profile& V);

EnergyReport energy_report(const Profile& V);

struct EnergyDerivative {
    double analytic = 0.0;          ///< -2 F(V_M(0))
    double finite_difference = 0.0; ///< central difference of R -> E(V_M^R)
    double transversality = 0.0;    ///< |d residual/ds| at V_M
};

/// Compares d/dR E(V_M^R) with -2 F(V_M^R(0)). Throws FoldTooClose when the crossing at
/// V_M is too tangential for R -> V_M^R to be differentiable in practice.
EnergyDerivative dE_dR_identity(const Params& p, double dR = 1e-3, double min_transversality = 1e-2,
                                const ProfileOptions& opt = {});

struct R0Result {
    double r0 = 0.0;
    /// Final bisection bracket: no non-trivial profile at lo, some at hi.
    double lo = 0.0;
    double hi = 0.0;
    /// Location of the residual extremum that touches zero at the fold.
    double fold_s = 0.0;
};

/// Critical thickness where non-trivial profiles appear. Only lambda, a, alpha of `p`
/// are used. The bracket is expanded when it does not straddle the transition.
R0Result find_R0(const Params& p, double R_lo, double R_hi, double width = 1e-6,
                 const ProfileOptions& opt = {});
R0Result find_R0(const Params& p, double width = 1e-6, const ProfileOptions& opt = {});

struct RootResult {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Energy of the largest profile at thickness R (throws when there is none).
double largest_profile_energy(const Params& p, double R, const ProfileOptions& opt = {});

/// Zero of R -> E(V_M^R) above r0. Throws SignPatternViolation if E(V_M) <= 0 at r0 + delta.
RootResult find_R1(const Params& p, double r0, double delta = 1e-3, double width = 1e-6,
                   const ProfileOptions& opt = {});

struct R2Result {
    RootResult root;
    /// V_M(0) >= beta already at r0 + delta: E(V_M) decreases on the whole range.
    bool empty_window = false;
};

/// Zero of R -> V_M^R(0) - beta, or r0 with the empty-window flag.
R2Result find_R2(const Params& p, double r0, double delta = 1e-3, double width = 1e-6,
                 const ProfileOptions& opt = {});

struct Thresholds {
    double r0 = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    bool r2_empty_window = false;
    double r0_width = 0.0;
    double r1_width = 0.0;
    double r2_width = 0.0;
    double fold_s = 0.0;
};

Thresholds compute_thresholds(const Params& p, double width = 1e-6, const ProfileOptions& opt = {});

struct ProfileSummary {
    double s = 0.0;
    double center_value = 0.0;
    double energy = 0.0;
    int k = 0;
    bool marginal = false;
};

struct BifurcationRow {
    double R = 0.0;
    std::size_t profile_count = 0;
    double vm_center = 0.0;
    double e_vm = 0.0;
    std::vector<ProfileSummary> profiles;
    /// Solver warnings (tangency, ...) carried inline.
    std::vector<std::string> warnings;
    /// Broken module invariants, if any.
    std::vector<std::string> violations;
};

BifurcationRow bifurcation_row(const Params& p, double R, const ProfileOptions& opt = {});

/// One row per R; rows are computed independently (`jobs` workers) and returned in grid order.
std::vector<BifurcationRow> bifurcation_sweep(const Params& p, const std::vector<double>& R_grid,
                                              unsigned jobs = 1, const ProfileOptions& opt = {});

}  // namespace stripe

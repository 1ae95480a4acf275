#pragma once

#include <vector>

#include "stripe/ode.hpp"
#include "stripe/profile_solver.hpp"

namespace stripe {

/// Prüfer angle of the linearized problem phi'' + f'(V) phi = mu phi along a profile.
struct ThetaTrace {
    double mu = 0.0;
    std::vector<double> y;
    std::vector<double> theta;
    double theta_end = 0.0;
};

struct SpectralReport {
    /// Number of nonnegative eigenvalues of L_V.
    int k = 0;
    double h0 = 0.0;
    /// mu_1 > mu_2 > ... >= 0, filled by analyze() / eigenvalues_nonneg().
    std::vector<double> eigenvalues;
    /// h(0) lies within the marginal tolerance of a multiple of pi.
    bool marginal = false;
};

struct EigenFunction {
    double mu = 0.0;
    std::vector<double> y;
    std::vector<double> phi;
    std::vector<double> dphi;
    std::vector<double> rho;
    /// Decay rate sqrt(mu + alpha) of the tails outside the stripe.
    double tail_rate = 0.0;
    double R = 0.0;

    double value_at(double yy) const;
};

struct StabilityOptions {
    ode::Tolerances tol{1e-12, 1e-10};
    double marginal_tol = 1e-8;
    double eigen_tol = 1e-10;
};

/// Right-hand side of the angle equation at potential value q = mu - f'(V(y)).
inline double theta_rhs(double theta, double q) {
    const double c = std::cos(theta), s = std::sin(theta);
    return -s * s + q * c * c;
}

/// Integrates the angle equation from theta(-R) = arctan(sqrt(mu + alpha)); mu > -alpha.
ThetaTrace theta_solve(const Profile& V, double mu, const StabilityOptions& opt = {});

/// Counting function theta_mu(R) + arctan(sqrt(mu + alpha)).
double h(const Profile& V, double mu, const StabilityOptions& opt = {});

/// sup over the grid of |f'(V)|.
double sup_abs_f_prime(const Profile& V);

/// k = 1 - ceil(h(0)/pi), clamped at 0. Eigenvalues are not computed.
SpectralReport count_nonneg(const Profile& V, const StabilityOptions& opt = {});

/// Solves h(mu) = (1 - j) pi for j = 1..k by bisection on [0, sup|f'(V)| + 1].
std::vector<double> eigenvalues_nonneg(const Profile& V, const SpectralReport& report,
                                       const StabilityOptions& opt = {});

/// count_nonneg plus the eigenvalues.
SpectralReport analyze(const Profile& V, const StabilityOptions& opt = {});

/// Eigenfunction of the largest eigenvalue from the angle/amplitude pair, normalized to
/// sup phi = 1. Throws PositivityViolation if phi <= 0 somewhere on [-R, R].
EigenFunction principal_eigenfunction(const Profile& V, double mu1, const StabilityOptions& opt = {});

/// Signed passages of theta_0 through the directions of D' (angles -arctan sqrt(alpha)
/// + j pi), clockwise counted positive; touching a direction counts as passing it.
int tangent_crossing_count(const Profile& V, const StabilityOptions& opt = {});

}  // namespace stripe

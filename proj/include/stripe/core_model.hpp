#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "stripe/errors.hpp"

namespace stripe {

/**
 * Model constants of the stripe problem
 *
 *   u_t = Δu + f(u) 1_{|y|<=R} - alpha u 1_{|y|>R},   f(u) = lambda u (u - a)(1 - u).
 *
 * Invariants: lambda > 0, 0 < a < 1/2, alpha > 0, R > 0. The constructor rejects
 * anything else and names the offending field.
 */
class Params {
public:
    Params(double lambda, double a, double alpha, double R);

    double lambda() const { return lambda_; }
    double a() const { return a_; }
    double alpha() const { return alpha_; }
    double R() const { return R_; }
    double sqrt_alpha() const { return std::sqrt(alpha_); }

    /// Same constants, different half-thickness.
    Params with_R(double R) const { return Params(lambda_, a_, alpha_, R); }

    friend bool operator==(const Params&, const Params&) = default;

private:
    double lambda_;
    double a_;
    double alpha_;
    double R_;
};

/// Which side of the homoclinic test the constants fall on.
struct Regime {
    /// true iff alpha < a * lambda: the launch line enters the homoclinic loop of 0.
    bool supercritical_line = false;
};

Regime regime_of(const Params& p);

inline double f(double u, const Params& p) {
    return p.lambda() * u * (u - p.a()) * (1.0 - u);
}

inline double f_prime(double u, const Params& p) {
    return p.lambda() * (-3.0 * u * u + 2.0 * (1.0 + p.a()) * u - p.a());
}

/// Primitive of f vanishing at 0.
inline double F(double u, const Params& p) {
    const double u2 = u * u;
    return p.lambda() * u2 * (-u2 / 4.0 + (1.0 + p.a()) * u / 3.0 - p.a() / 2.0);
}

/// Primitive of the full-line nonlinearity g(y, u).
inline double G(double y, double u, const Params& p) {
    return std::abs(y) <= p.R() ? F(u, p) : -0.5 * p.alpha() * u * u;
}

/// Unique zero of F in (a, 1).
double beta(const Params& p);

/// Upper bound of |f'| over [lo, hi].
double max_abs_f_prime(const Params& p, double lo, double hi);

// Serialization: flat "key = value" text and JSON, keys lambda, a, alpha, R.
std::string to_key_value(const Params& p);
Params params_from_key_value(const std::string& text);
nlohmann::json to_json(const Params& p);
Params params_from_json(const nlohmann::json& j);

}  // namespace stripe

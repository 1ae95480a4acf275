#pragma once

// Adaptive Dormand-Prince 5(4) stepping shared by the phase-plane, Prüfer and
// oracle integrations. Wraps boost::odeint's controlled stepper so callers can
// stop exactly at prescribed abscissae and inspect the state after every step.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include <boost/numeric/odeint.hpp>

namespace stripe::ode {

struct Tolerances {
    double abs = 1e-14;
    double rel = 1e-12;
};

/// Integrates x' = rhs(t, x) from t0 to t1 (either direction). `accept(t, x)` is called
/// after every accepted step; returning false aborts and the function returns false.
/// `dt` is the step-size hint carried between calls.
template <std::size_t N, class Rhs, class Accept>
bool integrate(const Rhs& rhs, std::array<double, N>& x, double t0, double t1, double& dt,
               const Tolerances& tol, Accept&& accept) {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, N>;
    auto stepper = odeint::make_controlled(tol.abs, tol.rel, odeint::runge_kutta_dopri5<State>());
    auto system = [&rhs](const State& s, State& ds, double t) { rhs(t, s, ds); };

    const double dir = t1 >= t0 ? 1.0 : -1.0;
    double t = t0;
    if (!(std::abs(dt) > 0.0)) dt = 1e-3;
    dt = dir * std::abs(dt);
    int rejected_in_row = 0;
    while (dir * (t1 - t) > 0.0) {
        double step = dir * std::min(std::abs(dt), std::abs(t1 - t));
        const bool last = std::abs(step) >= std::abs(t1 - t);
        auto res = stepper.try_step(system, x, t, step);
        if (res == odeint::success) {
            rejected_in_row = 0;
            if (last) t = t1;  // avoid roundoff drift at the target abscissa
            // try_step wrote the suggested next size into `step`; a truncated final
            // step must not shrink the hint for the next call.
            if (!last || std::abs(step) > std::abs(dt)) dt = step;
            if (!accept(t, x)) return false;
        } else {
            dt = step;
            if (++rejected_in_row > 200) return false;
        }
    }
    return true;
}

template <std::size_t N, class Rhs>
void integrate(const Rhs& rhs, std::array<double, N>& x, double t0, double t1, double& dt,
               const Tolerances& tol = {}) {
    integrate(rhs, x, t0, t1, dt, tol, [](double, const std::array<double, N>&) { return true; });
}

}  // namespace stripe::ode

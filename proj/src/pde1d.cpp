#include "stripe/pde1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stripe/stability.hpp"

namespace stripe {

Field1D make_field1d(const Params& p, std::size_t nodes, const std::function<double(double)>& init) {
    if (nodes < 64) throw Error("Field1D needs at least 64 nodes");
    Field1D u{p, 2.0 * p.R() / static_cast<double>(nodes - 1), std::vector<double>(nodes), 0.0};
    for (std::size_t i = 0; i < nodes; ++i) u.u[i] = init(u.y(i));
    return u;
}

Field1D field_from_profile(const Profile& V, std::size_t nodes) {
    return make_field1d(V.params, nodes, [&V](double y) { return V.value_at(y); });
}

double dt_max(const Params& p) {
    return 1.0 / max_abs_f_prime(p, -0.1, 1.1);
}

double discrete_energy(const Field1D& u) {
    const Params& p = u.p;
    const std::size_t n = u.size() - 1;
    double grad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = u.u[i + 1] - u.u[i];
        grad += d * d;
    }
    double pot = 0.5 * (F(u.u[0], p) + F(u.u[n], p));
    for (std::size_t i = 1; i < n; ++i) pot += F(u.u[i], p);
    const double ends = u.u[0] * u.u[0] + u.u[n] * u.u[n];
    return grad / (2.0 * u.dy) + 0.5 * p.sqrt_alpha() * ends - u.dy * pot;
}

Stepper1D::Stepper1D(const Params& p, std::size_t nodes, double dy, double dt) : p_(p), dt_(dt) {
    const double limit = dt_max(p);
    if (!(dt > 0.0) || dt > limit) {
        std::ostringstream os;
        os << "time step " << dt << " exceeds the monotonicity bound " << limit;
        throw StepTooLarge(os.str());
    }
    const double r = dt / (dy * dy);
    const double k = p.sqrt_alpha();
    lower_.assign(nodes, -r);
    upper_.assign(nodes, -r);
    diag_.assign(nodes, 1.0 + 2.0 * r);
    // Ghost nodes fold the Robin condition into the end rows.
    upper_[0] = -2.0 * r;
    lower_[nodes - 1] = -2.0 * r;
    diag_[0] = diag_[nodes - 1] = 1.0 + 2.0 * r * (1.0 + dy * k);

    c_prime_.resize(nodes);
    denom_.resize(nodes);
    denom_[0] = diag_[0];
    c_prime_[0] = upper_[0] / denom_[0];
    for (std::size_t i = 1; i < nodes; ++i) {
        denom_[i] = diag_[i] - lower_[i] * c_prime_[i - 1];
        c_prime_[i] = upper_[i] / denom_[i];
    }
}

void Stepper1D::step(Field1D& u) const {
    const std::size_t n = u.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = u.u[i] + dt_ * f(u.u[i], p_);
    d[0] /= denom_[0];
    for (std::size_t i = 1; i < n; ++i) d[i] = (d[i] - lower_[i] * d[i - 1]) / denom_[i];
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c_prime_[i] * d[i + 1];
    u.u = std::move(d);
    u.t += dt_;
}

void step1d(Field1D& u, double dt) {
    Stepper1D(u.p, u.size(), u.dy, dt).step(u);
}

double sup_distance(const Field1D& u, const Profile& V) {
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u.u[i] - V.value_at(u.y(i))));
    return d;
}

namespace {

void classify(Run1DResult& res, const std::vector<Profile>& candidates) {
    res.limit_index = -1;
    res.limit_distance = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        const double d = sup_distance(res.final_state, candidates[j]);
        if (d < res.limit_distance) {
            res.limit_distance = d;
            res.limit_index = static_cast<int>(j);
        }
    }
}

}  // namespace

Run1DResult run1d(const Field1D& u0, const std::vector<Profile>& candidates, const Run1DOptions& opt) {
    const Stepper1D stepper(u0.p, u0.size(), u0.dy, opt.dt);
    Run1DResult res{u0};
    Field1D& u = res.final_state;
    res.snapshots.push_back({u.t, u.u});
    res.times.push_back(u.t);
    res.energies.push_back(discrete_energy(u));
    res.max_energy_increase = -std::numeric_limits<double>::infinity();

    const auto steps = static_cast<std::size_t>(std::ceil(opt.T / opt.dt - 1e-9));
    bool settled = false;
    for (std::size_t n = 1; n <= steps; ++n) {
        const auto before = u.u;
        stepper.step(u);
        const double e = discrete_energy(u);
        res.max_energy_increase = std::max(res.max_energy_increase, e - res.energies.back());
        res.times.push_back(u.t);
        res.energies.push_back(e);
        if (opt.snapshot_every && n % opt.snapshot_every == 0) res.snapshots.push_back({u.t, u.u});
        if (opt.on_step) opt.on_step(u, e);

        double rate = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) rate = std::max(rate, std::abs(u.u[i] - before[i]));
        rate /= opt.dt;
        if (rate < opt.stationary_rate) {
            classify(res, candidates);
            if (res.limit_distance <= opt.classify_radius) {
                settled = true;
                break;
            }
        }
    }
    if (res.snapshots.back().t != u.t) res.snapshots.push_back({u.t, u.u});
    if (!settled) classify(res, candidates);

    if (!(res.limit_distance <= opt.classify_radius)) {
        const std::size_t m = res.energies.size();
        const bool decreasing = m >= 2 && res.energies[m - 1] < res.energies[m - 2];
        res.limit_index = -1;
        if (decreasing) {
            std::ostringstream os;
            os << "run1d: state at t = " << u.t << " is " << res.limit_distance
               << " from the nearest profile and the energy is still decreasing";
            throw NonConvergence(os.str());
        }
    }
    return res;
}

bool comparison_check(const Field1D& u0, const Field1D& v0, double T, double dt) {
    if (u0.size() != v0.size() || u0.dy != v0.dy) throw Error("comparison_check: grids differ");
    const Stepper1D stepper(u0.p, u0.size(), u0.dy, dt);
    Field1D u = u0, v = v0;
    auto ordered = [&] {
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u.u[i] > v.u[i] + 1e-12) return false;
        return true;
    };
    if (!ordered()) return false;
    const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    for (std::size_t n = 0; n < steps; ++n) {
        stepper.step(u);
        stepper.step(v);
        if (!ordered()) return false;
    }
    return true;
}

UnstableManifold unstable_manifold_runs(const Profile& V, const std::vector<Profile>& candidates, double eps,
                                        std::size_t nodes, const Run1DOptions& opt) {
    if (!(eps >= 1e-4 && eps <= 1e-2)) throw Error("unstable_manifold_runs: eps must lie in [1e-4, 1e-2]");
    const auto rep = analyze(V);
    if (rep.k < 1 || rep.eigenvalues.empty() || !(rep.eigenvalues[0] > 0.0))
        throw Error("unstable_manifold_runs: profile has no positive eigenvalue");

    const double mu1 = rep.eigenvalues[0];
    const auto phi = principal_eigenfunction(V, mu1);
    const Field1D base = field_from_profile(V, nodes);
    const double e_base = discrete_energy(base);
    auto shifted = [&](double sign) {
        return make_field1d(V.params, nodes, [&](double y) { return V.value_at(y) + sign * eps * phi.value_at(y); });
    };

    // The tolerance absorbs the drift of the sampled V, which is not an exact discrete equilibrium.
    constexpr double order_tol = 1e-6;
    bool brackets = true;
    bool window = true;

    Run1DOptions minus_opt = opt;
    bool near_zero = false;
    minus_opt.on_step = [&](const Field1D& u, double e) {
        double sup = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u.u[i] > base.u[i] + order_tol) brackets = false;
            sup = std::max(sup, std::abs(u.u[i]));
        }
        near_zero = near_zero || sup < 1e-2;
        if (!near_zero && !(e > 0.0 && e < e_base)) window = false;
        if (opt.on_step) opt.on_step(u, e);
    };
    auto minus = run1d(shifted(-1.0), candidates, minus_opt);

    Run1DOptions plus_opt = opt;
    plus_opt.on_step = [&](const Field1D& u, double e) {
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u.u[i] < base.u[i] - order_tol) brackets = false;
        if (opt.on_step) opt.on_step(u, e);
    };
    auto plus = run1d(shifted(1.0), candidates, plus_opt);
    return {mu1, std::move(minus), std::move(plus), brackets, window};
}

}  // namespace stripe

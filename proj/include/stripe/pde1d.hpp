#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "stripe/profile_solver.hpp"

namespace stripe {

/// Nodal field on [-R, R] (nodes at both ends) at time t.
struct Field1D {
    Params p;
    double dy = 0.0;
    std::vector<double> u;
    double t = 0.0;

    std::size_t size() const { return u.size(); }
    double y(std::size_t i) const { return -p.R() + dy * static_cast<double>(i); }
};

/// Uniform field with `nodes` nodes (at least 64) sampled from `init`.
Field1D make_field1d(const Params& p, std::size_t nodes, const std::function<double(double)>& init);
/// A profile sampled onto a fresh grid.
Field1D field_from_profile(const Profile& V, std::size_t nodes);

/// 1 / max |f'| over [-0.1, 1.1].
double dt_max(const Params& p);

/// Discrete energy sum (u_{i+1}-u_i)^2 / (2 dy) + sqrt(alpha)/2 (u_0^2 + u_N^2) - sum w_i F(u_i)
/// with trapezoid weights w. The step below is a gradient scheme for exactly this functional.
double discrete_energy(const Field1D& u);

/// Semi-implicit step: (I - dt L) u^{n+1} = u^n + dt f(u^n), L the second difference with
/// Robin ghost nodes u_{-1} = u_1 - 2 dy sqrt(alpha) u_0. Throws StepTooLarge when dt > dt_max.
class Stepper1D {
public:
    Stepper1D(const Params& p, std::size_t nodes, double dy, double dt);
    void step(Field1D& u) const;
    double dt() const { return dt_; }

private:
    Params p_;
    double dt_;
    std::vector<double> lower_, diag_, upper_;  // (I - dt L)
    std::vector<double> c_prime_, denom_;       // Thomas factorisation
};

void step1d(Field1D& u, double dt);

struct Snapshot1D {
    double t = 0.0;
    std::vector<double> u;
};

struct Run1DOptions {
    double T = 100.0;
    double dt = 0.1;
    /// Keep a snapshot every this many steps (0: first and last only).
    std::size_t snapshot_every = 0;
    /// Stop once sup|u^{n+1} - u^n| / dt falls below this and the state is classified.
    double stationary_rate = 1e-9;
    double classify_radius = 1e-3;
    /// Called after every step with the new state and its discrete energy.
    std::function<void(const Field1D&, double)> on_step;
};

struct Run1DResult {
    Field1D final_state;
    std::vector<Snapshot1D> snapshots;
    std::vector<double> times;
    std::vector<double> energies;
    /// Largest single-step energy increase seen (negative if strictly decreasing).
    double max_energy_increase = 0.0;
    /// Index into the candidate list of the nearest profile, -1 when none is within the radius.
    int limit_index = -1;
    double limit_distance = 0.0;
};

/// Evolves to T (or to stationarity) and classifies the end state against `candidates` in
/// sup norm. Throws NonConvergence when nothing is within the radius and the energy is still
/// decreasing at the end.
Run1DResult run1d(const Field1D& u0, const std::vector<Profile>& candidates, const Run1DOptions& opt);

double sup_distance(const Field1D& u, const Profile& V);

/// Evolves both fields with the same steps; true when u <= v + 1e-12 at every step.
bool comparison_check(const Field1D& u0, const Field1D& v0, double T, double dt);

struct UnstableManifold {
    double mu1 = 0.0;
    Run1DResult minus;
    Run1DResult plus;
    /// u_- <= V <= u_+ (up to 1e-12) at every recorded step.
    bool brackets_profile = true;
    /// Energy along u_- stayed in (0, E(V)) until u_- came within 1e-2 of zero.
    bool minus_energy_window = true;
};

/// Runs from V - eps phi and V + eps phi, phi the principal eigenfunction (sup phi = 1).
/// Candidates are the profiles of V's ProfileSet. Requires k >= 1 and eps in [1e-4, 1e-2].
UnstableManifold unstable_manifold_runs(const Profile& V, const std::vector<Profile>& candidates, double eps,
                                        std::size_t nodes, const Run1DOptions& opt);

}  // namespace stripe

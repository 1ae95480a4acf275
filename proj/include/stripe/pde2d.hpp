#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stripe/core_model.hpp"

namespace stripe {

struct Grid2DSpec {
    std::size_t nx = 400;  ///< intervals in x
    std::size_t ny = 200;  ///< intervals in y
    double Lx = 80.0;
    /// Half-height; 0 selects R + 8/sqrt(alpha).
    double Ly = 0.0;
};

/// Nodal field on [0, Lx] x [-Ly, Ly], row-major with x fastest.
struct Field2D {
    Params p;
    double Lx = 0.0;
    double Ly = 0.0;
    std::size_t nx = 0;  ///< nodes in x
    std::size_t ny = 0;  ///< nodes in y
    double dx = 0.0;
    double dy = 0.0;
    std::vector<double> u;
    double t = 0.0;

    double x(std::size_t i) const { return dx * static_cast<double>(i); }
    double y(std::size_t j) const { return -Ly + dy * static_cast<double>(j); }
    double& at(std::size_t i, std::size_t j) { return u[j * nx + i]; }
    double at(std::size_t i, std::size_t j) const { return u[j * nx + i]; }
    /// Row through y = 0 (ny is forced odd so this is a grid row).
    std::size_t center_row() const { return ny / 2; }
};

/// Throws Error unless Ly > R + 6/sqrt(alpha) and the grid has at least 4 intervals each way.
/// The y interval count is rounded up to even so that y = 0 is a node row.
Field2D make_field2d(const Params& p, const Grid2DSpec& spec, const std::function<double(double, double)>& init);

/// u = 1 on {x < 10, |y| < R}, 0 elsewhere, then one implicit diffusion step of length dx^2.
Field2D standard_bump(const Params& p, const Grid2DSpec& spec = {});

enum class Scheme2D { adi, explicit_euler };

struct FrontSample {
    double t = 0.0;
    /// Rightmost crossing of 1/2 along y = 0; empty when there is none.
    std::optional<double> x_star;
    double sup_center = 0.0;  ///< sup_x u(x, 0, t)
    double mass = 0.0;        ///< integral of u over the domain
};

struct Snapshot2D {
    double t = 0.0;
    std::vector<double> u;
};

struct Run2DOptions {
    double T = 150.0;
    double dt = 0.05;
    Scheme2D scheme = Scheme2D::adi;
    std::size_t track_every = 10;     ///< steps between FrontSamples
    std::size_t snapshot_every = 0;   ///< steps between full snapshots (0: none)
    /// Stop once the interface leaves [stop_left, Lx - stop_right].
    double stop_left = 2.0;
    double stop_right = 5.0;
};

struct Run2DResult {
    Field2D final_state;
    std::vector<FrontSample> track;
    std::vector<Snapshot2D> snapshots;
    bool stopped_early = false;
};

/// Reaction f(u) on |y| <= R and -alpha u outside; Neumann at x = 0, Lx; Dirichlet at |y| = Ly.
/// ADI (Peaceman-Rachford) requires dt <= dt_max(p); the explicit variant additionally
/// dt <= min(dx, dy)^2 / 4. Violations throw StepTooLarge.
Run2DResult run2d(const Field2D& u0, const Run2DOptions& opt);

FrontSample measure(const Field2D& u);

struct FrontMeasurement {
    double c = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    /// RMS of the fit residuals over the interface displacement across the window.
    double fit_residual = 0.0;
    std::size_t samples = 0;
    bool accepted() const { return fit_residual <= 0.05; }
};

/// Least-squares slope of x*(t) over the last 60% of the tracked time. Throws NoInterface when
/// fewer than three samples in that window have an interface.
FrontMeasurement front_speed(const std::vector<FrontSample>& track);

enum class RegimeLabel { collapse, shrinking, spreading, ambiguous };
std::string to_string(RegimeLabel label);

struct RegimeReport {
    RegimeLabel label = RegimeLabel::ambiguous;
    /// Label the dynamics alone would give (differs from `label` only when ambiguous).
    RegimeLabel measured = RegimeLabel::ambiguous;
    double sup_center_half = 0.0;
    std::optional<FrontMeasurement> front;
    double run_time = 0.0;
    bool stopped_early = false;
};

/// The samples up to the first one whose interface has left [x_lo, x_hi] after having been
/// inside (that sample excluded).
std::vector<FrontSample> tracked_part(const std::vector<FrontSample>& track, double x_lo, double x_hi);

struct RegimeOptions {
    Grid2DSpec grid;
    /// T is the protocol horizon; the stop bounds only truncate the tracked part used for the fit.
    Run2DOptions run{.T = 40.0};
    double ambiguity_band = 0.02;
};

/// Standard bump protocol: collapse if sup_x u(x,0,T/2) < a, otherwise the sign of the
/// interface trend decides between shrinking and spreading. Ambiguous within the band around
/// r0 or r1.
RegimeReport classify_regime(const Params& p, double r0, double r1, const RegimeOptions& opt = {});

}  // namespace stripe

#include "stripe/pde2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stripe/pde1d.hpp"

namespace stripe {

namespace {

// Pre-factored tridiagonal solve (Thomas algorithm) with constant interior coefficients.
class Tridiag {
public:
    Tridiag() = default;
    Tridiag(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
        : lower_(std::move(lower)), upper_(std::move(upper)) {
        const std::size_t n = diag.size();
        cp_.resize(n);
        den_.resize(n);
        den_[0] = diag[0];
        cp_[0] = upper_[0] / den_[0];
        for (std::size_t i = 1; i < n; ++i) {
            den_[i] = diag[i] - lower_[i] * cp_[i - 1];
            cp_[i] = upper_[i] / den_[i];
        }
    }

    // Solves in place on a strided view.
    void solve(double* d, std::size_t stride) const {
        const std::size_t n = den_.size();
        d[0] /= den_[0];
        for (std::size_t i = 1; i < n; ++i) d[i * stride] = (d[i * stride] - lower_[i] * d[(i - 1) * stride]) / den_[i];
        for (std::size_t i = n - 1; i-- > 0;) d[i * stride] -= cp_[i] * d[(i + 1) * stride];
    }

private:
    std::vector<double> lower_, upper_, cp_, den_;
};

// I - c Dxx with mirrored ghosts at both x ends.
Tridiag neumann_system(std::size_t n, double c) {
    std::vector<double> lo(n, -c), di(n, 1.0 + 2.0 * c), up(n, -c);
    up[0] = -2.0 * c;
    lo[n - 1] = -2.0 * c;
    return {lo, di, up};
}

// I - c Dyy on interior rows; the boundary rows hold zero.
Tridiag dirichlet_system(std::size_t n, double c) {
    return {std::vector<double>(n, -c), std::vector<double>(n, 1.0 + 2.0 * c), std::vector<double>(n, -c)};
}

double dxx(const Field2D& u, const std::vector<double>& v, std::size_t i, std::size_t j) {
    const std::size_t row = j * u.nx;
    const double left = i == 0 ? v[row + 1] : v[row + i - 1];
    const double right = i + 1 == u.nx ? v[row + i - 1] : v[row + i + 1];
    return (left - 2.0 * v[row + i] + right) / (u.dx * u.dx);
}

double dyy(const Field2D& u, const std::vector<double>& v, std::size_t i, std::size_t j) {
    return (v[(j - 1) * u.nx + i] - 2.0 * v[j * u.nx + i] + v[(j + 1) * u.nx + i]) / (u.dy * u.dy);
}

std::vector<double> reaction(const Field2D& u) {
    std::vector<double> r(u.u.size(), 0.0);
    const double R = u.p.R();
    for (std::size_t j = 1; j + 1 < u.ny; ++j) {
        const bool inside = std::abs(u.y(j)) <= R;
        for (std::size_t i = 0; i < u.nx; ++i) {
            const double v = u.at(i, j);
            r[j * u.nx + i] = inside ? f(v, u.p) : -u.p.alpha() * v;
        }
    }
    return r;
}

class Integrator2D {
public:
    Integrator2D(const Field2D& u, double dt, Scheme2D scheme) : dt_(dt), scheme_(scheme) {
        const double limit = dt_max(u.p);
        if (!(dt > 0.0) || dt > limit) {
            std::ostringstream os;
            os << "time step " << dt << " exceeds the reaction bound " << limit;
            throw StepTooLarge(os.str());
        }
        if (scheme == Scheme2D::explicit_euler) {
            const double h = std::min(u.dx, u.dy);
            if (dt > h * h / 4.0) {
                std::ostringstream os;
                os << "explicit step " << dt << " violates dt <= min(dx,dy)^2/4 = " << h * h / 4.0;
                throw StepTooLarge(os.str());
            }
        } else {
            x_sys_ = neumann_system(u.nx, 0.5 * dt / (u.dx * u.dx));
            y_sys_ = dirichlet_system(u.ny - 2, 0.5 * dt / (u.dy * u.dy));
        }
    }

    void step(Field2D& u) const {
        const auto r = reaction(u);
        const std::size_t nx = u.nx, ny = u.ny;
        if (scheme_ == Scheme2D::explicit_euler) {
            std::vector<double> next(u.u.size(), 0.0);
            for (std::size_t j = 1; j + 1 < ny; ++j)
                for (std::size_t i = 0; i < nx; ++i)
                    next[j * nx + i] = u.u[j * nx + i] + dt_ * (dxx(u, u.u, i, j) + dyy(u, u.u, i, j) + r[j * nx + i]);
            u.u = std::move(next);
        } else {
            const double h = 0.5 * dt_;
            std::vector<double> star(u.u.size(), 0.0);
            for (std::size_t j = 1; j + 1 < ny; ++j) {
                for (std::size_t i = 0; i < nx; ++i)
                    star[j * nx + i] = u.u[j * nx + i] + h * (dyy(u, u.u, i, j) + r[j * nx + i]);
                x_sys_.solve(&star[j * nx], 1);
            }
            std::vector<double> next(u.u.size(), 0.0);
            for (std::size_t j = 1; j + 1 < ny; ++j)
                for (std::size_t i = 0; i < nx; ++i)
                    next[j * nx + i] = star[j * nx + i] + h * (dxx(u, star, i, j) + r[j * nx + i]);
            for (std::size_t i = 0; i < nx; ++i) y_sys_.solve(&next[nx + i], nx);
            u.u = std::move(next);
        }
        u.t += dt_;
    }

private:
    double dt_;
    Scheme2D scheme_;
    Tridiag x_sys_, y_sys_;
};

}  // namespace

Field2D make_field2d(const Params& p, const Grid2DSpec& spec, const std::function<double(double, double)>& init) {
    const double Ly = spec.Ly > 0.0 ? spec.Ly : p.R() + 8.0 / p.sqrt_alpha();
    if (!(Ly > p.R() + 6.0 / p.sqrt_alpha())) {
        std::ostringstream os;
        os << "Ly = " << Ly << " leaves too little tail room (need > R + 6/sqrt(alpha))";
        throw Error(os.str());
    }
    if (spec.nx < 4 || spec.ny < 4 || !(spec.Lx > 0.0)) throw Error("2D grid needs at least 4 intervals per axis");
    Field2D u{p};
    u.Lx = spec.Lx;
    u.Ly = Ly;
    u.nx = spec.nx + 1;
    u.ny = spec.ny + (spec.ny % 2) + 1;
    u.dx = spec.Lx / static_cast<double>(u.nx - 1);
    u.dy = 2.0 * Ly / static_cast<double>(u.ny - 1);
    u.u.assign(u.nx * u.ny, 0.0);
    for (std::size_t j = 1; j + 1 < u.ny; ++j)
        for (std::size_t i = 0; i < u.nx; ++i) u.at(i, j) = init(u.x(i), u.y(j));
    return u;
}

Field2D standard_bump(const Params& p, const Grid2DSpec& spec) {
    const double R = p.R();
    auto u = make_field2d(p, spec, [R](double x, double y) { return x < 10.0 && std::abs(y) < R ? 1.0 : 0.0; });
    const double h = u.dx * u.dx;
    const auto xs = neumann_system(u.nx, h / (u.dx * u.dx));
    const auto ys = dirichlet_system(u.ny - 2, h / (u.dy * u.dy));
    for (std::size_t j = 1; j + 1 < u.ny; ++j) xs.solve(&u.u[j * u.nx], 1);
    for (std::size_t i = 0; i < u.nx; ++i) ys.solve(&u.u[u.nx + i], u.nx);
    return u;
}

FrontSample measure(const Field2D& u) {
    FrontSample s;
    s.t = u.t;
    const std::size_t row = u.center_row() * u.nx;
    for (std::size_t i = 0; i < u.nx; ++i) s.sup_center = std::max(s.sup_center, u.u[row + i]);
    for (std::size_t i = u.nx - 1; i-- > 0;) {
        const double a = u.u[row + i], b = u.u[row + i + 1];
        if (a >= 0.5 && b < 0.5) {
            s.x_star = u.x(i) + u.dx * (a - 0.5) / (a - b);
            break;
        }
    }
    double m = 0.0;
    for (double v : u.u) m += v;
    s.mass = m * u.dx * u.dy;
    return s;
}

Run2DResult run2d(const Field2D& u0, const Run2DOptions& opt) {
    const Integrator2D integ(u0, opt.dt, opt.scheme);
    Run2DResult res{u0};
    Field2D& u = res.final_state;
    res.track.push_back(measure(u));
    if (opt.snapshot_every) res.snapshots.push_back({u.t, u.u});
    const auto steps = static_cast<std::size_t>(std::ceil(opt.T / opt.dt - 1e-9));
    const std::size_t every = std::max<std::size_t>(1, opt.track_every);
    for (std::size_t n = 1; n <= steps; ++n) {
        integ.step(u);
        if (opt.snapshot_every && n % opt.snapshot_every == 0) res.snapshots.push_back({u.t, u.u});
        if (n % every == 0 || n == steps) {
            res.track.push_back(measure(u));
            const auto& xs = res.track.back().x_star;
            if (xs && (*xs < opt.stop_left || *xs > u.Lx - opt.stop_right)) {
                res.stopped_early = n < steps;
                break;
            }
        }
    }
    return res;
}

FrontMeasurement front_speed(const std::vector<FrontSample>& track) {
    if (track.empty()) throw NoInterface("front_speed: empty track");
    const double t0 = track.front().t, t1 = track.back().t;
    const double start = t0 + 0.4 * (t1 - t0);
    std::vector<double> ts, xs;
    for (const auto& s : track)
        if (s.t >= start && s.x_star) {
            ts.push_back(s.t);
            xs.push_back(*s.x_star);
        }
    if (ts.size() < 3) throw NoInterface("front_speed: u(., 0, t) does not cross 1/2 in the fit window");

    const double n = static_cast<double>(ts.size());
    double mt = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        mx += xs[i];
    }
    mt /= n;
    mx /= n;
    double stt = 0.0, stx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        stx += (ts[i] - mt) * (xs[i] - mx);
    }
    FrontMeasurement m;
    m.c = stx / stt;
    m.t_start = ts.front();
    m.t_end = ts.back();
    m.samples = ts.size();
    double ss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = xs[i] - (mx + m.c * (ts[i] - mt));
        ss += r * r;
    }
    const double displacement = std::abs(m.c) * (m.t_end - m.t_start);
    m.fit_residual = displacement > 0.0 ? std::sqrt(ss / n) / displacement : std::numeric_limits<double>::infinity();
    return m;
}

std::string to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::collapse: return "collapse";
        case RegimeLabel::shrinking: return "shrinking";
        case RegimeLabel::spreading: return "spreading";
        case RegimeLabel::ambiguous: return "ambiguous";
    }
    return "ambiguous";
}

std::vector<FrontSample> tracked_part(const std::vector<FrontSample>& track, double x_lo, double x_hi) {
    std::vector<FrontSample> out;
    bool seen = false;
    for (const auto& s : track) {
        const bool inside = s.x_star && *s.x_star >= x_lo && *s.x_star <= x_hi;
        if (!inside && seen) break;
        seen = seen || inside;
        out.push_back(s);
    }
    return out;
}

RegimeReport classify_regime(const Params& p, double r0, double r1, const RegimeOptions& opt) {
    // The full horizon is always run so that the collapse test at T/2 is protocol-fixed.
    Run2DOptions run_opt = opt.run;
    run_opt.stop_left = -std::numeric_limits<double>::infinity();
    run_opt.stop_right = -std::numeric_limits<double>::infinity();
    const auto run = run2d(standard_bump(p, opt.grid), run_opt);
    RegimeReport rep;
    rep.run_time = run.final_state.t;

    const double half = 0.5 * rep.run_time;
    const auto mid = std::min_element(run.track.begin(), run.track.end(), [half](const auto& a, const auto& b) {
        return std::abs(a.t - half) < std::abs(b.t - half);
    });
    rep.sup_center_half = mid->sup_center;
    if (rep.sup_center_half < p.a()) {
        rep.measured = RegimeLabel::collapse;
    } else {
        const auto part = tracked_part(run.track, opt.run.stop_left, run.final_state.Lx - opt.run.stop_right);
        rep.stopped_early = part.size() < run.track.size();
        try {
            rep.front = front_speed(part);
            rep.measured = rep.front->c < 0.0 ? RegimeLabel::shrinking : RegimeLabel::spreading;
        } catch (const NoInterface&) {
            rep.measured = RegimeLabel::ambiguous;
        }
    }
    const double R = p.R();
    const bool near = std::abs(R - r0) <= opt.ambiguity_band * r0 || std::abs(R - r1) <= opt.ambiguity_band * r1;
    rep.label = near ? RegimeLabel::ambiguous : rep.measured;
    return rep;
}

}  // namespace stripe

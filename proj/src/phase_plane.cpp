#include "stripe/phase_plane.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <list>

#include "stripe/parallel.hpp"

namespace stripe {

namespace {

using State = std::array<double, 2>;

bool inside(const State& x, double bound) {
    return std::isfinite(x[0]) && std::isfinite(x[1]) && std::abs(x[0]) <= bound &&
           std::abs(x[1]) <= bound;
}

FlowResult run(const PhasePoint& start, double length, const Params& p, const FlowOptions& opt,
               bool keep, double orientation) {
    FlowResult out;
    State x{start.v, start.w};
    if (keep) out.trajectory.push_back({0.0, x[0], x[1]});
    if (length <= 0.0) {
        out.end = start;
        return out;
    }
    auto rhs = [&p, orientation](double, const State& s, State& ds) {
        ds[0] = orientation * s[1];
        ds[1] = -orientation * f(s[0], p);
    };
    double dt = std::min(1e-2, length);
    double reached = 0.0;
    const bool ok = ode::integrate(rhs, x, 0.0, length, dt, opt.tol, [&](double t, const State& s) {
        reached = t;
        if (keep) out.trajectory.push_back({t, s[0], s[1]});
        return inside(s, opt.blowup_bound);
    });
    out.end = {x[0], x[1]};
    out.escaped = !ok || !inside(x, opt.blowup_bound);
    out.length_reached = reached;
    return out;
}

}  // namespace

double hamiltonian(const PhasePoint& pt, const Params& p) {
    return 0.5 * pt.w * pt.w + F(pt.v, p);
}

FlowResult flow(const PhasePoint& start, double length, const Params& p, const FlowOptions& opt,
                bool keep_trajectory) {
    return run(start, length, p, opt, keep_trajectory, 1.0);
}

PhasePoint flow_to(const PhasePoint& start, double length, const Params& p,
                   const FlowOptions& opt) {
    auto r = run(start, length, p, opt, false, 1.0);
    if (r.escaped) {
        throw BlowUp("trajectory left |v|,|w| <= " + std::to_string(opt.blowup_bound) +
                     " at y = " + std::to_string(r.length_reached));
    }
    return r.end;
}

FlowResult flow_backward(const PhasePoint& start, double length, const Params& p,
                         const FlowOptions& opt) {
    return run(start, length, p, opt, false, -1.0);
}

CurveSample shoot(double s, const Params& p, const FlowOptions& opt) {
    const double k = p.sqrt_alpha();
    const auto r = run({s, k * s}, 2.0 * p.R(), p, opt, false, 1.0);
    CurveSample out;
    out.s = s;
    out.endpoint = r.end;
    const double res = r.end.w + k * r.end.v;
    if (r.escaped) {
        out.blowup = true;
        out.residual = std::copysign(1e6, std::isfinite(res) ? res : r.end.v);
    } else {
        out.residual = res;
    }
    return out;
}

std::vector<CurveSample> sample_image_of_line(const Params& p, double s_max, std::size_t n,
                                              const SamplingOptions& opt) {
    if (!(s_max > 0.0)) throw Error("sample_image_of_line: s_max must be > 0");
    if (n < 2) throw Error("sample_image_of_line: need n >= 2");

    std::vector<double> grid{0.0};
    const double g_hi = std::min(opt.graded_until, s_max);
    if (opt.graded_points > 0 && opt.graded_from < g_hi) {
        const double ratio = std::log(g_hi / opt.graded_from);
        for (std::size_t i = 0; i < opt.graded_points; ++i) {
            grid.push_back(opt.graded_from *
                           std::exp(ratio * static_cast<double>(i) / static_cast<double>(opt.graded_points)));
        }
    }
    const double u_lo = grid.size() > 1 ? g_hi : s_max / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid.push_back(u_lo + (s_max - u_lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<CurveSample> base(grid.size());
    parallel_for(grid.size(), opt.jobs, [&](std::size_t i) { base[i] = shoot(grid[i], p, opt.flow); });

    auto far_apart = [&](const CurveSample& l, const CurveSample& r) {
        if (l.blowup && r.blowup && (l.residual > 0) == (r.residual > 0)) return false;
        return std::hypot(l.endpoint.v - r.endpoint.v, l.endpoint.w - r.endpoint.w) > opt.fold_distance;
    };

    // Dyadic refinement, depth-first on a linked list keeps the output sorted.
    struct Node {
        CurveSample sample;
        int depth;
    };
    std::list<Node> pts;
    for (auto& b : base) pts.push_back({b, 0});
    for (auto it = pts.begin(); std::next(it) != pts.end();) {
        auto nx = std::next(it);
        const int depth = std::max(it->depth, nx->depth);
        if (depth < opt.max_depth && far_apart(it->sample, nx->sample)) {
            const double mid = 0.5 * (it->sample.s + nx->sample.s);
            if (mid > it->sample.s && mid < nx->sample.s) {
                pts.insert(nx, Node{shoot(mid, p, opt.flow), depth + 1});
                continue;  // re-examine the left half
            }
        }
        ++it;
    }

    std::vector<CurveSample> out;
    out.reserve(pts.size());
    for (auto& nd : pts) out.push_back(nd.sample);
    return out;
}

HomoclinicTest homoclinic_crossing(const Params& p) {
    HomoclinicTest t;
    t.regime = regime_of(p);
    t.unstable_slope = std::sqrt(p.a() * p.lambda());
    t.line_slope = p.sqrt_alpha();
    t.line_meets_homoclinic = t.regime.supercritical_line;
    return t;
}

}  // namespace stripe

#include "stripe/profile_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

namespace stripe {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Cubic Hermite interpolation on [y0, y0 + h] from values and slopes at both ends.
double hermite_value(double t, double h, double v0, double w0, double v1, double w1) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h * w0 + (-2 * t3 + 3 * t2) * v1 +
           (t3 - t2) * h * w1;
}

double hermite_slope(double t, double h, double v0, double w0, double v1, double w1) {
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * v0 + (-6 * t2 + 6 * t) * v1) / h + (3 * t2 - 4 * t + 1) * w0 +
           (3 * t2 - 2 * t) * w1;
}

struct Bracket {
    double lo, hi;
    double rlo, rhi;
};

// Bisection down to `width`, then one secant step; keeps the best finite candidate.
std::pair<double, double> polish_root(const Params& p, Bracket b, double width, const FlowOptions& fo) {
    while (b.hi - b.lo > width) {
        const double mid = 0.5 * (b.lo + b.hi);
        if (!(mid > b.lo && mid < b.hi)) break;
        const auto r = residual(mid, p, fo);
        if (r.value == 0.0 && !r.blowup) return {mid, 0.0};
        if (sign_of(r.value) == sign_of(b.rlo)) {
            b.lo = mid;
            b.rlo = r.value;
        } else {
            b.hi = mid;
            b.rhi = r.value;
        }
    }
    double best_s = std::abs(b.rlo) <= std::abs(b.rhi) ? b.lo : b.hi;
    double best_r = std::abs(b.rlo) <= std::abs(b.rhi) ? b.rlo : b.rhi;
    if (std::abs(b.rlo) < 1e5 && std::abs(b.rhi) < 1e5 && b.rhi != b.rlo) {
        const double sec = b.lo - b.rlo * (b.hi - b.lo) / (b.rhi - b.rlo);
        if (sec >= b.lo && sec <= b.hi) {
            const auto r = residual(sec, p, fo);
            if (!r.blowup && std::abs(r.value) < std::abs(best_r)) {
                best_s = sec;
                best_r = r.value;
            }
        }
    }
    return {best_s, best_r};
}

double transversality_at(double s, const Params& p, const FlowOptions& fo) {
    const double d = std::max(std::min(1e-7, 1e-3 * s), 1e-14);
    const auto rp = residual(s + d, p, fo);
    const auto rm = residual(std::max(0.0, s - d), p, fo);
    if (rp.blowup || rm.blowup) return std::numeric_limits<double>::infinity();
    return std::abs(rp.value - rm.value) / (s + d - std::max(0.0, s - d));
}

}  // namespace

double Profile::value_at(double yy) const {
    const double R = params.R();
    const double k = params.sqrt_alpha();
    if (y.empty()) return 0.0;
    if (yy < -R) return v.front() * std::exp(-k * (-R - yy));
    if (yy > R) return v.back() * std::exp(-k * (yy - R));
    const double h = spacing();
    const std::size_t n = y.size() - 1;
    std::size_t i = std::min<std::size_t>(n - 1, static_cast<std::size_t>((yy + R) / h));
    const double t = (yy - y[i]) / h;
    return hermite_value(t, h, v[i], w[i], v[i + 1], w[i + 1]);
}

double Profile::slope_at(double yy) const {
    const double R = params.R();
    const double k = params.sqrt_alpha();
    if (y.empty()) return 0.0;
    if (yy < -R) return k * v.front() * std::exp(-k * (-R - yy));
    if (yy > R) return -k * v.back() * std::exp(-k * (yy - R));
    const double h = spacing();
    const std::size_t n = y.size() - 1;
    std::size_t i = std::min<std::size_t>(n - 1, static_cast<std::size_t>((yy + R) / h));
    const double t = (yy - y[i]) / h;
    return hermite_slope(t, h, v[i], w[i], v[i + 1], w[i + 1]);
}

double Profile::min_value() const { return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end()); }
double Profile::max_value() const { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

Residual residual(double s, const Params& p, const FlowOptions& opt) {
    const auto c = shoot(s, p, opt);
    return {c.residual, c.blowup};
}

Profile make_profile(double s, const Params& p, std::size_t intervals, const FlowOptions& opt) {
    if (intervals < 2 || intervals % 2 != 0) throw Error("make_profile: intervals must be even and >= 2");
    const double R = p.R();
    const double k = p.sqrt_alpha();
    const double h = 2.0 * R / static_cast<double>(intervals);

    Profile out{p};
    out.s = s;
    out.y.resize(intervals + 1);
    out.v.resize(intervals + 1);
    out.w.resize(intervals + 1);

    std::array<double, 2> x{s, k * s};
    auto rhs = [&p](double, const std::array<double, 2>& st, std::array<double, 2>& ds) {
        ds[0] = st[1];
        ds[1] = -f(st[0], p);
    };
    double dt = std::min(1e-2, h);
    out.y[0] = -R;
    out.v[0] = x[0];
    out.w[0] = x[1];
    for (std::size_t i = 1; i <= intervals; ++i) {
        const double y0 = -R + h * static_cast<double>(i - 1);
        const double y1 = i == intervals ? R : -R + h * static_cast<double>(i);
        const bool ok = ode::integrate(rhs, x, y0, y1, dt, opt.tol, [&](double, const std::array<double, 2>& st) {
            return std::isfinite(st[0]) && std::abs(st[0]) <= opt.blowup_bound &&
                   std::abs(st[1]) <= opt.blowup_bound;
        });
        if (!ok) {
            std::ostringstream os;
            os << "make_profile: trajectory from s = " << s << " escaped near y = " << y1;
            throw BlowUp(os.str());
        }
        out.y[i] = y1;
        out.v[i] = x[0];
        out.w[i] = x[1];
    }

    out.center_value = out.v[intervals / 2];
    out.tail_coeff = out.v.back() * std::exp(k * R);
    double defect = 0.0;
    for (std::size_t i = 0; i <= intervals; ++i) {
        defect = std::max(defect, std::abs(out.v[i] - out.v[intervals - i]));
    }
    out.parity_defect = defect;
    out.even = defect <= 1e-7;
    out.kind = s == 0.0 ? ProfileKind::trivial : ProfileKind::nontrivial;
    out.residual = out.w.back() + k * out.v.back();
    return out;
}

std::vector<ResidualExtremum> residual_extrema(const Params& p, const std::vector<CurveSample>& samples,
                                              double screen, const FlowOptions& fo) {
    std::vector<ResidualExtremum> out;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const auto& l = samples[i - 1];
        const auto& c = samples[i];
        const auto& r = samples[i + 1];
        if (l.s <= 0.0 || l.blowup || c.blowup || r.blowup) continue;
        const int sg = sign_of(c.residual);
        if (sg == 0 || sign_of(l.residual) != sg || sign_of(r.residual) != sg) continue;
        if (std::abs(c.residual) > screen) continue;
        if (std::abs(c.residual) > std::abs(l.residual) || std::abs(c.residual) > std::abs(r.residual)) continue;

        auto oriented = [&](double s) {
            const auto res = residual(s, p, fo);
            return res.blowup ? 1e6 : sg * res.value;
        };
        const auto [s_min, val] = boost::math::tools::brent_find_minima(oriented, l.s, r.s, 50);
        out.push_back({s_min, sg * val, l.s, r.s});
    }
    return out;
}

ProfileSet find_profiles(const Params& p, const ProfileOptions& opt) {
    const auto& fo = opt.sampling.flow;
    const auto samples = sample_image_of_line(p, opt.s_max, opt.n_samples, opt.sampling);

    ProfileSet set;
    std::vector<Bracket> brackets;
    std::vector<double> exact_roots;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const auto& l = samples[i];
        const auto& r = samples[i + 1];
        if (l.residual == 0.0 && !l.blowup) {
            exact_roots.push_back(l.s);
            continue;
        }
        if (r.residual != 0.0 && sign_of(l.residual) != sign_of(r.residual)) {
            brackets.push_back({l.s, r.s, l.residual, r.residual});
        }
    }

    for (const auto& e : residual_extrema(p, samples, opt.extremum_screen, fo)) {
        const auto rl = residual(e.lo, p, fo);
        if (sign_of(e.value) != sign_of(rl.value) && e.value != 0.0) {
            // A pair of roots hidden between two samples.
            const auto rh = residual(e.hi, p, fo);
            brackets.push_back({e.lo, e.s, rl.value, e.value});
            brackets.push_back({e.s, e.hi, e.value, rh.value});
        } else if (std::abs(e.value) <= opt.tangency_residual) {
            std::ostringstream os;
            os << "residual extremum " << e.value << " at s = " << e.s << " touches zero without a sign change";
            set.warnings.push_back({ProfileWarning::Kind::tangency, e.s, os.str()});
        }
    }

    std::vector<std::pair<double, double>> roots;
    for (double s : exact_roots) roots.push_back({s, 0.0});
    for (const auto& b : brackets) roots.push_back(polish_root(p, b, opt.root_width, fo));
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](const auto& x, const auto& y) { return x.first == y.first; }),
                roots.end());

    for (std::size_t i = 1; i < roots.size(); ++i) {
        if (roots[i].first - roots[i - 1].first < opt.tangency_s) {
            std::ostringstream os;
            os << "roots at s = " << roots[i - 1].first << " and " << roots[i].first << " nearly merge";
            set.warnings.push_back({ProfileWarning::Kind::tangency, roots[i].first, os.str()});
        }
    }

    set.profiles.push_back(make_profile(0.0, p, opt.grid_intervals, fo));
    for (const auto& [s, r] : roots) {
        Profile prof = make_profile(s, p, opt.grid_intervals, fo);
        prof.residual = r;
        prof.transversality = transversality_at(s, p, fo);
        if (prof.min_value() < 0.0) {
            std::ostringstream os;
            os << "profile at s = " << s << " takes negative values (min " << prof.min_value() << ")";
            set.warnings.push_back({ProfileWarning::Kind::negative_values, s, os.str()});
        }
        set.profiles.push_back(std::move(prof));
    }
    set.largest = set.profiles.size() - 1;
    return set;
}

Profile largest_profile(const Params& p, const ProfileOptions& opt) {
    auto set = find_profiles(p, opt);
    if (set.nontrivial_count() == 0) {
        std::ostringstream os;
        os << "no non-trivial profile at R = " << p.R();
        throw NoNontrivialProfile(os.str());
    }
    Profile vm = set.vm();
    if (vm.parity_defect > 1e-7) {
        std::ostringstream os;
        os << "largest profile not even: defect " << vm.parity_defect;
        throw Error(os.str());
    }
    if (!(vm.center_value < 1.0)) throw Error("largest profile reaches 1");
    return vm;
}

std::vector<std::pair<double, double>> extend_to_line(const Profile& profile, double y_max, std::size_t n) {
    if (!(y_max > profile.params.R())) throw Error("extend_to_line: y_max must exceed R");
    if (n < 2) throw Error("extend_to_line: need n >= 2");
    std::vector<std::pair<double, double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double yy = -y_max + 2.0 * y_max * static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = {yy, profile.value_at(yy)};
    }
    return out;
}

}  // namespace stripe

#include "stripe/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stripe/parallel.hpp"

namespace stripe {

namespace {

double density(const Profile& V, std::size_t i) {
    return 0.5 * V.w[i] * V.w[i] - F(V.v[i], V.params);
}

// Composite Simpson over nodes 0, stride, 2 stride, ...; intervals/stride must be even.
double simpson(const Profile& V, std::size_t stride) {
    const std::size_t n = V.size() - 1;
    const double h = V.spacing() * static_cast<double>(stride);
    double sum = density(V, 0) + density(V, n);
    for (std::size_t j = 1, i = stride; i < n; ++j, i += stride) sum += (j % 2 ? 4.0 : 2.0) * density(V, i);
    return sum * h / 3.0;
}

bool has_nontrivial(const Params& p, double R, const ProfileOptions& opt) {
    return find_profiles(p.with_R(R), opt).nontrivial_count() > 0;
}

}  // namespace

double energy_interval(const Profile& V) {
    const double k = V.params.sqrt_alpha();
    const double a = V.v.front(), b = V.v.back();
    return simpson(V, 1) + 0.5 * k * (a * a + b * b);
}

double energy_interval_error(const Profile& V) {
    const std::size_t n = V.size() - 1;
    if (n % 4 != 0) return std::numeric_limits<double>::quiet_NaN();
    return std::abs(simpson(V, 1) - simpson(V, 2)) / 15.0;
}

double energy_line(const Profile& V) {
    const Params& p = V.params;
    const double k = p.sqrt_alpha();
    // Outside the stripe V = c exp(-k(|y| - R)), so |V'|^2/2 - G = alpha V^2 and each
    // tail integrates to alpha c^2 / (2k).
    const double c_left = V.v.front();
    const double c_right = V.tail_coeff * std::exp(-k * p.R());
    const double tails = p.alpha() * (c_left * c_left + c_right * c_right) / (2.0 * k);
    return simpson(V, 1) + tails;
}

EnergyReport energy_report(const Profile& V) {
    return {energy_line(V), energy_interval(V), energy_interval_error(V)};
}

double largest_profile_energy(const Params& p, double R, const ProfileOptions& opt) {
    const auto set = find_profiles(p.with_R(R), opt);
    if (set.nontrivial_count() == 0) {
        std::ostringstream os;
        os << "no non-trivial profile at R = " << R;
        throw NoNontrivialProfile(os.str());
    }
    return energy_interval(set.vm());
}

EnergyDerivative dE_dR_identity(const Params& p, double dR, double min_transversality,
                                const ProfileOptions& opt) {
    const auto set = find_profiles(p, opt);
    if (set.nontrivial_count() == 0) throw NoNontrivialProfile("dE_dR_identity: no largest profile");
    const auto& vm = set.vm();
    EnergyDerivative d;
    d.transversality = vm.transversality;
    if (!(vm.transversality >= min_transversality)) {
        std::ostringstream os;
        os << "dE_dR_identity: transversality " << vm.transversality << " at R = " << p.R()
           << " is below " << min_transversality;
        throw FoldTooClose(os.str());
    }
    d.analytic = -2.0 * F(vm.center_value, p);
    const double e_plus = largest_profile_energy(p, p.R() + dR, opt);
    const double e_minus = largest_profile_energy(p, p.R() - dR, opt);
    d.finite_difference = (e_plus - e_minus) / (2.0 * dR);
    return d;
}

R0Result find_R0(const Params& p, double R_lo, double R_hi, double width, const ProfileOptions& opt) {
    if (!(R_lo > 0.0 && R_hi > R_lo)) throw BracketFailure("find_R0: need 0 < R_lo < R_hi");
    for (int i = 0; has_nontrivial(p, R_lo, opt); ++i) {
        if (i >= 20) throw BracketFailure("find_R0: profiles exist down to tiny R");
        R_hi = R_lo;
        R_lo *= 0.5;
    }
    for (int i = 0; !has_nontrivial(p, R_hi, opt); ++i) {
        if (i >= 8) {
            std::ostringstream os;
            os << "find_R0: no non-trivial profile up to R = " << R_hi;
            throw BracketFailure(os.str());
        }
        R_lo = R_hi;
        R_hi *= 2.0;
    }
    while (R_hi - R_lo > width) {
        const double mid = 0.5 * (R_lo + R_hi);
        if (has_nontrivial(p, mid, opt)) R_hi = mid; else R_lo = mid;
    }

    R0Result out;
    out.lo = R_lo;
    out.hi = R_hi;
    out.r0 = 0.5 * (R_lo + R_hi);
    // The fold sits where the residual extremum nearest to zero touches it.
    const Params at = p.with_R(out.r0);
    const auto samples = sample_image_of_line(at, opt.s_max, opt.n_samples, opt.sampling);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : residual_extrema(at, samples, std::numeric_limits<double>::infinity(), opt.sampling.flow)) {
        if (std::abs(e.value) < best) {
            best = std::abs(e.value);
            out.fold_s = e.s;
        }
    }
    if (!std::isfinite(best)) {
        // Bracket so narrow that the pair of roots is still resolved at r0: take its midpoint.
        const auto set = find_profiles(at, opt);
        if (set.nontrivial_count() >= 2) out.fold_s = 0.5 * (set.profiles[1].s + set.profiles[2].s);
    }
    return out;
}

R0Result find_R0(const Params& p, double width, const ProfileOptions& opt) {
    // Walk upward from well below the natural length scale. Profiles at very large R sit
    // so close to the saddle that shooting loses them, so the bracket is never probed there.
    const double scale = 1.0 / std::sqrt(p.a() * p.lambda());
    double lo = 0.05 * scale;
    double hi = lo * 1.25;
    for (int i = 0; !has_nontrivial(p, hi, opt); ++i) {
        if (i >= 30) throw BracketFailure("find_R0: no non-trivial profile found on the upward walk");
        lo = hi;
        hi *= 1.25;
    }
    return find_R0(p, lo, hi, width, opt);
}

namespace {

// Walks upward from `start` until `g` changes sign from the value at `start`, then
// bisects. `g` must not throw on the walk.
template <class Fn>
RootResult walk_and_bisect(Fn&& g, double start, double step, double width, const char* what) {
    const double g0 = g(start);
    double lo = start, hi = start + step;
    int tries = 0;
    while ((g(hi) > 0.0) == (g0 > 0.0)) {
        if (++tries > 40) {
            std::ostringstream os;
            os << what << ": no sign change up to R = " << hi;
            throw BracketFailure(os.str());
        }
        lo = hi;
        step *= 1.5;
        hi += step;
    }
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if ((g(mid) > 0.0) == (g0 > 0.0)) lo = mid; else hi = mid;
    }
    return {0.5 * (lo + hi), lo, hi};
}

double walk_step(const Params& p, double r0) {
    return 0.1 * std::max(r0, 1.0 / std::sqrt(p.a() * p.lambda()));
}

}  // namespace

RootResult find_R1(const Params& p, double r0, double delta, double width, const ProfileOptions& opt) {
    const double start = r0 + delta;
    const double e_start = largest_profile_energy(p, start, opt);
    if (!(e_start > 0.0)) {
        std::ostringstream os;
        os << "find_R1: E(V_M) = " << e_start << " is not positive at R = " << start;
        throw SignPatternViolation(os.str());
    }
    auto g = [&](double R) { return largest_profile_energy(p, R, opt); };
    return walk_and_bisect(g, start, walk_step(p, r0), width, "find_R1");
}

R2Result find_R2(const Params& p, double r0, double delta, double width, const ProfileOptions& opt) {
    const double b = beta(p);
    auto g = [&](double R) {
        const auto set = find_profiles(p.with_R(R), opt);
        if (set.nontrivial_count() == 0) throw NoNontrivialProfile("find_R2: profile lost above r0");
        return set.vm().center_value - b;
    };
    R2Result out;
    const double start = r0 + delta;
    if (g(start) >= 0.0) {
        out.empty_window = true;
        out.root = {r0, r0, r0};
        return out;
    }
    out.root = walk_and_bisect(g, start, walk_step(p, r0), width, "find_R2");
    return out;
}

Thresholds compute_thresholds(const Params& p, double width, const ProfileOptions& opt) {
    Thresholds t;
    const auto r0 = find_R0(p, width, opt);
    t.r0 = r0.r0;
    t.r0_width = r0.hi - r0.lo;
    t.fold_s = r0.fold_s;
    const auto r1 = find_R1(p, r0.hi, 1e-3, width, opt);
    t.r1 = r1.value;
    t.r1_width = r1.hi - r1.lo;
    const auto r2 = find_R2(p, r0.hi, 1e-3, width, opt);
    t.r2_empty_window = r2.empty_window;
    t.r2 = r2.empty_window ? t.r0 : r2.root.value;
    t.r2_width = r2.empty_window ? t.r0_width : r2.root.hi - r2.root.lo;
    return t;
}

BifurcationRow bifurcation_row(const Params& p, double R, const ProfileOptions& opt) {
    const Params at = p.with_R(R);
    const auto set = find_profiles(at, opt);
    BifurcationRow row;
    row.R = R;
    row.profile_count = set.profiles.size();
    for (const auto& w : set.warnings) row.warnings.push_back(w.message);
    for (const auto& prof : set.profiles) {
        const auto rep = count_nonneg(prof);
        row.profiles.push_back({prof.s, prof.center_value, energy_interval(prof), rep.k, rep.marginal});
    }
    const auto& vm = row.profiles[set.largest];
    row.vm_center = vm.center_value;
    row.e_vm = vm.energy;

    auto violate = [&row](const std::string& m) { row.violations.push_back(m); };
    if (row.profiles.front().s != 0.0) violate("trivial profile missing");
    if (row.profile_count % 2 == 0 && row.warnings.empty()) violate("even profile count without tangency warning");
    for (std::size_t i = 0; i < row.profiles.size(); ++i) {
        const auto& pr = row.profiles[i];
        const bool extremal = i == 0 || i == set.largest;
        if (extremal && pr.k != 0 && !pr.marginal) violate("extremal profile with positive count");
        if (!extremal && pr.k < 1 && !pr.marginal) violate("middle profile counted stable");
        if (!extremal && !(pr.energy > std::max(0.0, row.e_vm))) violate("unstable profile energy below max(0, E(V_M))");
    }
    return row;
}

std::vector<BifurcationRow> bifurcation_sweep(const Params& p, const std::vector<double>& R_grid, unsigned jobs,
                                              const ProfileOptions& opt) {
    if (!std::is_sorted(R_grid.begin(), R_grid.end())) throw Error("bifurcation_sweep: R grid must be ascending");
    std::vector<BifurcationRow> rows(R_grid.size());
    parallel_for(R_grid.size(), jobs, [&](std::size_t i) { rows[i] = bifurcation_row(p, R_grid[i], opt); });
    return rows;
}

}  // namespace stripe

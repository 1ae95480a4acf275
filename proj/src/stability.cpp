#include "stripe/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace stripe {

namespace {

constexpr double pi = std::numbers::pi;

// Integrates (theta, log rho) across the profile grid, node to node, with the potential
// taken from the profile's cubic interpolant. Calls visit(i, theta, log_rho) at nodes.
template <class Visit>
void sweep(const Profile& V, double mu, const StabilityOptions& opt, bool with_rho, Visit&& visit) {
    const Params& p = V.params;
    std::array<double, 2> x{std::atan(std::sqrt(mu + p.alpha())), 0.0};
    visit(std::size_t{0}, x[0], x[1]);
    auto rhs = [&](double y, const std::array<double, 2>& st, std::array<double, 2>& ds) {
        const double q = mu - f_prime(V.value_at(y), p);
        ds[0] = theta_rhs(st[0], q);
        ds[1] = with_rho ? std::sin(st[0]) * std::cos(st[0]) * (1.0 + q) : 0.0;
    };
    double dt = V.spacing();
    for (std::size_t i = 1; i < V.size(); ++i) {
        ode::integrate(rhs, x, V.y[i - 1], V.y[i], dt, opt.tol);
        visit(i, x[0], x[1]);
    }
}

}  // namespace

double EigenFunction::value_at(double yy) const {
    if (y.empty()) return 0.0;
    if (yy < -R) return phi.front() * std::exp(-tail_rate * (-R - yy));
    if (yy > R) return phi.back() * std::exp(-tail_rate * (yy - R));
    const double hgrid = y[1] - y[0];
    const std::size_t i = std::min<std::size_t>(y.size() - 2, static_cast<std::size_t>((yy + R) / hgrid));
    const double t = (yy - y[i]) / hgrid;
    return (1.0 - t) * phi[i] + t * phi[i + 1];
}

ThetaTrace theta_solve(const Profile& V, double mu, const StabilityOptions& opt) {
    if (!(mu > -V.params.alpha())) throw Error("theta_solve: mu must exceed -alpha");
    ThetaTrace tr;
    tr.mu = mu;
    tr.y = V.y;
    tr.theta.resize(V.size());
    sweep(V, mu, opt, false, [&](std::size_t i, double th, double) { tr.theta[i] = th; });
    tr.theta_end = tr.theta.back();
    return tr;
}

double h(const Profile& V, double mu, const StabilityOptions& opt) {
    if (!(mu > -V.params.alpha())) throw Error("h: mu must exceed -alpha");
    double end = 0.0;
    sweep(V, mu, opt, false, [&](std::size_t, double th, double) { end = th; });
    return end + std::atan(std::sqrt(mu + V.params.alpha()));
}

double sup_abs_f_prime(const Profile& V) {
    double m = 0.0;
    for (double v : V.v) m = std::max(m, std::abs(f_prime(v, V.params)));
    return m;
}

SpectralReport count_nonneg(const Profile& V, const StabilityOptions& opt) {
    SpectralReport rep;
    rep.h0 = h(V, 0.0, opt);
    rep.k = std::max(0, 1 - static_cast<int>(std::ceil(rep.h0 / pi)));
    const double dist = std::abs(rep.h0 - pi * std::round(rep.h0 / pi));
    rep.marginal = dist < opt.marginal_tol;
    return rep;
}

std::vector<double> eigenvalues_nonneg(const Profile& V, const SpectralReport& report,
                                       const StabilityOptions& opt) {
    std::vector<double> mus;
    if (report.k < 1) return mus;
    const double mu_hi = sup_abs_f_prime(V) + 1.0;
    for (int j = 1; j <= report.k; ++j) {
        const double target = (1 - j) * pi;
        double lo = 0.0, hi = mu_hi;
        if (report.h0 - target >= 0.0) {
            // h(0) sits on the level itself (within roundoff): zero eigenvalue.
            mus.push_back(0.0);
            continue;
        }
        while (hi - lo > opt.eigen_tol * std::max(1.0, hi)) {
            const double mid = 0.5 * (lo + hi);
            if (h(V, mid, opt) - target < 0.0) lo = mid; else hi = mid;
        }
        mus.push_back(0.5 * (lo + hi));
    }
    return mus;
}

SpectralReport analyze(const Profile& V, const StabilityOptions& opt) {
    auto rep = count_nonneg(V, opt);
    rep.eigenvalues = eigenvalues_nonneg(V, rep, opt);
    return rep;
}

EigenFunction principal_eigenfunction(const Profile& V, double mu1, const StabilityOptions& opt) {
    EigenFunction ef;
    ef.mu = mu1;
    ef.R = V.params.R();
    ef.tail_rate = std::sqrt(mu1 + V.params.alpha());
    ef.y = V.y;
    ef.phi.resize(V.size());
    ef.dphi.resize(V.size());
    ef.rho.resize(V.size());
    std::vector<double> theta(V.size()), log_rho(V.size());
    sweep(V, mu1, opt, true, [&](std::size_t i, double th, double lr) {
        theta[i] = th;
        log_rho[i] = lr;
    });
    const double shift = *std::max_element(log_rho.begin(), log_rho.end());
    double sup = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) {
        ef.rho[i] = std::exp(log_rho[i] - shift);
        ef.phi[i] = ef.rho[i] * std::cos(theta[i]);
        ef.dphi[i] = ef.rho[i] * std::sin(theta[i]);
        sup = std::max(sup, ef.phi[i]);
    }
    if (!(sup > 0.0)) throw PositivityViolation("principal eigenfunction is nowhere positive");
    for (std::size_t i = 0; i < V.size(); ++i) {
        ef.phi[i] /= sup;
        ef.dphi[i] /= sup;
        ef.rho[i] /= sup;
        if (!(ef.phi[i] > 0.0)) {
            std::ostringstream os;
            os << "eigenfunction for mu = " << mu1 << " vanishes or changes sign at y = " << ef.y[i];
            throw PositivityViolation(os.str());
        }
    }
    return ef;
}

int tangent_crossing_count(const Profile& V, const StabilityOptions& opt) {
    const auto tr = theta_solve(V, 0.0, opt);
    const double offset = std::atan(V.params.sqrt_alpha());
    // index(theta) = number of levels -offset + j pi lying strictly below theta, shifted
    // so that a level exactly at theta counts as already passed when descending.
    auto index = [&](double th) { return static_cast<long>(std::ceil((th + offset) / pi)); };
    long count = 0;
    for (std::size_t i = 1; i < tr.theta.size(); ++i) count += index(tr.theta[i - 1]) - index(tr.theta[i]);
    return static_cast<int>(count);
}

}  // namespace stripe

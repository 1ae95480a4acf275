#include "stripe/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "stripe/ode.hpp"

namespace stripe::oracles {

namespace {

// Number of eigenvalues of the symmetric tridiagonal (diag, off) strictly below sigma.
std::size_t count_below(const std::vector<double>& diag, double off2, double sigma) {
    std::size_t neg = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        d = (diag[i] - sigma) - (i == 0 ? 0.0 : off2 / d);
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++neg;
    }
    return neg;
}

struct Tridiagonal {
    std::vector<double> diag;
    double off = 0.0;
    double h = 0.0;
};

Tridiagonal assemble(const Profile& V, const DenseOperatorSpec& spec) {
    const Params& p = V.params;
    const double R = p.R();
    // Put nodes on +-R so the jump of the potential sits on a node.
    const double h_target = 2.0 * spec.L / static_cast<double>(spec.N + 1);
    const auto inner = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(R / h_target)));
    const double h = R / static_cast<double>(inner);
    const auto outer = static_cast<std::size_t>(std::ceil((spec.L - R) / h));
    const std::size_t half = inner + outer;  // node index of y = L' (Dirichlet)

    Tridiagonal t;
    t.h = h;
    t.off = 1.0 / (h * h);
    t.diag.reserve(2 * half - 1);
    for (std::size_t j = 1; j < 2 * half; ++j) {
        const long offset = static_cast<long>(j) - static_cast<long>(half);
        const double y = h * static_cast<double>(offset);
        const auto dist = static_cast<std::size_t>(std::labs(offset));
        double q;
        if (dist < inner) {
            q = f_prime(V.value_at(y), p);
        } else if (dist == inner) {
            q = 0.5 * (f_prime(V.value_at(y), p) - p.alpha());
        } else {
            q = -p.alpha();
        }
        t.diag.push_back(-2.0 / (h * h) + q);
    }
    return t;
}

double bisect_eigenvalue(const Tridiagonal& t, std::size_t below_target, double lo, double hi) {
    // Smallest x with count_below(x) > below_target lies in (lo, hi].
    const double off2 = t.off * t.off;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(t.diag, off2, mid) > below_target) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

DenseOperatorSpec DenseOperatorSpec::defaults_for(const Params& p) {
    return {p.R() + 12.0 / p.sqrt_alpha(), 4000};
}

void DenseOperatorSpec::validate(const Params& p) const {
    if (L < p.R() + 12.0 / p.sqrt_alpha() - 1e-12 || N < 4000) {
        std::ostringstream os;
        os << "dense operator spec needs L >= R + 12/sqrt(alpha) and N >= 4000 (got L = " << L
           << ", N = " << N << ")";
        throw Error(os.str());
    }
}

DenseSpectrum dense_spectrum(const Profile& V, const DenseOperatorSpec& spec, double tol_edge) {
    spec.validate(V.params);
    const auto t = assemble(V, spec);
    const double off2 = t.off * t.off;
    const std::size_t n = t.diag.size();
    const std::size_t below = count_below(t.diag, off2, -tol_edge);

    DenseSpectrum out;
    out.nodes = n;
    out.spacing = t.h;
    out.count = static_cast<int>(n - below);
    // Gershgorin: the second-difference part is negative semidefinite.
    double upper = -1e300;
    for (double d : t.diag) upper = std::max(upper, d + 2.0 * t.off);
    upper += 1.0;
    for (int j = 0; j < out.count; ++j) {
        // (n-1-j)-th eigenvalue in ascending order.
        out.top.push_back(bisect_eigenvalue(t, n - 1 - static_cast<std::size_t>(j), -tol_edge, upper));
    }
    return out;
}

double richardson_top_eigenvalue(const Profile& V, const DenseOperatorSpec& spec) {
    spec.validate(V.params);
    auto top = [&V](const DenseOperatorSpec& sp) {
        const auto t = assemble(V, sp);
        double lower = 1e300, upper = -1e300;
        for (double d : t.diag) {
            lower = std::min(lower, d - 2.0 * t.off);
            upper = std::max(upper, d + 2.0 * t.off);
        }
        return std::pair{bisect_eigenvalue(t, t.diag.size() - 1, lower - 1.0, upper + 1.0), t.h};
    };
    DenseOperatorSpec fine = spec;
    fine.N = 2 * spec.N + 1;
    const auto [mu_c, h_c] = top(spec);
    const auto [mu_f, h_f] = top(fine);
    const double r = h_c / h_f;
    return (r * r * mu_f - mu_c) / (r * r - 1.0);
}

std::vector<ScanBracket> brute_profile_scan(const Params& p, std::size_t n) {
    if (n < 10000) throw Error("brute_profile_scan: need n >= 10^4");
    std::vector<ScanBracket> out;
    double prev_s = 0.0;
    double prev_r = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double s = 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        const double r = residual(s, p).value;
        if (i > 1 && ((prev_r < 0.0 && r >= 0.0) || (prev_r > 0.0 && r <= 0.0))) out.push_back({prev_s, s});
        prev_s = s;
        prev_r = r;
    }
    return out;
}

double quadrature_energy(const Profile& V, std::size_t panels) {
    const Params& p = V.params;
    const double R = p.R();
    const double k = p.sqrt_alpha();
    using GL = boost::math::quadrature::gauss<double, 10>;
    const auto& nodes = GL::abscissa();
    const auto& weights = GL::weights();

    // Symmetric rule: boost stores the nonnegative half; expand it.
    std::vector<std::pair<double, double>> rule;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        rule.push_back({nodes[i], weights[i]});
        if (nodes[i] != 0.0) rule.push_back({-nodes[i], weights[i]});
    }
    std::sort(rule.begin(), rule.end());

    std::array<double, 2> x{V.s, k * V.s};
    auto rhs = [&p](double, const std::array<double, 2>& st, std::array<double, 2>& ds) {
        ds[0] = st[1];
        ds[1] = -f(st[0], p);
    };
    const ode::Tolerances tol{1e-15, 1e-13};
    double dt = 1e-3;
    double y = -R;
    const double width = 2.0 * R / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t j = 0; j < panels; ++j) {
        const double a = -R + width * static_cast<double>(j);
        for (const auto& [xi, wi] : rule) {
            const double yn = a + 0.5 * width * (xi + 1.0);
            ode::integrate(rhs, x, y, yn, dt, tol);
            y = yn;
            sum += 0.5 * width * wi * (0.5 * x[1] * x[1] - F(x[0], p));
        }
    }
    ode::integrate(rhs, x, y, R, dt, tol);
    return sum + 0.5 * k * (V.s * V.s + x[0] * x[0]);
}

}  // namespace stripe::oracles

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stripe/oracles.hpp"
#include "stripe/profile_solver.hpp"

using namespace stripe;

namespace {

// Long-double RK4 through the profile grid, several substeps per grid interval.
double reintegration_defect(const Profile& V, int substeps = 8) {
    using ld = long double;
    const Params& p = V.params;
    auto fv = [&](ld u) { return static_cast<ld>(p.lambda()) * u * (u - p.a()) * (1 - u); };
    ld v = V.s, w = p.sqrt_alpha() * V.s;
    const ld hh = static_cast<ld>(V.spacing()) / substeps;
    double worst = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) {
        worst = std::max({worst, std::abs(static_cast<double>(v) - V.v[i]), std::abs(static_cast<double>(w) - V.w[i])});
        for (int k = 0; k < substeps; ++k) {
            const ld k1v = w, k1w = -fv(v);
            const ld k2v = w + hh / 2 * k1w, k2w = -fv(v + hh / 2 * k1v);
            const ld k3v = w + hh / 2 * k2w, k3w = -fv(v + hh / 2 * k2v);
            const ld k4v = w + hh * k3w, k4w = -fv(v + hh * k3v);
            v += hh / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
            w += hh / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
        }
    }
    return worst;
}

// Newton relaxation of V'' + g(y, V) = 0 on [-L, L] with V(±L) = 0, started from `guess`.
std::vector<double> relax_full_line(const Params& p, double L, std::size_t n, std::vector<double> u) {
    const double dy = 2.0 * L / static_cast<double>(n - 1);
    auto y = [&](std::size_t i) { return -L + dy * static_cast<double>(i); };
    // A node sitting on |y| = R sees the mean of both sides, which keeps the scheme second order
    // across the jump of V''.
    auto side = [&](std::size_t i) {
        const double d = std::abs(y(i)) - p.R();
        return std::abs(d) < 1e-9 ? 0.5 : (d < 0 ? 1.0 : 0.0);
    };
    auto g = [&](std::size_t i, double v) { return side(i) * f(v, p) - (1 - side(i)) * p.alpha() * v; };
    auto dg = [&](std::size_t i, double v) { return side(i) * f_prime(v, p) - (1 - side(i)) * p.alpha(); };
    const std::size_t m = n - 2;
    std::vector<double> diag(m), rhs(m), cp(m), dp(m);
    const double off = 1.0 / (dy * dy);
    for (int it = 0; it < 30; ++it) {
        double norm = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            rhs[k] = -((u[i - 1] - 2 * u[i] + u[i + 1]) * off + g(i, u[i]));
            diag[k] = -2 * off + dg(i, u[i]);
        }
        cp[0] = off / diag[0];
        dp[0] = rhs[0] / diag[0];
        for (std::size_t k = 1; k < m; ++k) {
            const double den = diag[k] - off * cp[k - 1];
            cp[k] = off / den;
            dp[k] = (rhs[k] - off * dp[k - 1]) / den;
        }
        for (std::size_t k = m; k-- > 0;) {
            if (k + 1 < m) dp[k] -= cp[k] * dp[k + 1];
            u[k + 1] += dp[k];
            norm = std::max(norm, std::abs(dp[k]));
        }
        if (norm < 1e-14) break;
    }
    return u;
}

bool crosses(const Profile& A, const Profile& B) {
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < A.size(); ++i) {
        const double d = A.v[i] - B.v[i];
        pos |= d > 1e-9;
        neg |= d < -1e-9;
    }
    return pos && neg;
}

const Params two(1.0, 0.3, 0.5, 3.5);
const Params four(10.0, 0.3, 0.5, 1.5);

}  // namespace

TEST_CASE("residual of the trivial launch is zero") {
    CHECK(residual(0.0, two).value == 0.0);
    CHECK(residual(0.0, four).value == 0.0);
}

TEST_CASE("profile counts") {
    CHECK(find_profiles(Params(1.0, 0.3, 0.5, 3.0)).profiles.size() == 1);
    CHECK(find_profiles(two).profiles.size() == 3);
    CHECK(find_profiles(Params(10.0, 0.3, 0.5, 0.5)).profiles.size() == 1);
    CHECK(find_profiles(Params(10.0, 0.3, 0.5, 1.0)).profiles.size() == 3);
    CHECK(find_profiles(four).profiles.size() == 5);
    CHECK_THROWS_AS(largest_profile(Params(1.0, 0.3, 0.5, 3.0)), NoNontrivialProfile);
}

TEST_CASE("brute scan agrees with the solver") {
    for (const Params& p : {Params(1.0, 0.3, 0.5, 3.0), two, Params(1.0, 0.3, 0.5, 6.0), Params(10.0, 0.3, 0.5, 0.5),
                            Params(10.0, 0.3, 0.5, 1.0), four, Params(1.0, 0.25, 0.1, 2.5)}) {
        CAPTURE(p.lambda());
        CAPTURE(p.R());
        const auto set = find_profiles(p);
        const auto brackets = oracles::brute_profile_scan(p, 10000);
        REQUIRE(brackets.size() == set.nontrivial_count());
        for (std::size_t i = 0; i < brackets.size(); ++i) {
            CHECK(set.profiles[i + 1].s >= brackets[i].lo);
            CHECK(set.profiles[i + 1].s <= brackets[i].hi);
        }
    }
    CHECK(oracles::brute_profile_scan(Params(1.0, 0.3, 0.5, 0.5 * 3.405443), 10000).empty());
}

TEST_CASE("profile invariants") {
    for (const Params& p : {two, four, Params(1.0, 0.3, 0.5, 6.0), Params(1.0, 0.25, 0.1, 2.5), Params(10.0, 0.3, 0.5, 1.0)}) {
        CAPTURE(p.lambda());
        CAPTURE(p.R());
        const auto set = find_profiles(p);
        CHECK(set.profiles.size() % 2 == 1);
        CHECK(set.warnings.empty());
        CHECK(set.largest == set.profiles.size() - 1);
        for (const auto& V : set.profiles) {
            const double k = p.sqrt_alpha();
            CHECK(std::abs(V.w.front() - k * V.v.front()) <= 1e-8);
            CHECK(std::abs(V.w.back() + k * V.v.back()) <= 1e-8);
            CHECK(V.min_value() >= 0.0);
            CHECK(std::abs(V.residual) <= 1e-10);
            CHECK(reintegration_defect(V) <= 1e-8);
        }
        const auto& vm = set.vm();
        CHECK(vm.parity_defect <= 1e-7);
        CHECK(vm.even);
        CHECK(vm.max_value() < 1.0);
        CHECK(vm.center_value < 1.0);
        for (std::size_t i = 0; i + 1 < set.profiles.size(); ++i) {
            CHECK(set.profiles[i].s < set.profiles[i + 1].s);
            for (std::size_t j = 0; j < vm.size(); ++j) CHECK(set.profiles[i].v[j] < vm.v[j] + 1e-12);
        }
        // Middle profiles: each one crosses every other middle profile.
        for (std::size_t i = 1; i + 1 < set.profiles.size(); ++i)
            for (std::size_t j = i + 1; j + 1 < set.profiles.size(); ++j) CHECK(crosses(set.profiles[i], set.profiles[j]));
    }
}

TEST_CASE("largest profile centre grows with R") {
    double prev = 0.0;
    for (double R = 3.5; R <= 8.0; R += 0.5) {
        const auto vm = largest_profile(Params(1.0, 0.3, 0.5, R));
        CHECK(vm.center_value > prev);
        prev = vm.center_value;
    }
}

TEST_CASE("determinism") {
    const auto a = find_profiles(four);
    const auto b = find_profiles(four);
    REQUIRE(a.profiles.size() == b.profiles.size());
    for (std::size_t i = 0; i < a.profiles.size(); ++i) {
        CHECK(a.profiles[i].s == b.profiles[i].s);
        CHECK(a.profiles[i].v == b.profiles[i].v);
    }
}

TEST_CASE("extension to the line") {
    SUBCASE("trivial profile") {
        const auto set = find_profiles(two);
        for (const auto& [yy, v] : extend_to_line(set.profiles[0], 20.0, 101)) CHECK(v == 0.0);
    }
    SUBCASE("analytic tail and C1 matching") {
        const auto vm = largest_profile(two);
        const double k = two.sqrt_alpha();
        const double R = two.R();
        CHECK(std::abs(vm.value_at(R + 1.0 / k) - vm.v.back() / std::exp(1.0)) <= 1e-10);
        CHECK(std::abs(vm.value_at(-R - 1.0 / k) - vm.v.front() / std::exp(1.0)) <= 1e-10);
        CHECK(std::abs(vm.slope_at(R + 1e-12) - vm.slope_at(R - 1e-12)) <= 1e-8);
        CHECK(std::abs(vm.slope_at(-R + 1e-12) - vm.slope_at(-R - 1e-12)) <= 1e-8);
        const auto line = extend_to_line(vm, R + 1.0 / k, 3);
        REQUIRE(line.size() == 3);
        CHECK(line[2].first == doctest::Approx(R + 1.0 / k));
        CHECK(std::abs(line[2].second - vm.v.back() / std::exp(1.0)) <= 1e-10);
        CHECK_THROWS(extend_to_line(vm, R, 11));
    }
    SUBCASE("H1 distance to a large-domain relaxation solve") {
        for (const Params& p : {two, Params(1.0, 0.25, 0.1, 2.5)}) {
            const auto set = find_profiles(p);
            const double L = p.R() + 20.0 / p.sqrt_alpha();
            // Nodes placed so that +-R fall on the grid.
            const double dy = p.R() / 1000.0;
            const auto n = static_cast<std::size_t>(std::llround(2.0 * L / dy)) + 1;
            const double Lg = dy * static_cast<double>(n - 1) / 2.0;
            for (const auto& V : set.profiles) {
                if (V.kind == ProfileKind::trivial) continue;
                const auto line = extend_to_line(V, Lg, n);
                std::vector<double> guess(n);
                for (std::size_t i = 0; i < n; ++i) guess[i] = line[i].second;
                guess.front() = guess.back() = 0.0;
                const auto relaxed = relax_full_line(p, Lg, n, guess);
                double h1 = 0.0;
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    const double e0 = line[i].second - relaxed[i], e1 = line[i + 1].second - relaxed[i + 1];
                    h1 += 0.5 * (e0 * e0 + e1 * e1) * dy + (e1 - e0) * (e1 - e0) / dy;
                }
                CHECK(std::sqrt(h1) <= 1e-4);
            }
        }
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stripe/phase_plane.hpp"

using namespace stripe;

namespace {

// Reference integrator: classical RK4 in long double with a fixed small step.
PhasePoint rk4_reference(PhasePoint x, double length, const Params& p, int steps) {
    using ld = long double;
    const ld lam = p.lambda(), a = p.a();
    auto fv = [&](ld u) { return lam * u * (u - a) * (1 - u); };
    ld v = x.v, w = x.w;
    const ld hh = static_cast<ld>(length) / steps;
    for (int i = 0; i < steps; ++i) {
        const ld k1v = w, k1w = -fv(v);
        const ld k2v = w + hh / 2 * k1w, k2w = -fv(v + hh / 2 * k1v);
        const ld k3v = w + hh / 2 * k2w, k3w = -fv(v + hh / 2 * k2v);
        const ld k4v = w + hh * k3w, k4w = -fv(v + hh * k3v);
        v += hh / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        w += hh / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
    }
    return {static_cast<double>(v), static_cast<double>(w)};
}

int residual_sign_changes(const std::vector<CurveSample>& samples) {
    int changes = 0;
    double last = 0.0;
    for (const auto& c : samples) {
        if (c.s == 0.0 || c.residual == 0.0) continue;
        if (last != 0.0 && (last > 0) != (c.residual > 0)) ++changes;
        last = c.residual;
    }
    return changes;
}

}  // namespace

TEST_CASE("fixed points stay put") {
    const Params p(1.0, 0.25, 0.5, 2.0);
    for (double L : {0.1, 1.0, 8.0}) {
        const auto z = flow({0.0, 0.0}, L, p).end;
        CHECK(z.v == 0.0);
        CHECK(z.w == 0.0);
        const auto s = flow({p.a(), 0.0}, L, p).end;
        CHECK(std::abs(s.v - p.a()) < 1e-14);
        CHECK(std::abs(s.w) < 1e-14);
    }
}

TEST_CASE("hamiltonian values") {
    const Params p(1.0, 0.25, 0.5, 2.0);
    CHECK(hamiltonian({0.0, 0.0}, p) == 0.0);
    CHECK(hamiltonian({1.0, 0.0}, p) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
    CHECK(hamiltonian({0.0, 2.0}, p) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("flow from (0.5, 0) over length 1 against a reference integration") {
    const Params p(1.0, 0.25, 0.5, 2.0);
    const PhasePoint x{0.5, 0.0};
    const auto end = flow(x, 1.0, p).end;
    const auto ref = rk4_reference(x, 1.0, p, 20000);
    CHECK(std::abs(end.v - ref.v) < 1e-9);
    CHECK(std::abs(end.w - ref.w) < 1e-9);
    CHECK(std::abs(hamiltonian(end, p) - hamiltonian(x, p)) < 1e-8);
}

TEST_CASE("hamiltonian is conserved along trajectories of length up to 4R") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> V(-0.2, 1.1), W(-0.6, 0.6);
    for (const Params& p : {Params(1.0, 0.3, 0.5, 3.5), Params(10.0, 0.3, 0.5, 1.5), Params(1.0, 0.1, 0.05, 2.0)}) {
        for (int trial = 0; trial < 40; ++trial) {
            const PhasePoint x{V(rng), W(rng)};
            const double L = 4.0 * p.R() * (trial + 1) / 40.0;
            const auto res = flow(x, L, p, {}, true);
            if (res.escaped) continue;
            const double h0 = hamiltonian(x, p);
            double drift = 0.0;
            for (const auto& t : res.trajectory) drift = std::max(drift, std::abs(hamiltonian({t[1], t[2]}, p) - h0));
            CHECK(drift <= 1e-8);
        }
    }
}

TEST_CASE("backward flow undoes forward flow") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> V(0.0, 1.0), W(-0.4, 0.4);
    const Params p(1.0, 0.3, 0.5, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        const PhasePoint x{V(rng), W(rng)};
        const auto fwd = flow(x, 6.0, p);
        if (fwd.escaped) continue;
        const auto back = flow_backward(fwd.end, 6.0, p);
        REQUIRE_FALSE(back.escaped);
        CHECK(std::abs(back.end.v - x.v) < 1e-8);
        CHECK(std::abs(back.end.w - x.w) < 1e-8);
    }
}

TEST_CASE("the homoclinic orbit of 0 turns at beta") {
    for (const Params& p : {Params(1.0, 0.3, 0.5, 1.0), Params(10.0, 0.25, 0.5, 1.0), Params(2.0, 0.1, 0.5, 1.0)}) {
        const double eps = 1e-9;
        const double k = std::sqrt(p.a() * p.lambda());
        const PhasePoint start{eps, k * eps};
        const auto res = flow(start, std::log(1e3 / eps) / k + 10.0, p, {}, true);
        // Find the first accepted step where w turns negative and bisect the turning point.
        std::size_t i = 1;
        while (i < res.trajectory.size() && res.trajectory[i][2] > 0.0) ++i;
        REQUIRE(i < res.trajectory.size());
        const PhasePoint before{res.trajectory[i - 1][1], res.trajectory[i - 1][2]};
        double lo = 0.0, hi = res.trajectory[i][0] - res.trajectory[i - 1][0];
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (flow_to(before, mid, p).w > 0.0 ? lo : hi) = mid;
        }
        const double vmax = flow_to(before, lo, p).v;
        CHECK(std::abs(vmax - beta(p)) < 1e-6);
    }
}

TEST_CASE("homoclinic test") {
    CHECK_FALSE(homoclinic_crossing(Params(1.0, 0.3, 0.5, 1.0)).line_meets_homoclinic);
    const auto ht = homoclinic_crossing(Params(10.0, 0.3, 0.5, 1.0));
    CHECK(ht.line_meets_homoclinic);
    CHECK(ht.regime.supercritical_line);
    CHECK(ht.unstable_slope == doctest::Approx(std::sqrt(3.0)));
    CHECK(ht.line_slope == doctest::Approx(std::sqrt(0.5)));
    CHECK_FALSE(homoclinic_crossing(Params(2.0, 0.25, 0.5, 1.0)).line_meets_homoclinic);
}

TEST_CASE("image of the launch line") {
    SUBCASE("s = 0 maps to the origin") {
        const auto c = shoot(0.0, Params(1.0, 0.3, 0.5, 3.5));
        CHECK(c.endpoint.v == 0.0);
        CHECK(c.endpoint.w == 0.0);
        CHECK(c.residual == 0.0);
        CHECK_FALSE(c.blowup);
    }
    SUBCASE("thin stripe: residual keeps one sign for s > 0") {
        const auto samples = sample_image_of_line(Params(1.0, 0.3, 0.5, 3.0), 2.0, 400);
        CHECK(samples.front().s == 0.0);
        CHECK(residual_sign_changes(samples) == 0);
    }
    SUBCASE("alpha < a lambda, large R: at least four sign changes") {
        const auto samples = sample_image_of_line(Params(10.0, 0.3, 0.5, 2.0), 2.0, 400);
        CHECK(residual_sign_changes(samples) >= 4);
    }
    SUBCASE("sorted, blow-ups flagged with a sentinel") {
        const auto samples = sample_image_of_line(Params(1.0, 0.3, 0.5, 6.0), 2.0, 200);
        bool any_blowup = false;
        for (std::size_t i = 1; i < samples.size(); ++i) CHECK(samples[i].s > samples[i - 1].s);
        for (const auto& c : samples)
            if (c.blowup) {
                any_blowup = true;
                CHECK(std::abs(c.residual) >= 1e5);
            }
        CHECK(any_blowup);
    }
    SUBCASE("deterministic and independent of the worker count") {
        const Params p(10.0, 0.3, 0.5, 1.5);
        SamplingOptions many;
        many.jobs = 4;
        const auto a = sample_image_of_line(p, 2.0, 300);
        const auto b = sample_image_of_line(p, 2.0, 300);
        const auto c = sample_image_of_line(p, 2.0, 300, many);
        REQUIRE(a.size() == b.size());
        REQUIRE(a.size() == c.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].s == b[i].s);
            CHECK(a[i].residual == b[i].residual);
            CHECK(a[i].s == c[i].s);
            CHECK(a[i].residual == c[i].residual);
        }
    }
}

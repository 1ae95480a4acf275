#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stripe/oracles.hpp"
#include "stripe/stability.hpp"

using namespace stripe;
using std::numbers::pi;

namespace {

const Params two(1.0, 0.3, 0.5, 3.5);
const Params four(10.0, 0.3, 0.5, 1.5);

std::vector<int> counts(const ProfileSet& set) {
    std::vector<int> k;
    for (const auto& V : set.profiles) k.push_back(count_nonneg(V).k);
    return k;
}

// Mixed stable and unstable configurations on both sides of alpha = a lambda.
std::vector<Params> oracle_configs() {
    std::vector<Params> out;
    for (double R : {3.5, 4.0, 5.0, 6.5}) out.emplace_back(1.0, 0.3, 0.5, R);
    for (double R : {0.6, 0.8, 1.0, 1.2, 1.5, 1.8}) out.emplace_back(10.0, 0.3, 0.5, R);
    for (double R : {2.0, 2.6, 3.5}) out.emplace_back(1.0, 0.25, 0.1, R);
    for (double R : {0.6, 1.0}) out.emplace_back(1.0, 0.1, 0.01, R);
    for (double R : {1.8, 2.5}) out.emplace_back(1.0, 0.3, 0.05, R);
    for (double R : {0.2, 0.3}) out.emplace_back(10.0, 0.1, 0.1, R);
    for (double R : {1.5, 2.0}) out.emplace_back(3.0, 0.2, 0.3, R);
    return out;
}

}  // namespace

TEST_CASE("trivial profile") {
    for (const Params& p : {two, four, Params(1.0, 0.1, 0.01, 1.0)}) {
        const auto set = find_profiles(p);
        const auto& Z = set.profiles.front();
        REQUIRE(Z.kind == ProfileKind::trivial);
        for (double mu : {0.0, 0.5, 3.0}) {
            const auto tr = theta_solve(Z, mu);
            CHECK(tr.theta.front() == std::atan(std::sqrt(mu + p.alpha())));
            for (double th : tr.theta) {
                CHECK(th > 0.0);
                CHECK(th < pi / 2);
            }
        }
        const auto rep = count_nonneg(Z);
        CHECK(rep.k == 0);
        CHECK(rep.h0 > 0.0);
        CHECK(rep.h0 < pi);
        CHECK(tangent_crossing_count(Z) == 0);
        CHECK(oracles::dense_spectrum(Z, oracles::DenseOperatorSpec::defaults_for(p)).count == 0);
    }
}

TEST_CASE("stability counts") {
    CHECK(counts(find_profiles(two)) == std::vector<int>{0, 1, 0});
    CHECK(counts(find_profiles(four)) == std::vector<int>{0, 1, 2, 1, 0});
}

TEST_CASE("angle and counting function properties") {
    for (const Params& p : {two, four}) {
        const auto set = find_profiles(p);
        for (const auto& V : set.profiles) {
            const double top = sup_abs_f_prime(V);
            // Above sup |f'| the angle is confined to (0, pi/2).
            const auto high = theta_solve(V, top + 0.1);
            for (double th : high.theta) {
                CHECK(th > 0.0);
                CHECK(th < pi / 2);
            }
            const double hh = h(V, top + 0.1);
            CHECK(hh > 0.0);
            CHECK(hh < pi);

            // Pointwise monotonicity in mu.
            const auto t1 = theta_solve(V, 0.2), t2 = theta_solve(V, 0.1);
            for (std::size_t i = 1; i < t1.theta.size(); ++i) CHECK(t1.theta[i] > t2.theta[i]);

            // h strictly increasing on 50 points of [0, sup|f'| + 1].
            double prev = -1e300;
            for (int i = 0; i < 50; ++i) {
                const double val = h(V, (top + 1.0) * i / 49.0);
                CHECK(val > prev);
                prev = val;
            }

            // Confinement: the angle can only pass pi/2 + j pi downwards.
            for (double mu : {0.0, 0.05, 1.0}) {
                const auto tr = theta_solve(V, mu);
                for (std::size_t i = 1; i < tr.theta.size(); ++i) {
                    const double m0 = std::floor((tr.theta[i - 1] - pi / 2) / pi);
                    const double m1 = std::floor((tr.theta[i] - pi / 2) / pi);
                    CHECK(m1 <= m0);
                }
            }
            CHECK(tangent_crossing_count(V) == count_nonneg(V).k);
        }
    }
}

TEST_CASE("eigenvalues") {
    const auto set = find_profiles(four);
    for (const auto& V : set.profiles) {
        const auto rep = analyze(V);
        CHECK_FALSE(rep.marginal);
        REQUIRE(rep.eigenvalues.size() == static_cast<std::size_t>(rep.k));
        for (std::size_t j = 0; j < rep.eigenvalues.size(); ++j) {
            CHECK(rep.eigenvalues[j] >= 0.0);
            if (j > 0) CHECK(rep.eigenvalues[j] < rep.eigenvalues[j - 1]);
            CHECK(std::abs(h(V, rep.eigenvalues[j]) + pi * static_cast<double>(j)) < 1e-8);
        }
    }
}

TEST_CASE("principal eigenfunction of an unstable profile") {
    for (const Params& p : {two, four}) {
        const auto set = find_profiles(p);
        for (const auto& V : set.profiles) {
            const auto rep = analyze(V);
            if (rep.k < 1) continue;
            const double mu = rep.eigenvalues.front();
            const auto ef = principal_eigenfunction(V, mu);
            for (double phi : ef.phi) CHECK(phi > 0.0);
            const double k = std::sqrt(mu + p.alpha());
            CHECK(std::abs(ef.dphi.front() - k * ef.phi.front()) <= 1e-7);
            CHECK(std::abs(ef.dphi.back() + k * ef.phi.back()) <= 1e-7);
            // phi'' from a fourth-order difference of phi', then the equation residual.
            const double dy = V.spacing();
            double worst = 0.0, slope_gap = 0.0;
            for (std::size_t i = 2; i + 2 < ef.phi.size(); ++i) {
                const double d2 = (-ef.dphi[i + 2] + 8 * ef.dphi[i + 1] - 8 * ef.dphi[i - 1] + ef.dphi[i - 2]) / (12 * dy);
                worst = std::max(worst, std::abs(d2 + (f_prime(V.v[i], p) - mu) * ef.phi[i]));
                const double d1 = (-ef.phi[i + 2] + 8 * ef.phi[i + 1] - 8 * ef.phi[i - 1] + ef.phi[i - 2]) / (12 * dy);
                slope_gap = std::max(slope_gap, std::abs(d1 - ef.dphi[i]));
            }
            CHECK(worst <= 1e-6);
            CHECK(slope_gap <= 1e-6);
            // Tails continue with the decay rate sqrt(mu + alpha).
            CHECK(ef.value_at(p.R() + 1.0) == doctest::Approx(ef.phi.back() * std::exp(-k)).epsilon(1e-10));
        }
    }
}

TEST_CASE("Pruefer counts match the dense spectrum oracle") {
    const auto configs = oracle_configs();
    REQUIRE(configs.size() >= 20);
    std::size_t compared = 0;
    for (const Params& p : configs) {
        const auto set = find_profiles(p);
        for (const auto& V : set.profiles) {
            const auto rep = analyze(V);
            if (rep.marginal) continue;
            CAPTURE(p.lambda());
            CAPTURE(p.a());
            CAPTURE(p.alpha());
            CAPTURE(p.R());
            CAPTURE(V.s);
            const auto spec = oracles::DenseOperatorSpec::defaults_for(p);
            const auto dense = oracles::dense_spectrum(V, spec);
            CHECK(dense.count == rep.k);
            ++compared;
            if (rep.k >= 1) CHECK(std::abs(oracles::richardson_top_eigenvalue(V, spec) - rep.eigenvalues.front()) <= 1e-4);
        }
    }
    CHECK(compared >= 40);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

#include "stripe/core_model.hpp"

using namespace stripe;

namespace {

// Independent oracles: F by adaptive Gauss-Kronrod, beta by plain bisection on it.
double F_quadrature(double u, const Params& p) {
    auto g = [&](double v) { return p.lambda() * v * (v - p.a()) * (1.0 - v); };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, u, 10, 1e-14);
}

double beta_bisection(const Params& p) {
    double lo = p.a() + 1e-12, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (F_quadrature(mid, p) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

const Params p025(1.0, 0.25, 0.5, 3.0);

}  // namespace

TEST_CASE("f vanishes at its three zeros") {
    for (double lam : {0.5, 1.0, 10.0})
        for (double a : {0.05, 0.25, 0.45}) {
            const Params p(lam, a, 0.3, 1.0);
            CHECK(f(0.0, p) == 0.0);
            CHECK(std::abs(f(a, p)) <= 1e-15);
            CHECK(f(1.0, p) == 0.0);
        }
}

TEST_CASE("f, f' and F at the documented points") {
    CHECK(f(0.5, p025) == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(f_prime(0.0, p025) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(f_prime(0.25, p025) == doctest::Approx(0.1875).epsilon(1e-15));
    CHECK(F(0.0, p025) == 0.0);
    CHECK(F(1.0, p025) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
}

TEST_CASE("f' agrees with a central difference") {
    const Params p(3.0, 0.3, 0.5, 1.0);
    for (double hstep : {1e-6, 1e-7, 1e-8}) {
        const double fd = (f(0.7 + hstep, p) - f(0.7 - hstep, p)) / (2.0 * hstep);
        CHECK(std::abs(fd - f_prime(0.7, p)) < 1e-6);
    }
}

TEST_CASE("F matches quadrature of f") {
    for (double a : {0.1, 0.25, 0.4})
        for (double u : {0.2, 0.5, 0.8, 1.0, 1.3}) {
            const Params p(2.0, a, 0.5, 1.0);
            CHECK(std::abs(F(u, p) - F_quadrature(u, p)) < 1e-10);
        }
}

TEST_CASE("F(1) equals lambda (1 - 2a) / 12 and is positive") {
    for (double lam : {0.1, 1.0, 25.0})
        for (double a : {0.01, 0.2, 0.49}) {
            const Params p(lam, a, 1.0, 1.0);
            CHECK(F(1.0, p) == doctest::Approx(lam * (1.0 - 2.0 * a) / 12.0).epsilon(1e-14));
            CHECK(F(1.0, p) > 0.0);
        }
}

TEST_CASE("G inside and outside the stripe") {
    const Params p(1.0, 0.25, 0.5, 2.0);
    for (double u : {0.0, 0.3, 0.9}) CHECK(G(0.0, u, p) == F(u, p));
    CHECK(G(4.0, 1.0, p) == doctest::Approx(-0.25).epsilon(1e-15));
    for (double y : {-5.0, -2.0, 0.0, 1.9, 2.1, 7.0}) CHECK(G(y, 0.0, p) == 0.0);
}

TEST_CASE("beta") {
    SUBCASE("a = 0.25 against the bisection oracle") {
        const double b = beta(p025);
        CHECK(b == doctest::Approx(0.39240).epsilon(1e-4));
        CHECK(std::abs(b - beta_bisection(p025)) < 1e-11);
        CHECK(std::abs(F(b, p025)) < 1e-12);
    }
    SUBCASE("a close to 1/2 pushes beta to 1") {
        const Params p(1.0, 0.499, 0.5, 1.0);
        CHECK(std::abs(beta(p) - 1.0) < 0.05);
        CHECK(std::abs(beta(p) - beta_bisection(p)) < 1e-11);
    }
    SUBCASE("sign of F around beta") {
        for (double a : {0.05, 0.2, 0.3, 0.45}) {
            const Params p(1.0, a, 0.5, 1.0);
            const double b = beta(p);
            CHECK(b > a);
            CHECK(b < 1.0);
            for (int i = 1; i < 1000; ++i) {
                const double u = i / 1000.0;
                if (u < b - 1e-9) CHECK(F(u, p) < 0.0);
                if (u > b + 1e-9) CHECK(F(u, p) > 0.0);
            }
        }
    }
}

TEST_CASE("sign pattern of f on a dense sample") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.01, 0.49);
    for (int trial = 0; trial < 20; ++trial) {
        const Params p(1.0 + 9.0 * trial / 19.0, U(rng), 0.5, 1.0);
        const double a = p.a();
        for (int i = 1; i < 400; ++i) {
            const double u = 1.5 * i / 400.0;
            if (std::abs(u - a) < 1e-9 || std::abs(u - 1.0) < 1e-9) continue;
            if (u < a || u > 1.0) CHECK(f(u, p) < 0.0);
            else CHECK(f(u, p) > 0.0);
        }
        CHECK(f(a / 2, p) < 0.0);
        CHECK(f((a + 1) / 2, p) > 0.0);
    }
}

TEST_CASE("regime flag is alpha < a lambda, boundary on the >= side") {
    CHECK_FALSE(regime_of(Params(1.0, 0.3, 0.5, 1.0)).supercritical_line);
    CHECK(regime_of(Params(10.0, 0.3, 0.5, 1.0)).supercritical_line);
    const Params edge(2.0, 0.25, 0.5, 1.0);
    CHECK(edge.alpha() == edge.a() * edge.lambda());
    CHECK_FALSE(regime_of(edge).supercritical_line);
}

TEST_CASE("parameter validation names the field") {
    auto message = [](auto make) {
        try {
            make();
        } catch (const InvalidParams& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message([] { Params(0.0, 0.3, 0.5, 1.0); }).find("lambda") != std::string::npos);
    CHECK(message([] { Params(1.0, 0.5, 0.5, 1.0); }).find(" a ") != std::string::npos);
    CHECK(message([] { Params(1.0, 0.0, 0.5, 1.0); }).find(" a ") != std::string::npos);
    CHECK(message([] { Params(1.0, 0.3, -1.0, 1.0); }).find("alpha") != std::string::npos);
    CHECK(message([] { Params(1.0, 0.3, 0.5, 0.0); }).find(" R ") != std::string::npos);
    CHECK_THROWS_AS(Params(NAN, 0.3, 0.5, 1.0), InvalidParams);
    CHECK_THROWS_AS(Params(1.0, 0.3, 0.5, INFINITY), InvalidParams);
}

TEST_CASE("key-value and JSON round trips") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Params p(0.1 + 20 * U(rng), 0.001 + 0.498 * U(rng), 1e-3 + 3 * U(rng), 0.01 + 10 * U(rng));
        for (const Params& q : {params_from_key_value(to_key_value(p)), params_from_json(to_json(p))}) {
            CHECK(std::abs(q.lambda() - p.lambda()) <= 1e-15 * p.lambda());
            CHECK(std::abs(q.a() - p.a()) <= 1e-15 * p.a());
            CHECK(std::abs(q.alpha() - p.alpha()) <= 1e-15 * p.alpha());
            CHECK(std::abs(q.R() - p.R()) <= 1e-15 * p.R());
        }
    }
    CHECK_THROWS_AS(params_from_key_value("lambda = 1\na = 0.3\nalpha = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(params_from_key_value("lambda = 1\na = 0.3\nalpha = 0.5\nR = 1\nmu = 2\n"), ConfigError);
    CHECK_THROWS(params_from_json(nlohmann::json{{"lambda", 1}, {"a", 0.7}, {"alpha", 0.5}, {"R", 1}}));
}

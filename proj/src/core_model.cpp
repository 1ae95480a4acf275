#include "stripe/core_model.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <sstream>

namespace stripe {

namespace {

void require(bool ok, const char* field, const char* rule, double value) {
    if (!ok) {
        std::ostringstream os;
        os << "invalid parameter " << field << " = " << value << " (" << rule << ")";
        throw InvalidParams(os.str());
    }
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Params::Params(double lambda, double a, double alpha, double R)
    : lambda_(lambda), a_(a), alpha_(alpha), R_(R) {
    require(std::isfinite(lambda) && lambda > 0.0, "lambda", "must be > 0", lambda);
    require(std::isfinite(a) && a > 0.0 && a < 0.5, "a", "must lie in (0, 1/2)", a);
    require(std::isfinite(alpha) && alpha > 0.0, "alpha", "must be > 0", alpha);
    require(std::isfinite(R) && R > 0.0, "R", "must be > 0", R);
}

Regime regime_of(const Params& p) {
    return Regime{p.alpha() < p.a() * p.lambda()};
}

double beta(const Params& p) {
    // F(u) = lambda u^2 (-u^2/4 + (1+a)u/3 - a/2), so the nonzero roots solve
    // u^2 - (4/3)(1+a) u + 2a = 0.
    const double a = p.a();
    const double half_b = 2.0 * (1.0 + a) / 3.0;
    const double disc = std::max(0.0, half_b * half_b - 2.0 * a);
    // Smaller root written without cancellation.
    double root = 2.0 * a / (half_b + std::sqrt(disc));

    // Polish on F itself: F < 0 on (a, beta), F > 0 on (beta, 1].
    double lo = std::max(a, root - 1e-6);
    double hi = std::min(1.0, root + 1e-6);
    if (!(F(lo, p) < 0.0 && F(hi, p) > 0.0)) {
        lo = a;
        hi = 1.0;
    }
    if (!(F(lo, p) <= 0.0 && F(hi, p) >= 0.0)) {
        throw Error("beta: no sign change of F on (a, 1)");
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (F(mid, p) < 0.0) lo = mid; else hi = mid;
    }
    root = 0.5 * (lo + hi);
    if (!(root > a && root < 1.0)) throw Error("beta: root outside (a, 1)");
    return root;
}

double max_abs_f_prime(const Params& p, double lo, double hi) {
    // f' is a downward parabola with vertex at (1+a)/3.
    const double vertex = (1.0 + p.a()) / 3.0;
    double m = std::max(std::abs(f_prime(lo, p)), std::abs(f_prime(hi, p)));
    if (vertex > lo && vertex < hi) m = std::max(m, std::abs(f_prime(vertex, p)));
    return m;
}

std::string to_key_value(const Params& p) {
    std::ostringstream os;
    os << "lambda = " << format_double(p.lambda()) << '\n'
       << "a = " << format_double(p.a()) << '\n'
       << "alpha = " << format_double(p.alpha()) << '\n'
       << "R = " << format_double(p.R()) << '\n';
    return os.str();
}

Params params_from_key_value(const std::string& text) {
    std::map<std::string, double> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key != "lambda" && key != "a" && key != "alpha" && key != "R") {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        try {
            std::size_t used = 0;
            kv[key] = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(lineno) + ": bad number '" + val + "'");
        }
    }
    for (const char* k : {"lambda", "a", "alpha", "R"}) {
        if (!kv.count(k)) throw ConfigError(std::string("missing key '") + k + "'");
    }
    return Params(kv["lambda"], kv["a"], kv["alpha"], kv["R"]);
}

nlohmann::json to_json(const Params& p) {
    return {{"lambda", p.lambda()}, {"a", p.a()}, {"alpha", p.alpha()}, {"R", p.R()}};
}

Params params_from_json(const nlohmann::json& j) {
    try {
        return Params(j.at("lambda").get<double>(), j.at("a").get<double>(),
                      j.at("alpha").get<double>(), j.at("R").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("params json: ") + e.what());
    }
}

}  // namespace stripe

#include "functions.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "fracrule/analysis.hpp"

namespace fracrule::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_real(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw validation_error("invalid number '" + s + "' in " + what);
    }
    return v;
}

std::size_t to_count(const std::string& s, const std::string& what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw validation_error("invalid count '" + s + "' in " + what);
    }
    return v;
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

const std::function<double(double)>& NamedFunction::first_derivative() const {
    if (!d1) throw validation_error("function '" + spec + "' has no first derivative");
    return *d1;
}

const std::function<double(double)>& NamedFunction::second_derivative() const {
    if (!d2) throw validation_error("function '" + spec + "' has no second derivative");
    return *d2;
}

NamedFunction parse_function(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts.empty()) throw validation_error("empty function spec");
    const std::string& name = parts[0];
    auto arity = [&](std::size_t n) {
        if (parts.size() != n + 1) {
            throw validation_error("function '" + name + "' takes " + std::to_string(n) +
                                   " parameter(s): '" + spec + "'");
        }
    };

    if (name == "identity") {
        arity(0);
        return {"identity", [](double x) { return x; }, [](double) { return 1.0; },
                [](double) { return 0.0; }};
    }
    if (name == "sin") {
        arity(0);
        return {"sin", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
                [](double x) { return -std::sin(x); }};
    }
    if (name == "cos") {
        arity(0);
        return {"cos", [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); },
                [](double x) { return -std::cos(x); }};
    }
    if (name == "exp") {
        arity(0);
        return {"exp", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
                [](double x) { return std::exp(x); }};
    }
    if (name == "constant") {
        arity(1);
        const double c = to_real(parts[1], spec);
        return {"constant:" + fmt(c), [c](double) { return c; }, [](double) { return 0.0; },
                [](double) { return 0.0; }};
    }
    if (name == "power") {
        arity(1);
        const double p = to_real(parts[1], spec);
        if (p < 0.0) throw validation_error("power exponent must be non-negative: '" + spec + "'");
        auto pw = [](double x, double e) { return e == 0.0 ? 1.0 : std::pow(x, e); };
        return {"power:" + fmt(p), [p, pw](double x) { return pw(x, p); },
                [p, pw](double x) { return p == 0.0 ? 0.0 : p * pw(x, p - 1.0); },
                [p, pw](double x) {
                    return (p == 0.0 || p == 1.0) ? 0.0 : p * (p - 1.0) * pw(x, p - 2.0);
                }};
    }
    if (name == "weierstrass") {
        arity(3);
        const double alpha = to_real(parts[1], spec);
        const double b = to_real(parts[2], spec);
        const std::size_t n = to_count(parts[3], spec);
        try {
            const WeierstrassParams params(alpha, b, n);
            return {"weierstrass:" + fmt(alpha) + ":" + fmt(b) + ":" + std::to_string(n),
                    [params](double x) { return weierstrass(params, x); }, std::nullopt,
                    std::nullopt};
        } catch (const std::invalid_argument& e) {
            throw validation_error(e.what());
        }
    }
    throw validation_error("unknown function constructor '" + name + "'");
}

GridSpec parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw validation_error("grid must be a:h:n, got '" + text + "'");
    GridSpec g{to_real(parts[0], "grid"), to_real(parts[1], "grid"), to_count(parts[2], "grid")};
    if (!(g.h > 0.0)) throw validation_error("grid step must be positive");
    if (g.n < 2) throw validation_error("grid needs at least two points");
    return g;
}

}  // namespace fracrule::cli

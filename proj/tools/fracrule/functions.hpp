#pragma once

// Named test-function constructors used on the command line:
//   power:p | weierstrass:alpha:b:n_terms | sin | cos | exp | identity | constant:c

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace fracrule::cli {

class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct NamedFunction {
    std::string spec;  ///< canonical text form, parse(spec).spec == spec
    std::function<double(double)> value;
    std::optional<std::function<double(double)>> d1;
    std::optional<std::function<double(double)>> d2;

    [[nodiscard]] const std::function<double(double)>& first_derivative() const;
    [[nodiscard]] const std::function<double(double)>& second_derivative() const;
};

/// Throws validation_error for unknown constructors or out-of-range parameters.
NamedFunction parse_function(const std::string& spec);

/// Parses "a:h:n".
struct GridSpec {
    double a;
    double h;
    std::size_t n;
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};
GridSpec parse_grid(const std::string& text);

}  // namespace fracrule::cli

#pragma once

#include <stdexcept>
#include <string>

namespace sgm {

// Bad inputs: wrong sizes, invalid pmfs, infeasible parameters. CLI exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical failures: zero partition function, lost positive
// semi-definiteness, divergent iterations. CLI exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sgm

#pragma once

#include <stdexcept>
#include <string>

namespace heomtt {

// Invalid user input: model files, flags, argument domains.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature, integrator or equilibration failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured memory or rank budget would be exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace heomtt

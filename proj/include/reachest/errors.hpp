#ifndef REACHEST_ERRORS_HPP
#define REACHEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace reachest {

/// Malformed or out-of-domain input (bad cloud, dimension mismatch, bad value).
class InputError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A configuration that cannot serve the requested computation, e.g. a scale
/// grid that stops short of the scale an estimator needs.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace reachest

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace hyperflow {

// Invalid input to a pure function (out-of-domain point, bad parameter).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation ran but produced an unusable result: non-finite values,
// an unconverged heat tower, transport drift.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hyperflow

#pragma once

#include <stdexcept>
#include <string>

namespace capplan {

// Mismatched vector lengths (fleet vs. vehicle types, ceil members, ...).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A task or capability refers to something the model does not define.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid configuration or template (bad distribution, duplicate names, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad CLI usage or a missing upstream artifact.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A checked invariant did not hold on produced data.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace capplan

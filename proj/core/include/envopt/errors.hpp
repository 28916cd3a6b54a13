#pragma once

#include <stdexcept>
#include <string>

namespace envopt {

// Bad user input: malformed config, unknown option, inconsistent settings.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed scenario/trace/checkpoint file. Carries field/line context in the message.
class ParseError : public ConfigError {
public:
    explicit ParseError(const std::string& what) : ConfigError(what) {}
};

// A structurally valid file describing an impossible scene (overlapping regions,
// unsorted priorities, agents outside their regions, ...).
class InvalidScenario : public ConfigError {
public:
    explicit InvalidScenario(const std::string& what) : ConfigError(what) {}
};

} // namespace envopt

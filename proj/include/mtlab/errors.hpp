#pragma once

#include <stdexcept>
#include <string>

namespace mtlab {

// Error taxonomy used across the library.  All of these derive from
// std::runtime_error so callers can catch coarsely; the CLI maps them to
// exit codes (config/validation -> 1, inconclusive -> 3).

struct input_error : std::runtime_error {
  explicit input_error(const std::string& m) : std::runtime_error(m) {}
};

struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& m) : std::runtime_error(m) {}
};

struct parameter_error : std::runtime_error {
  explicit parameter_error(const std::string& m) : std::runtime_error(m) {}
};

struct geometry_error : std::runtime_error {
  explicit geometry_error(const std::string& m) : std::runtime_error(m) {}
};

// +inf * nonzero in an operator application; message names the offending atom.
struct singularity_error : std::runtime_error {
  explicit singularity_error(const std::string& m) : std::runtime_error(m) {}
};

struct ellipticity_error : std::runtime_error {
  explicit ellipticity_error(const std::string& m) : std::runtime_error(m) {}
};

struct smoothing_order_error : std::runtime_error {
  explicit smoothing_order_error(const std::string& m) : std::runtime_error(m) {}
};

// A check could not be decided at the requested resolution (raise a limit and retry).
struct inconclusive_error : std::runtime_error {
  explicit inconclusive_error(const std::string& m) : std::runtime_error(m) {}
};

struct unsupported_error : std::runtime_error {
  explicit unsupported_error(const std::string& m) : std::runtime_error(m) {}
};

struct degenerate_error : std::runtime_error {
  explicit degenerate_error(const std::string& m) : std::runtime_error(m) {}
};

struct config_error : std::runtime_error {
  explicit config_error(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace mtlab

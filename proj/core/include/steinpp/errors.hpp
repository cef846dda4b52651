#ifndef STEINPP_ERRORS_HPP
#define STEINPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace steinpp {

/// Invalid argument values (negative rates, malformed metric matrices, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Palm distribution requested at an atom with zero intensity.
class PalmUndefinedError : public std::domain_error {
 public:
  explicit PalmUndefinedError(const std::string& what) : std::domain_error(what) {}
};

/// A computation would exceed a configured size/resource cap.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed experiment/CLI configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace steinpp

#endif

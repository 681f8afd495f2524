#pragma once

#include <stdexcept>
#include <string>

namespace sagsim {

/// A parameter outside its documented domain. `field()` names the offending
/// parameter using the same dotted key as the config file.
class InvalidParameter : public std::invalid_argument {
 public:
  InvalidParameter(std::string field, const std::string& constraint)
      : std::invalid_argument(field + ": " + constraint),
        field_(std::move(field)),
        constraint_(constraint) {}

  [[nodiscard]] const std::string& field() const noexcept { return field_; }
  [[nodiscard]] const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string field_;
  std::string constraint_;
};

class DegenerateGeometry : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SizeLimitExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sagsim

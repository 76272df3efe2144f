#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncps {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input configuration (empty particle list, bad mass, schema violation).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string field = {})
      : Error(message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A non-finite value turned up where a finite one is required.
class NumericError : public Error {
 public:
  NumericError(const std::string& message, std::size_t index)
      : Error(message + " (index " + std::to_string(index) + ")"), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Implicit stage equation failed to converge.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& message, std::size_t step_index)
      : Error(message + " (step " + std::to_string(step_index) + ")"), step_index_(step_index) {}

  std::size_t step_index() const noexcept { return step_index_; }

 private:
  std::size_t step_index_;
};

/// 1 - eta*theta vanishes, so the conjugate coordinates are undefined.
class SingularParametersError : public Error {
 public:
  explicit SingularParametersError(double eta_theta_product)
      : Error("singular noncommutativity parameters: eta*theta = " +
              std::to_string(eta_theta_product) + " (1 - eta*theta must be nonzero)"),
        product_(eta_theta_product) {}

  double product() const noexcept { return product_; }

 private:
  double product_;
};

/// The requested product needs a free system but the scenario has interactions.
class UnsupportedScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace ncps

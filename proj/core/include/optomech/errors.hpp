#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

enum class Errc {
  NonPositiveElement,
  InvalidParameter,
  WeakCouplingViolated,
  FrequencyRatioViolated,
  InconsistentTopology,
  InvalidDrive,
  UnsupportedScheme,
  ZeroDrive,
  AssumptionViolated,
  InvalidSimConfig,
  NonFiniteSample,
  TooShort,
  NoConvergence,
  AmbiguousPeak,
  OverlapError,
  DomainViolation,
  IoError,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace optomech

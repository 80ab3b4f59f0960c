#pragma once

#include <stdexcept>
#include <string>

namespace cspec {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A constructor or operation received a parameter outside its domain.
class InvalidParameter : public Error {
public:
  using Error::Error;
};

/// An integrand or evaluator produced a non-finite value, or a kernel is not
/// integrable in the required sense.
class NumericalDomainError : public Error {
public:
  using Error::Error;
};

/// A pole fit could not represent its samples well enough to trust the
/// extracted finite part.
class FitQualityError : public Error {
public:
  FitQualityError(const std::string& what, double rms, double threshold)
      : Error(what), rms_(rms), threshold_(threshold) {}
  double rms() const noexcept { return rms_; }
  double threshold() const noexcept { return threshold_; }

private:
  double rms_;
  double threshold_;
};

}  // namespace cspec

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qpbeam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mode index lies outside the truncation box it was written into.
class BoxError : public Error {
 public:
  BoxError(const std::string& what, std::vector<int> k, std::vector<int> j)
      : Error(what), k_(std::move(k)), j_(std::move(j)) {}
  const std::vector<int>& k() const noexcept { return k_; }
  const std::vector<int>& j() const noexcept { return j_; }

 private:
  std::vector<int> k_;
  std::vector<int> j_;
};

/// Operands live on different truncation boxes or lattices.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// |omega . k| fell below the configured divisor floor for a stored mode.
class SmallDivisorError : public Error {
 public:
  SmallDivisorError(const std::string& what, std::vector<int> k, double divisor)
      : Error(what), k_(std::move(k)), divisor_(divisor) {}
  const std::vector<int>& k() const noexcept { return k_; }
  double divisor() const noexcept { return divisor_; }

 private:
  std::vector<int> k_;
  double divisor_;
};

/// A field that must have zero spatial mean carries j = 0 modes.
class SpatialMeanError : public Error {
 public:
  using Error::Error;
};

/// A field that must have zero phase mean carries a k = 0 mode.
class PhaseMeanError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse for the cutoff of the field being synthesized.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// exp of a field whose grid values exceed the configured cap.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A fixed-point or Neumann iteration failed to contract.
class ContractionError : public Error {
 public:
  ContractionError(const std::string& what, double factor)
      : Error(what), factor_(factor) {}
  double factor() const noexcept { return factor_; }

 private:
  double factor_;
};

/// Dense system singular to working precision, or too large for the cap.
class SolveError : public Error {
 public:
  using Error::Error;
};

/// A symbol value fell below its inversion floor, or a proved lower bound failed.
class SymbolError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected; one message per violated precondition.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace qpbeam

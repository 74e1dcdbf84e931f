#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace minheat {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad argument or a profile that violates its invariants.
class InvalidInput : public Error {
public:
  using Error::Error;
};

// Sampling domain too short for a compactly supported profile.
class DomainTruncation : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

class UnsupportedKind : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

// A quantity that is genuinely infinite (divergent integral, infinite rate).
class DivergenceError : public Error {
public:
  using Error::Error;
};

// Correlator sample that is zero or negative where an inverse is required.
class InversionError : public Error {
public:
  InversionError(const std::string& what, double k) : Error(what), k_(k) {}
  double k() const { return k_; }

private:
  double k_;
};

// The least-decoherence correlators are undefined where a smearing transform vanishes.
class PldUndefined : public Error {
public:
  PldUndefined(const std::string& what, std::vector<double> zeros)
      : Error(what), zeros_(std::move(zeros)) {}
  const std::vector<double>& zero_crossings() const { return zeros_; }

private:
  std::vector<double> zeros_;
};

class FormatError : public Error {
public:
  using Error::Error;
};

} // namespace minheat

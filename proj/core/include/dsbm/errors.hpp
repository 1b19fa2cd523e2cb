#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsbm {

// Base of every error the library throws. code() is a stable identifier used
// in machine-readable diagnostics (CLI error JSON, CSV rows).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message);
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& message) : Error("InvalidInput", message) {}
};

// S has no positive diagonal. Carries a Frobenius-Koenig zero block
// rows x cols with |rows| + |cols| = K + 1 (0-based indices).
class NoSupport : public Error {
 public:
  NoSupport(std::vector<int> rows, std::vector<int> cols);
  const std::vector<int>& rows() const noexcept { return rows_; }
  const std::vector<int>& cols() const noexcept { return cols_; }

 private:
  std::vector<int> rows_;
  std::vector<int> cols_;
};

class NotIrreducible : public Error {
 public:
  explicit NotIrreducible(const std::string& message) : Error("NotIrreducible", message) {}
};

class NotStronglyConnected : public Error {
 public:
  explicit NotStronglyConnected(const std::string& message)
      : Error("NotStronglyConnected", message) {}
};

class LabelNotPresent : public Error {
 public:
  explicit LabelNotPresent(const std::string& message) : Error("LabelNotPresent", message) {}
};

class TooLarge : public Error {
 public:
  explicit TooLarge(const std::string& message) : Error("TooLarge", message) {}
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual, int iterations);
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class TauOutOfRange : public Error {
 public:
  TauOutOfRange(double tau, double rho);
};

class SingularKernel : public Error {
 public:
  explicit SingularKernel(const std::string& message) : Error("SingularKernel", message) {}
};

class DomainViolation : public Error {
 public:
  DomainViolation(const std::string& message, std::size_t index);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class QuadratureFailure : public Error {
 public:
  explicit QuadratureFailure(const std::string& message) : Error("QuadratureFailure", message) {}
};

class NegativeArgument : public Error {
 public:
  explicit NegativeArgument(const std::string& message) : Error("NegativeArgument", message) {}
};

class ZeroVariance : public Error {
 public:
  explicit ZeroVariance(const std::string& message) : Error("ZeroVariance", message) {}
};

class EigFailure : public Error {
 public:
  explicit EigFailure(const std::string& message) : Error("EigFailure", message) {}
};

}  // namespace dsbm

#include "dsbm/errors.hpp"

#include <sstream>
#include <utility>

namespace dsbm {

Error::Error(std::string code, const std::string& message)
    : std::runtime_error(message), code_(std::move(code)) {}

namespace {

std::string describe_block(const std::vector<int>& rows, const std::vector<int>& cols) {
  std::ostringstream os;
  os << "matrix has no support: zero block of " << rows.size() << " rows x " << cols.size()
     << " columns";
  return os.str();
}

}  // namespace

NoSupport::NoSupport(std::vector<int> rows, std::vector<int> cols)
    : Error("NoSupport", describe_block(rows, cols)),
      rows_(std::move(rows)),
      cols_(std::move(cols)) {}

NonConvergence::NonConvergence(const std::string& what, double residual, int iterations)
    : Error("NonConvergence", what + " (residual " + std::to_string(residual) + " after " +
                                  std::to_string(iterations) + " iterations)"),
      residual_(residual),
      iterations_(iterations) {}

TauOutOfRange::TauOutOfRange(double tau, double rho)
    : Error("TauOutOfRange", "tau = " + std::to_string(tau) +
                                 " is not below the spectral radius " + std::to_string(rho)) {}

DomainViolation::DomainViolation(const std::string& message, std::size_t index)
    : Error("DomainViolation", message + " (index " + std::to_string(index) + ")"),
      index_(index) {}

}  // namespace dsbm

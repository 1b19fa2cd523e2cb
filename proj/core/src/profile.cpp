#include "dsbm/profile.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "dsbm/errors.hpp"

namespace dsbm {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw InvalidInput(std::string(what) + " must be a nonempty square matrix");
  }
  if (!m.allFinite()) throw InvalidInput(std::string(what) + " has non-finite entries");
}

}  // namespace

VarianceProfile::VarianceProfile(Matrix s, std::optional<Matrix> p)
    : s_(std::move(s)), p_(std::move(p)) {}

VarianceProfile VarianceProfile::from_variances(Matrix s) {
  require_square(s, "variance profile");
  if ((s.array() < 0.0).any()) throw InvalidInput("variance profile has negative entries");
  return VarianceProfile(std::move(s), std::nullopt);
}

VarianceProfile VarianceProfile::from_probabilities(Matrix p) {
  require_square(p, "probability matrix");
  if ((p.array() < 0.0).any() || (p.array() > 1.0).any()) {
    throw InvalidInput("probabilities must lie in [0,1]");
  }
  Matrix s = p.array() * (1.0 - p.array());
  return VarianceProfile(std::move(s), std::move(p));
}

VarianceProfile VarianceProfile::permuted(const std::vector<int>& rows,
                                          const std::vector<int>& cols) const {
  const int k = size();
  if (static_cast<int>(rows.size()) != k || static_cast<int>(cols.size()) != k) {
    throw InvalidInput("permutation size does not match profile");
  }
  auto reindex = [&](const Matrix& m) {
    Matrix out(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) out(i, j) = m(rows[i], cols[j]);
    return out;
  };
  std::optional<Matrix> p;
  if (p_) p = reindex(*p_);
  return VarianceProfile(reindex(s_), std::move(p));
}

}  // namespace dsbm

#pragma once

#include <optional>

#include <Eigen/Dense>

namespace dsbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// K x K nonnegative variance profile S of a directed block model, optionally
// with the connection probabilities P it was derived from (s = p(1-p)).
class VarianceProfile {
 public:
  static VarianceProfile from_variances(Matrix s);
  static VarianceProfile from_probabilities(Matrix p);

  int size() const noexcept { return static_cast<int>(s_.rows()); }
  const Matrix& variances() const noexcept { return s_; }
  const std::optional<Matrix>& probabilities() const noexcept { return p_; }
  double operator()(int i, int j) const { return s_(i, j); }

  // Same profile with rows/columns reindexed: result(i,j) = S(rows[i], cols[j]).
  VarianceProfile permuted(const std::vector<int>& rows, const std::vector<int>& cols) const;

 private:
  VarianceProfile(Matrix s, std::optional<Matrix> p);

  Matrix s_;
  std::optional<Matrix> p_;
};

}  // namespace dsbm

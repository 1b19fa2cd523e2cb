#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "dsbm/profile.hpp"

namespace dsbm {

// Boolean pattern of a square matrix: at(i,j) is true iff the entry is > 0.
class ZeroPattern {
 public:
  explicit ZeroPattern(int k) : k_(k), mask_(static_cast<std::size_t>(k) * k, 0) {}
  static ZeroPattern from_rows(const std::vector<std::vector<int>>& rows);

  int size() const noexcept { return k_; }
  bool at(int i, int j) const { return mask_[index(i, j)] != 0; }
  void set(int i, int j, bool value) { mask_[index(i, j)] = value ? 1 : 0; }
  int count() const;

  friend bool operator==(const ZeroPattern&, const ZeroPattern&) = default;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * k_ + j; }

  int k_;
  std::vector<std::uint8_t> mask_;
};

// Bijection on {0..K-1}. As a matrix, P(i, image[i]) = 1, so (P x)_i = x_{image[i]}.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> image);
  static Permutation identity(int k);

  int size() const noexcept { return static_cast<int>(image_.size()); }
  int operator[](int i) const { return image_[i]; }
  const std::vector<int>& image() const noexcept { return image_; }

  Permutation inverse() const;
  // (this ∘ other)[i] = this[other[i]]
  Permutation compose(const Permutation& other) const;
  Matrix to_matrix() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> image_;
};

// Result of the support test: either a positive diagonal s_{i,pi(i)} > 0, or a
// Frobenius-Koenig zero block with |rows| + |cols| = K + 1.
struct PositiveDiagonal {
  Permutation pi;
};
struct ZeroBlock {
  std::vector<int> rows;
  std::vector<int> cols;
};
using SupportWitness = std::variant<PositiveDiagonal, ZeroBlock>;

// Two-sided normal form S~ = Q1 S Q2^t, i.e. S~(a,b) = S(q1[a], q2[b]);
// block upper triangular with fully indecomposable diagonal blocks that have
// strictly positive main diagonal.
struct NormalForm {
  Permutation q1;
  Permutation q2;
  Matrix s_tilde;
  std::vector<int> block_sizes;
  std::vector<int> block_of;  // position in S~ -> block label

  int blocks() const noexcept { return static_cast<int>(block_sizes.size()); }
  int block_offset(int block) const;
  Matrix block(int l, int k) const;
};

struct PerronPair {
  double rho = 0.0;
  Vector eigenvector;  // positive s with S^t s = rho s, unit 1-norm
  int iterations = 0;
};

ZeroPattern zero_pattern(const VarianceProfile& m);
ZeroPattern zero_pattern(const Matrix& m);

SupportWitness has_support(const ZeroPattern& z);
bool is_irreducible(const ZeroPattern& z);
bool is_fully_indecomposable(const ZeroPattern& z);
bool is_primitive(const ZeroPattern& z);

// Throws NoSupport (with the zero block) when S has no positive diagonal.
NormalForm normal_form(const VarianceProfile& m);

// Perron root of an irreducible S by power iteration on (I + S^t/rho)/2 started
// from the all-ones vector. Throws NotIrreducible or NonConvergence.
PerronPair spectral_radius(const VarianceProfile& m, double rel_tol = 1e-13,
                           int max_iter = 1'000'000);

// Strongly connected components of the digraph i -> j (i != j, at(i,j)).
// Components are indexed in Tarjan order (sinks of the condensation first).
std::vector<int> strong_components(const ZeroPattern& z, int* count = nullptr);

}  // namespace dsbm

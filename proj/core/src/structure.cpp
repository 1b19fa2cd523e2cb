#include "dsbm/structure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "dsbm/errors.hpp"

namespace dsbm {

ZeroPattern ZeroPattern::from_rows(const std::vector<std::vector<int>>& rows) {
  const int k = static_cast<int>(rows.size());
  ZeroPattern z(k);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(rows[i].size()) != k) throw InvalidInput("pattern rows must be square");
    for (int j = 0; j < k; ++j) z.set(i, j, rows[i][j] != 0);
  }
  return z;
}

int ZeroPattern::count() const {
  return static_cast<int>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
  std::vector<char> seen(image_.size(), 0);
  for (int v : image_) {
    if (v < 0 || v >= static_cast<int>(image_.size()) || seen[v]) {
      throw InvalidInput("permutation image is not a bijection");
    }
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int k) {
  std::vector<int> image(k);
  std::iota(image.begin(), image.end(), 0);
  return Permutation(std::move(image));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(image_.size());
  for (int i = 0; i < size(); ++i) inv[image_[i]] = i;
  return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) throw InvalidInput("composing permutations of different size");
  std::vector<int> out(image_.size());
  for (int i = 0; i < size(); ++i) out[i] = image_[other[i]];
  return Permutation(std::move(out));
}

Matrix Permutation::to_matrix() const {
  Matrix p = Matrix::Zero(size(), size());
  for (int i = 0; i < size(); ++i) p(i, image_[i]) = 1.0;
  return p;
}

int NormalForm::block_offset(int block) const {
  return std::accumulate(block_sizes.begin(), block_sizes.begin() + block, 0);
}

Matrix NormalForm::block(int l, int k) const {
  return s_tilde.block(block_offset(l), block_offset(k), block_sizes[l], block_sizes[k]);
}

ZeroPattern zero_pattern(const Matrix& m) {
  const int k = static_cast<int>(m.rows());
  ZeroPattern z(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) z.set(i, j, m(i, j) > 0.0);
  return z;
}

ZeroPattern zero_pattern(const VarianceProfile& m) { return zero_pattern(m.variances()); }

namespace {

constexpr int kUnmatched = -1;

// Hopcroft-Karp on the bipartite graph rows x cols with an edge wherever the
// pattern is true. Rows are scanned in index order, so the result is
// deterministic.
struct Matching {
  std::vector<int> row_to_col;
  std::vector<int> col_to_row;
  int size = 0;
};

Matching maximum_matching(const ZeroPattern& z) {
  const int k = z.size();
  Matching m{std::vector<int>(k, kUnmatched), std::vector<int>(k, kUnmatched), 0};
  std::vector<int> dist(k);
  constexpr int kInf = std::numeric_limits<int>::max();

  auto bfs = [&] {
    std::queue<int> q;
    bool found = false;
    for (int r = 0; r < k; ++r) {
      if (m.row_to_col[r] == kUnmatched) {
        dist[r] = 0;
        q.push(r);
      } else {
        dist[r] = kInf;
      }
    }
    while (!q.empty()) {
      const int r = q.front();
      q.pop();
      for (int c = 0; c < k; ++c) {
        if (!z.at(r, c)) continue;
        const int next = m.col_to_row[c];
        if (next == kUnmatched) {
          found = true;
        } else if (dist[next] == kInf) {
          dist[next] = dist[r] + 1;
          q.push(next);
        }
      }
    }
    return found;
  };

  std::function<bool(int)> dfs = [&](int r) {
    for (int c = 0; c < k; ++c) {
      if (!z.at(r, c)) continue;
      const int next = m.col_to_row[c];
      if (next == kUnmatched || (dist[next] == dist[r] + 1 && dfs(next))) {
        m.row_to_col[r] = c;
        m.col_to_row[c] = r;
        return true;
      }
    }
    dist[r] = kInf;
    return false;
  };

  while (bfs()) {
    for (int r = 0; r < k; ++r) {
      if (m.row_to_col[r] == kUnmatched && dfs(r)) ++m.size;
    }
  }
  return m;
}

// Koenig: rows reachable from unmatched rows by alternating paths, together
// with the columns not reached, span a zero block of size 2K - |matching|.
ZeroBlock koenig_zero_block(const ZeroPattern& z, const Matching& m) {
  const int k = z.size();
  std::vector<char> row_seen(k, 0), col_seen(k, 0);
  std::queue<int> q;
  for (int r = 0; r < k; ++r) {
    if (m.row_to_col[r] == kUnmatched) {
      row_seen[r] = 1;
      q.push(r);
    }
  }
  while (!q.empty()) {
    const int r = q.front();
    q.pop();
    for (int c = 0; c < k; ++c) {
      if (!z.at(r, c) || col_seen[c]) continue;
      col_seen[c] = 1;
      const int next = m.col_to_row[c];
      if (next != kUnmatched && !row_seen[next]) {
        row_seen[next] = 1;
        q.push(next);
      }
    }
  }
  ZeroBlock block;
  for (int r = 0; r < k; ++r)
    if (row_seen[r]) block.rows.push_back(r);
  for (int c = 0; c < k; ++c)
    if (!col_seen[c]) block.cols.push_back(c);
  // Any sub-block of a zero block is zero; trim to exactly K + 1.
  while (static_cast<int>(block.rows.size() + block.cols.size()) > k + 1) {
    if (block.rows.size() >= block.cols.size()) {
      block.rows.pop_back();
    } else {
      block.cols.pop_back();
    }
  }
  return block;
}

}  // namespace

SupportWitness has_support(const ZeroPattern& z) {
  const Matching m = maximum_matching(z);
  if (m.size == z.size()) return PositiveDiagonal{Permutation(m.row_to_col)};
  return koenig_zero_block(z, m);
}

std::vector<int> strong_components(const ZeroPattern& z, int* count) {
  // Iterative Tarjan.
  const int k = z.size();
  std::vector<int> index(k, -1), low(k, 0), comp(k, -1);
  std::vector<char> on_stack(k, 0);
  std::vector<int> stack;
  int next_index = 0;
  int next_comp = 0;

  struct Frame {
    int v;
    int next_child;
  };
  for (int root = 0; root < k; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      const int v = f.v;
      bool descended = false;
      while (f.next_child < k) {
        const int w = f.next_child++;
        if (w == v || !z.at(v, w)) continue;
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = next_comp;
        } while (w != v);
        ++next_comp;
      }
      frames.pop_back();
      if (!frames.empty()) {
        const int parent = frames.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

bool is_irreducible(const ZeroPattern& z) {
  int count = 0;
  strong_components(z, &count);
  return count == 1;
}

bool is_fully_indecomposable(const ZeroPattern& z) {
  const SupportWitness w = has_support(z);
  const auto* diag = std::get_if<PositiveDiagonal>(&w);
  if (!diag) return false;
  // Column j of the permuted pattern is column pi[j] of z.
  const int k = z.size();
  ZeroPattern permuted(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) permuted.set(i, j, z.at(i, diag->pi[j]));
  return is_irreducible(permuted);
}

bool is_primitive(const ZeroPattern& z) {
  const int k = z.size();
  const long bound = static_cast<long>(k - 1) * (k - 1) + 1;
  ZeroPattern power = z;
  for (long step = 1;; ++step) {
    if (power.count() == k * k) return true;
    if (step >= bound) return false;
    ZeroPattern next(k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        bool any = false;
        for (int l = 0; l < k && !any; ++l) any = power.at(i, l) && z.at(l, j);
        next.set(i, j, any);
      }
    if (next == power) return false;
    power = std::move(next);
  }
}

NormalForm normal_form(const VarianceProfile& m) {
  const ZeroPattern z = zero_pattern(m);
  const int k = z.size();
  const SupportWitness witness = has_support(z);
  if (const auto* zero = std::get_if<ZeroBlock>(&witness)) throw NoSupport(zero->rows, zero->cols);
  const Permutation& match = std::get<PositiveDiagonal>(witness).pi;

  // Column-permute to a positive main diagonal: M(i,j) = S(i, match[j]).
  ZeroPattern diag_pattern(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) diag_pattern.set(i, j, z.at(i, match[j]));

  int n_comp = 0;
  const std::vector<int> comp = strong_components(diag_pattern, &n_comp);

  std::vector<std::vector<int>> members(n_comp);
  for (int i = 0; i < k; ++i) members[comp[i]].push_back(i);

  // Condensation edges; order components so every edge goes from an earlier
  // block to a later one. Ties: smallest original index first.
  std::vector<std::vector<char>> adj(n_comp, std::vector<char>(n_comp, 0));
  std::vector<int> indegree(n_comp, 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const int a = comp[i], b = comp[j];
      if (a != b && diag_pattern.at(i, j) && !adj[a][b]) {
        adj[a][b] = 1;
        ++indegree[b];
      }
    }
  using Key = std::pair<int, int>;  // (smallest member, component)
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (int c = 0; c < n_comp; ++c)
    if (indegree[c] == 0) ready.push({members[c].front(), c});

  std::vector<int> order;
  order.reserve(k);
  std::vector<int> block_sizes;
  while (!ready.empty()) {
    const int c = ready.top().second;
    ready.pop();
    order.insert(order.end(), members[c].begin(), members[c].end());
    block_sizes.push_back(static_cast<int>(members[c].size()));
    for (int d = 0; d < n_comp; ++d) {
      if (adj[c][d] && --indegree[d] == 0) ready.push({members[d].front(), d});
    }
  }

  std::vector<int> q2_image(k);
  for (int a = 0; a < k; ++a) q2_image[a] = match[order[a]];

  NormalForm nf{Permutation(order), Permutation(std::move(q2_image)), Matrix(k, k), block_sizes,
                std::vector<int>(k)};
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) nf.s_tilde(a, b) = m(nf.q1[a], nf.q2[b]);
  int pos = 0;
  for (int l = 0; l < static_cast<int>(block_sizes.size()); ++l)
    for (int i = 0; i < block_sizes[l]; ++i) nf.block_of[pos++] = l;
  return nf;
}

PerronPair spectral_radius(const VarianceProfile& m, double rel_tol, int max_iter) {
  if (!is_irreducible(zero_pattern(m))) {
    throw NotIrreducible("spectral radius requires an irreducible profile");
  }
  const Matrix st = m.variances().transpose();
  const int k = m.size();
  Vector x = Vector::Constant(k, 1.0 / k);
  if (k == 1) return {m(0, 0), x, 0};
  double rho = 0.0;
  double defect = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const Vector y = st * x;
    rho = y.sum() / x.sum();
    defect = (y - rho * x).lpNorm<Eigen::Infinity>() / (rho * x.lpNorm<Eigen::Infinity>());
    if (defect <= rel_tol) {
      return {rho, x / x.sum(), it};
    }
    // Averaging with the identity damps the oscillation of periodic S.
    x = 0.5 * (x + y / rho);
    x /= x.sum();
  }
  throw NonConvergence("power iteration for the Perron root", defect, max_iter);
}

}  // namespace dsbm

#include "dsbm/block_graph.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include <json.hpp>

#include "dsbm/errors.hpp"

namespace dsbm {

const char* label_name(Label label) { return label == Label::LHD ? "LHD" : "PREC"; }

const Edge* BlockRelationGraph::find(int from, int to) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{from, to},
                             [](const Edge& e, const std::pair<int, int>& key) {
                               return std::pair{e.from, e.to} < key;
                             });
  if (it == edges.end() || it->from != from || it->to != to) return nullptr;
  return &*it;
}

BlockRelationGraph build_block_graph(const NormalForm& nf) {
  const int k = static_cast<int>(nf.s_tilde.rows());
  const int L = nf.blocks();
  std::map<std::pair<int, int>, Edge> edges;
  auto edge = [&](int l, int m) -> Edge& {
    auto [it, inserted] = edges.try_emplace({l, m});
    if (inserted) {
      it->second.from = l;
      it->second.to = m;
    }
    return it->second;
  };
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const int l = nf.block_of[a], m = nf.block_of[b];
      if (l != m && nf.s_tilde(a, b) > 0.0) edge(l, m).lhd = true;
      // Q = Q1 Q2^t has Q(a,b) = 1 iff q1[a] == q2[b].
      if (nf.q1[a] == nf.q2[b]) edge(l, m).prec = true;
    }
  }
  BlockRelationGraph g{L, {}};
  for (const auto& [key, e] : edges) g.edges.push_back(e);
  return g;
}

bool check_strong_connectivity(const BlockRelationGraph& g) {
  if (g.L <= 1) return g.L == 1;
  ZeroPattern z(g.L);
  for (const Edge& e : g.edges) z.set(e.from, e.to, true);
  return is_irreducible(z);
}

int traversal_cost(const Edge& edge, Label chosen) {
  if (!edge.has(chosen)) {
    throw LabelNotPresent("edge " + std::to_string(edge.from + 1) + "->" +
                          std::to_string(edge.to + 1) + " has no " + label_name(chosen) +
                          " label");
  }
  return chosen == Label::LHD ? 0 : 1;
}

namespace {

Label cheapest(const Edge& e) { return e.lhd ? Label::LHD : Label::PREC; }
int cheapest_cost(const Edge& e) { return traversal_cost(e, cheapest(e)); }

}  // namespace

KappaResult min_cycle_mean(const BlockRelationGraph& g) {
  if (!check_strong_connectivity(g)) {
    throw NotStronglyConnected("block relation graph is not strongly connected");
  }
  const int n = g.L;
  constexpr long kInf = std::numeric_limits<long>::max() / 4;

  // Karp: d[s][v] = cheapest walk with exactly s edges ending at v, starting anywhere.
  std::vector<std::vector<long>> d(n + 1, std::vector<long>(n, kInf));
  std::fill(d[0].begin(), d[0].end(), 0);
  for (int s = 1; s <= n; ++s) {
    for (const Edge& e : g.edges) {
      if (d[s - 1][e.from] == kInf) continue;
      d[s][e.to] = std::min(d[s][e.to], d[s - 1][e.from] + cheapest_cost(e));
    }
  }
  std::optional<Rational> best;
  for (int v = 0; v < n; ++v) {
    if (d[n][v] == kInf) continue;
    std::optional<Rational> worst;
    for (int s = 0; s < n; ++s) {
      if (d[s][v] == kInf) continue;
      const Rational r(d[n][v] - d[s][v], n - s);
      if (!worst || r > *worst) worst = r;
    }
    if (worst && (!best || *worst < *best)) best = worst;
  }
  if (!best) throw NotStronglyConnected("graph has no cycle");
  const Rational kappa = *best;

  // Reweight c' = q c - p: every cycle has c'-weight >= 0 and the optimal ones
  // exactly 0. Bellman-Ford potentials make those cycles consist of tight edges.
  const long p = kappa.num(), q = kappa.den();
  auto reweighted = [&](const Edge& e) { return q * cheapest_cost(e) - p; };
  std::vector<long> pot(n, 0);
  for (int round = 0; round < n; ++round) {
    bool changed = false;
    for (const Edge& e : g.edges) {
      const long cand = pot[e.from] + reweighted(e);
      if (cand < pot[e.to]) {
        pot[e.to] = cand;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<std::vector<const Edge*>> tight(n);
  for (const Edge& e : g.edges) {
    if (pot[e.from] + reweighted(e) == pot[e.to]) tight[e.from].push_back(&e);
  }

  // First cycle found by DFS in index order.
  std::vector<int> state(n, 0);  // 0 new, 1 on path, 2 done
  std::vector<const Edge*> path;
  std::vector<const Edge*> cycle;
  std::function<bool(int)> dfs = [&](int v) {
    state[v] = 1;
    for (const Edge* e : tight[v]) {
      if (state[e->to] == 1) {
        auto start = std::find_if(path.begin(), path.end(),
                                  [&](const Edge* x) { return x->from == e->to; });
        cycle.assign(start, path.end());
        cycle.push_back(e);
        return true;
      }
      if (state[e->to] == 0) {
        path.push_back(e);
        if (dfs(e->to)) return true;
        path.pop_back();
      }
    }
    state[v] = 2;
    return false;
  };
  for (int v = 0; v < n && cycle.empty(); ++v) {
    if (state[v] == 0) dfs(v);
  }
  if (cycle.empty()) throw Error("Internal", "minimum mean cycle witness not found");

  KappaResult result;
  result.kappa = kappa;
  result.c_ns = kappa * Rational(2);
  for (const Edge* e : cycle) {
    const Label label = cheapest(*e);
    result.witness.push_back({e->from, e->to, label});
    result.prec_count += traversal_cost(*e, label);
  }
  result.length = static_cast<int>(cycle.size());
  return result;
}

Rational brute_force_kappa(const BlockRelationGraph& g) {
  if (g.L > 10) throw TooLarge("brute_force_kappa supports at most 10 blocks");
  const int n = g.L;
  std::vector<std::vector<const Edge*>> out(n);
  for (const Edge& e : g.edges) out[e.from].push_back(&e);

  std::optional<Rational> best;
  auto consider = [&](const std::vector<const Edge*>& cycle) {
    std::vector<int> dual;
    int fixed_prec = 0;
    for (int i = 0; i < static_cast<int>(cycle.size()); ++i) {
      if (cycle[i]->lhd && cycle[i]->prec) {
        dual.push_back(i);
      } else {
        fixed_prec += traversal_cost(*cycle[i], cycle[i]->lhd ? Label::LHD : Label::PREC);
      }
    }
    for (unsigned mask = 0; mask < (1u << dual.size()); ++mask) {
      int prec = fixed_prec;
      for (std::size_t b = 0; b < dual.size(); ++b) {
        prec += traversal_cost(*cycle[dual[b]], (mask >> b) & 1u ? Label::PREC : Label::LHD);
      }
      const Rational r(prec, static_cast<long>(cycle.size()));
      if (!best || r < *best) best = r;
    }
  };

  // Simple cycles whose smallest vertex is `start`.
  std::vector<char> on_path(n, 0);
  std::vector<const Edge*> path;
  std::function<void(int, int)> extend = [&](int start, int v) {
    for (const Edge* e : out[v]) {
      if (e->to == start) {
        path.push_back(e);
        consider(path);
        path.pop_back();
      } else if (e->to > start && !on_path[e->to]) {
        on_path[e->to] = 1;
        path.push_back(e);
        extend(start, e->to);
        path.pop_back();
        on_path[e->to] = 0;
      }
    }
  };
  for (int start = 0; start < n; ++start) {
    on_path[start] = 1;
    extend(start, start);
    on_path[start] = 0;
  }
  if (!best) throw NotStronglyConnected("graph has no cycle");
  return *best;
}

KappaResult kappa_of(const VarianceProfile& m) {
  const NormalForm nf = normal_form(m);
  if (!is_irreducible(zero_pattern(m))) {
    throw NotIrreducible("kappa requires an irreducible variance profile");
  }
  return min_cycle_mean(build_block_graph(nf));
}

std::string kappa_to_json(const KappaResult& result) {
  nlohmann::json witness = nlohmann::json::array();
  for (const WitnessStep& s : result.witness) {
    witness.push_back({s.from + 1, s.to + 1, label_name(s.label)});
  }
  const nlohmann::json j = {{"kappa", result.kappa.str()},
                            {"c_ns", result.c_ns.str()},
                            {"witness", witness},
                            {"prec_count", result.prec_count},
                            {"length", result.length}};
  return j.dump();
}

}  // namespace dsbm

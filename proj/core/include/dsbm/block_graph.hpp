#pragma once

#include <string>
#include <vector>

#include "dsbm/profile.hpp"
#include "dsbm/rational.hpp"
#include "dsbm/structure.hpp"

namespace dsbm {

enum class Label { LHD, PREC };
const char* label_name(Label label);

// Edge l -> k between blocks of the normal form. lhd: block S~_lk is nonzero
// (l != k); prec: block Q_lk of Q = Q1 Q2^t is nonzero.
struct Edge {
  int from = 0;
  int to = 0;
  bool lhd = false;
  bool prec = false;

  bool has(Label label) const { return label == Label::LHD ? lhd : prec; }
};

struct BlockRelationGraph {
  int L = 0;
  std::vector<Edge> edges;  // sorted by (from, to), at most one per pair

  const Edge* find(int from, int to) const;
};

struct WitnessStep {
  int from = 0;
  int to = 0;
  Label label = Label::PREC;
};

struct KappaResult {
  Rational kappa;
  Rational c_ns;
  std::vector<WitnessStep> witness;  // closed walk, 0-based block labels
  int prec_count = 0;
  int length = 0;
};

BlockRelationGraph build_block_graph(const NormalForm& nf);
bool check_strong_connectivity(const BlockRelationGraph& g);

// 0 for an LHD traversal, 1 for a PREC traversal. Throws LabelNotPresent.
int traversal_cost(const Edge& edge, Label chosen);

// Minimum over cycles of (#PREC traversals)/(length), every edge taking its
// cheapest label. Karp's algorithm in exact integer arithmetic; the witness is
// a cycle of the tight subgraph after reweighting by the optimum.
// Throws NotStronglyConnected.
KappaResult min_cycle_mean(const BlockRelationGraph& g);

// Exhaustive oracle over simple cycles and all label choices. Throws TooLarge
// for L > 10.
Rational brute_force_kappa(const BlockRelationGraph& g);

// normal_form -> build_block_graph -> min_cycle_mean.
// Throws NoSupport or NotIrreducible.
KappaResult kappa_of(const VarianceProfile& m);

// {"kappa":"p/q","c_ns":"p/q","witness":[[l,k,"LHD"|"PREC"],...],
//  "prec_count":..,"length":..} with 1-based block labels.
std::string kappa_to_json(const KappaResult& result);

}  // namespace dsbm

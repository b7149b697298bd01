#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sbmm/common.hpp"

namespace sbmm {

/// A fixed pattern graph: vertex count, multiplicity per unordered vertex
/// pair and self-loop count per vertex. Immutable after construction.
///
/// Construction rejects isolated vertices and patterns without any edge or
/// self-loop.
class PatternGraph {
 public:
  struct Edge {
    int u;
    int v;
    int multiplicity;
  };

  PatternGraph(int vertex_count, const std::vector<Edge>& edges,
               const std::vector<std::pair<int, int>>& self_loops = {});

  static PatternGraph triangle();
  static PatternGraph cycle(int v);
  static PatternGraph complete(int v);
  static PatternGraph path(int v);
  static PatternGraph complete_multi(int v, int t);
  /// Complete graph on v vertices with the pair {0,1} removed.
  static PatternGraph complete_minus_edge(int v);

  int vertex_count() const { return n_; }
  int multiplicity(int u, int v) const { return mult_[static_cast<std::size_t>(u * n_ + v)]; }
  int self_loops(int w) const { return loops_[static_cast<std::size_t>(w)]; }

  /// Pairs with positive multiplicity, u < v, lexicographic.
  const std::vector<Edge>& edges() const { return edges_; }

  int edge_count() const { return edge_count_; }       // e(G), self-loops excluded
  int pair_count() const { return static_cast<int>(edges_.size()); }  // f(G)
  int max_multiplicity() const { return max_mult_; }   // t(G)
  int pairs_with_multiplicity(int i) const;            // e_i(G)
  int self_loop_count() const { return loop_count_; }  // s(G)
  bool is_simple() const { return max_mult_ <= 1 && loop_count_ == 0; }

  /// Image of the pattern under the vertex relabelling w -> perm[w].
  PatternGraph relabelled(std::span<const int> perm) const;

  friend bool operator==(const PatternGraph& a, const PatternGraph& b) {
    return a.n_ == b.n_ && a.mult_ == b.mult_ && a.loops_ == b.loops_;
  }

 private:
  int n_;
  std::vector<int> mult_;
  std::vector<int> loops_;
  std::vector<Edge> edges_;
  int edge_count_ = 0;
  int max_mult_ = 0;
  int loop_count_ = 0;
};

/// Parses a named shortcut ("triangle", "edge", "cycle:v", "complete:v",
/// "path:v", "complete_minus_edge:v", "complete_multi:v:t") or an inline
/// JSON pattern object.
PatternGraph parse_pattern(std::string_view text);
PatternGraph pattern_from_json(const nlohmann::json& j);
nlohmann::ordered_json pattern_to_json(const PatternGraph& g);

std::uint64_t automorphism_count(const PatternGraph& g);

/// v(G)! / a(G): number of distinct placements of G on a labelled v(G)-set.
std::uint64_t rho(const PatternGraph& g);

/// One vertex map per distinct placement of G on slots {0..v-1};
/// entry [p][w] is the slot that pattern vertex w occupies in placement p.
/// The result has exactly rho(g) entries and is in lexicographic order of
/// the first permutation reaching each placement.
std::vector<std::vector<int>> distinct_placements(const PatternGraph& g);

struct BalancednessProfile {
  Rational density;         // d(G) = e/v
  Rational pseudo_density;  // f/v
  // Minima over proper subgraphs; empty when no subgraph is admissible
  // (e.g. a single edge has no proper subgraph with an edge).
  std::optional<Rational> alpha;
  std::optional<Rational> gamma;
  std::optional<Rational> alpha_m;
  std::optional<Rational> gamma_m;
  bool strictly_balanced = false;
  bool strictly_pseudo_balanced = false;
};

/// Structural quantities of a pattern. Subgraphs H range over proper
/// subgraphs with at least one edge and no isolated vertices; self-loops are
/// ignored throughout. The multigraph quantities alpha_m, gamma_m and the
/// pseudo-balanced flag are evaluated on the multiplicity-1 reduction.
BalancednessProfile balancedness_profile(const PatternGraph& g);

nlohmann::ordered_json profile_to_json(const BalancednessProfile& p);

enum class KappaVariant { simple, multi };

/// kappa(G,i) or kappa_m(G,i) for 1 <= i <= v(G)-1.
Rational kappa(const PatternGraph& g, int i, KappaVariant variant);
Rational kappa(const PatternGraph& g, const BalancednessProfile& profile, int i,
               KappaVariant variant);

}  // namespace sbmm

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sbmm/edge_dist.hpp"
#include "sbmm/pattern.hpp"

namespace sbmm {

/// SBMM(n, pi, f) with the optional degree-corrected rates and the optional
/// per-class self-loop laws of the pseudo-graph extension.
class SbmmSpec {
 public:
  /// `edge_laws` is a full Q x Q table and must be symmetric.
  SbmmSpec(int n, std::vector<double> f, std::vector<std::vector<EdgeCountDistribution>> edge_laws,
           std::optional<std::vector<double>> degree_weights = std::nullopt,
           std::optional<std::vector<EdgeCountDistribution>> self_loop_laws = std::nullopt);

  /// Single-class model with one edge law.
  static SbmmSpec homogeneous(int n, const EdgeCountDistribution& law);

  int n() const { return n_; }
  int classes() const { return static_cast<int>(f_.size()); }
  const std::vector<double>& f() const { return f_; }
  /// Class weights as exact rationals (from "p/q" strings or exact doubles).
  const std::vector<ExactReal>& f_exact() const { return f_exact_; }
  const EdgeCountDistribution& edge_law(int a, int b) const {
    return edge_laws_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }
  bool degree_corrected() const { return degree_weights_.has_value(); }
  const std::vector<double>& degree_weights() const { return *degree_weights_; }
  bool has_self_loops() const { return self_loop_laws_.has_value(); }
  /// The self-loop law of class a; a point mass at zero when the spec has none.
  const EdgeCountDistribution& self_loop_law(int a) const;

  bool all_edge_laws(EdgeCountDistribution::Family family) const;

  SbmmSpec with_n(int n) const;
  SbmmSpec with_exact_f(std::vector<ExactReal> f_exact) const;

 private:
  int n_;
  std::vector<double> f_;
  std::vector<ExactReal> f_exact_;
  std::vector<std::vector<EdgeCountDistribution>> edge_laws_;
  std::optional<std::vector<double>> degree_weights_;
  std::optional<std::vector<EdgeCountDistribution>> self_loop_laws_;
  EdgeCountDistribution no_loops_ = EdgeCountDistribution::zero();
};

SbmmSpec spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json spec_to_json(const SbmmSpec& spec);

/// An observed pseudo-graph on vertices 0..n-1: symmetric pair counts,
/// self-loop counts and optional class labels. Pair counts are stored densely
/// (n(n-1)/2 entries).
class ObservedMultigraph {
 public:
  explicit ObservedMultigraph(int n);

  int n() const { return n_; }
  std::uint32_t edges(int u, int v) const { return counts_[index(u, v)]; }
  void set_edges(int u, int v, std::uint32_t count) { counts_[index(u, v)] = count; }
  void add_edges(int u, int v, std::uint32_t count) { counts_[index(u, v)] += count; }
  std::uint32_t self_loops(int w) const { return loops_[static_cast<std::size_t>(w)]; }
  void set_self_loops(int w, std::uint32_t count) { loops_[static_cast<std::size_t>(w)] = count; }

  const std::vector<int>& classes() const { return classes_; }
  void set_classes(std::vector<int> classes);

  /// Dense row-major n*n matrix of pair counts (zero diagonal).
  std::vector<std::uint32_t> dense_counts() const;

  friend bool operator==(const ObservedMultigraph&, const ObservedMultigraph&) = default;

 private:
  std::size_t index(int u, int v) const;

  int n_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> loops_;
  std::vector<int> classes_;
};

/// Edge-list text: "# n N", optional "# classes c0 c1 ...", then one line
/// "u v count" per pair with a positive count and "w w count" per self-loop.
void write_edge_list(std::ostream& out, const ObservedMultigraph& g);
ObservedMultigraph read_edge_list(std::istream& in);

/// Keyed substream seeds. Each key is folded into the state with the
/// SplitMix64 finaliser: h <- mix(h ^ key_i), starting from h = mix(seed).
/// Streams are domain-tagged so class, pair, self-loop and replicate draws
/// never share a key.
enum class StreamTag : std::uint64_t { vertex_class = 1, pair = 2, self_loop = 3, replicate = 4 };
std::uint64_t mix64(std::uint64_t x);
std::uint64_t substream_seed(std::uint64_t seed, StreamTag tag, std::uint64_t i, std::uint64_t j = 0);

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  std::uint64_t state_;
};

/// Draws classes i.i.d. from f, then every pair count and self-loop count
/// independently. Deterministic in (spec, seed) and independent of
/// iteration order.
ObservedMultigraph sample_graph(const SbmmSpec& spec, std::uint64_t seed);

struct ModelExtrema {
  double mu1_star = 0.0;
  std::vector<double> mu_star;   // [k-1] = max_{a,b} E[Y^k], k = 1..2t
  std::vector<double> mu_dstar;  // [k-1] = max_{a,b} E[C(Y,k)], k = 1..t
  double psi = 0.0;
  std::optional<double> phi_star;
  double q2_star = 0.0;
  std::optional<double> omega_star;
  double inhom_max = 0.0;
};

/// Maxima over class pairs (or classes for phi*) of the edge-law functionals
/// the bounds consume, with t = t(G) taken from the pattern.
ModelExtrema model_extrema(const SbmmSpec& spec, const PatternGraph& pattern);
nlohmann::ordered_json extrema_to_json(const ModelExtrema& m);

}  // namespace sbmm

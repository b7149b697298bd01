#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbmm/common.hpp"
#include "sbmm/model.hpp"
#include "sbmm/pattern.hpp"

namespace sbmm {

/// Counts copies of one pattern. A copy picks a vertex set S, one of the
/// rho(G) distinct placements of G on S, and for every pattern pair with
/// multiplicity i a choice of i of the y observed parallel edges (C(y, i)
/// ways); self-loops likewise. Placements are precomputed once.
class CopyCounter {
 public:
  explicit CopyCounter(const PatternGraph& pattern);

  const PatternGraph& pattern() const { return pattern_; }
  std::size_t placement_count() const { return placements_.size(); }

  /// W: copies in the whole graph. Vertex subsets are scanned in
  /// lexicographic order and abandoned as soon as every placement misses a
  /// required multiplicity.
  BigInt count(const ObservedMultigraph& graph) const;

  /// Copies supported on exactly the v(G) slots of one configuration.
  /// `pair_counts` lists the C(v,2) slot pairs in lexicographic order
  /// (0,1), (0,2), ..., (v-2,v-1); `loop_counts` is empty or has v entries.
  /// Throws std::overflow_error above 2^64.
  std::uint64_t clump(std::span<const std::uint32_t> pair_counts,
                      std::span<const std::uint32_t> loop_counts) const;

 private:
  struct Requirement {
    int a;  // slot, a < b
    int b;
    int multiplicity;
  };
  struct Placement {
    // requirements whose larger slot is s, for s = 0..v-1
    std::vector<std::vector<Requirement>> by_slot;
    std::vector<int> loops;  // per slot
  };

  PatternGraph pattern_;
  std::vector<Placement> placements_;
};

/// W for the pattern in the graph. Requires v(G) <= n.
BigInt count_copies(const ObservedMultigraph& graph, const PatternGraph& pattern);

/// Independent oracle: sums the multiplicity-binomial product over every
/// injective vertex map and divides by a(G). Requires n <= 9.
BigInt count_copies_bruteforce(const ObservedMultigraph& graph, const PatternGraph& pattern);

/// Edge and self-loop counts on one v(G)-vertex set.
struct ClumpConfig {
  std::vector<std::uint32_t> pair_counts;  // C(v,2) entries, lexicographic pairs
  std::vector<std::uint32_t> loop_counts;  // empty or v entries
};

/// Z: copies of the pattern supported on exactly this vertex set.
std::uint64_t clump_size(const ClumpConfig& config, const PatternGraph& pattern);

}  // namespace sbmm

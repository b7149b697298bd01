#include "sbmm/counting.hpp"

#include <limits>

namespace sbmm {

namespace {

constexpr int kBruteforceMaxVertices = 9;

// Running sum that stays in 128 bits until it would overflow.
class Accumulator {
 public:
  void add(std::uint64_t x) {
    if (small_ > std::numeric_limits<unsigned __int128>::max() - x) flush();
    small_ += x;
  }
  void add(const BigInt& x) { big_ += x; }
  BigInt value() const {
    BigInt out = big_;
    out += to_big(small_);
    return out;
  }

 private:
  static BigInt to_big(unsigned __int128 x) {
    BigInt hi = static_cast<std::uint64_t>(x >> 64);
    return (hi << 64) + static_cast<std::uint64_t>(x);
  }
  void flush() {
    big_ += to_big(small_);
    small_ = 0;
  }
  unsigned __int128 small_ = 0;
  BigInt big_ = 0;
};

// Product of binomials in 64 bits when possible, otherwise exact.
class Product {
 public:
  void times(std::uint64_t y, int k) {
    if (k == 0) return;
    if (wide_) {
      big_ *= binomial_big(y, static_cast<std::uint64_t>(k));
      return;
    }
    std::uint64_t c = 0;
    try {
      c = binomial_u64(y, static_cast<std::uint64_t>(k));
    } catch (const std::overflow_error&) {
      widen();
      big_ *= binomial_big(y, static_cast<std::uint64_t>(k));
      return;
    }
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(small_, c, &r)) {
      widen();
      big_ *= c;
    } else {
      small_ = r;
    }
  }
  bool zero() const { return wide_ ? big_ == 0 : small_ == 0; }
  void add_to(Accumulator& acc) const {
    if (wide_) {
      acc.add(big_);
    } else {
      acc.add(small_);
    }
  }

 private:
  void widen() {
    wide_ = true;
    big_ = small_;
  }
  bool wide_ = false;
  std::uint64_t small_ = 1;
  BigInt big_;
};

std::size_t pair_slot_index(int a, int b, int v) {
  // lexicographic index of slot pair (a, b), a < b
  return static_cast<std::size_t>(a * (2 * v - a - 1) / 2 + (b - a - 1));
}

}  // namespace

CopyCounter::CopyCounter(const PatternGraph& pattern) : pattern_(pattern) {
  const int v = pattern.vertex_count();
  for (const auto& perm : distinct_placements(pattern)) {
    Placement p;
    p.by_slot.resize(static_cast<std::size_t>(v));
    p.loops.assign(static_cast<std::size_t>(v), 0);
    for (const auto& e : pattern.edges()) {
      int a = perm[static_cast<std::size_t>(e.u)];
      int b = perm[static_cast<std::size_t>(e.v)];
      if (a > b) std::swap(a, b);
      p.by_slot[static_cast<std::size_t>(b)].push_back({a, b, e.multiplicity});
    }
    for (int w = 0; w < v; ++w) p.loops[static_cast<std::size_t>(perm[static_cast<std::size_t>(w)])] = pattern.self_loops(w);
    placements_.push_back(std::move(p));
  }
}

BigInt CopyCounter::count(const ObservedMultigraph& graph) const {
  const int n = graph.n();
  const int v = pattern_.vertex_count();
  if (v > n) throw precondition_error("pattern has more vertices than the graph");
  const auto dense = graph.dense_counts();
  auto y = [&](int s, int t) { return dense[static_cast<std::size_t>(s) * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)]; };

  std::vector<int> chosen(static_cast<std::size_t>(v));
  std::vector<std::vector<std::uint32_t>> alive(static_cast<std::size_t>(v + 1));
  alive[0].resize(placements_.size());
  for (std::size_t p = 0; p < placements_.size(); ++p) alive[0][p] = static_cast<std::uint32_t>(p);

  Accumulator total;
  auto descend = [&](auto&& self, int depth, int first) -> void {
    if (depth == v) {
      for (auto p : alive[static_cast<std::size_t>(v)]) {
        const auto& pl = placements_[p];
        Product prod;
        for (int s = 0; s < v && !prod.zero(); ++s) {
          for (const auto& r : pl.by_slot[static_cast<std::size_t>(s)])
            prod.times(y(chosen[static_cast<std::size_t>(r.a)], chosen[static_cast<std::size_t>(r.b)]), r.multiplicity);
          prod.times(graph.self_loops(chosen[static_cast<std::size_t>(s)]), pl.loops[static_cast<std::size_t>(s)]);
        }
        if (!prod.zero()) prod.add_to(total);
      }
      return;
    }
    auto& next = alive[static_cast<std::size_t>(depth + 1)];
    for (int x = first; x <= n - (v - depth); ++x) {
      chosen[static_cast<std::size_t>(depth)] = x;
      next.clear();
      for (auto p : alive[static_cast<std::size_t>(depth)]) {
        const auto& pl = placements_[p];
        bool ok = graph.self_loops(x) >= static_cast<std::uint32_t>(pl.loops[static_cast<std::size_t>(depth)]);
        for (const auto& r : pl.by_slot[static_cast<std::size_t>(depth)]) {
          if (!ok) break;
          ok = y(chosen[static_cast<std::size_t>(r.a)], x) >= static_cast<std::uint32_t>(r.multiplicity);
        }
        if (ok) next.push_back(p);
      }
      if (!next.empty()) self(self, depth + 1, x + 1);
    }
  };
  descend(descend, 0, 0);
  return total.value();
}

std::uint64_t CopyCounter::clump(std::span<const std::uint32_t> pair_counts,
                                 std::span<const std::uint32_t> loop_counts) const {
  const int v = pattern_.vertex_count();
  std::uint64_t total = 0;
  for (const auto& pl : placements_) {
    std::uint64_t prod = 1;
    for (int s = 0; s < v && prod != 0; ++s) {
      for (const auto& r : pl.by_slot[static_cast<std::size_t>(s)]) {
        const auto c = binomial_u64(pair_counts[pair_slot_index(r.a, r.b, v)], static_cast<std::uint64_t>(r.multiplicity));
        if (__builtin_mul_overflow(prod, c, &prod)) throw std::overflow_error("clump size exceeds 64 bits");
      }
      const int need = pl.loops[static_cast<std::size_t>(s)];
      if (need > 0) {
        const std::uint64_t have = loop_counts.empty() ? 0 : loop_counts[static_cast<std::size_t>(s)];
        if (__builtin_mul_overflow(prod, binomial_u64(have, static_cast<std::uint64_t>(need)), &prod)) {
          throw std::overflow_error("clump size exceeds 64 bits");
        }
      }
    }
    if (__builtin_add_overflow(total, prod, &total)) throw std::overflow_error("clump size exceeds 64 bits");
  }
  return total;
}

BigInt count_copies(const ObservedMultigraph& graph, const PatternGraph& pattern) {
  return CopyCounter(pattern).count(graph);
}

BigInt count_copies_bruteforce(const ObservedMultigraph& graph, const PatternGraph& pattern) {
  const int n = graph.n();
  const int v = pattern.vertex_count();
  if (n > kBruteforceMaxVertices) throw precondition_error("brute-force counting needs n <= 9");
  if (v > n) throw precondition_error("pattern has more vertices than the graph");

  std::vector<int> image(static_cast<std::size_t>(v));
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  BigInt sum = 0;
  auto extend = [&](auto&& self, int w) -> void {
    if (w == v) {
      BigInt prod = 1;
      for (int a = 0; a < v && prod != 0; ++a) {
        const int ia = image[static_cast<std::size_t>(a)];
        prod *= binomial_big(graph.self_loops(ia), static_cast<std::uint64_t>(pattern.self_loops(a)));
        for (int b = a + 1; b < v; ++b) {
          const int m = pattern.multiplicity(a, b);
          if (m > 0) prod *= binomial_big(graph.edges(ia, image[static_cast<std::size_t>(b)]), static_cast<std::uint64_t>(m));
        }
      }
      sum += prod;
      return;
    }
    for (int x = 0; x < n; ++x) {
      if (used[static_cast<std::size_t>(x)]) continue;
      used[static_cast<std::size_t>(x)] = true;
      image[static_cast<std::size_t>(w)] = x;
      self(self, w + 1);
      used[static_cast<std::size_t>(x)] = false;
    }
  };
  extend(extend, 0);
  const BigInt automorphisms = automorphism_count(pattern);
  if (sum % automorphisms != 0) throw std::logic_error("injective-map total not divisible by a(G)");
  return sum / automorphisms;
}

std::uint64_t clump_size(const ClumpConfig& config, const PatternGraph& pattern) {
  const auto v = static_cast<std::size_t>(pattern.vertex_count());
  if (config.pair_counts.size() != v * (v - 1) / 2) {
    throw precondition_error("clump configuration needs C(v,2) pair counts");
  }
  if (!config.loop_counts.empty() && config.loop_counts.size() != v) {
    throw precondition_error("clump configuration needs v self-loop counts");
  }
  return CopyCounter(pattern).clump(config.pair_counts, config.loop_counts);
}

}  // namespace sbmm

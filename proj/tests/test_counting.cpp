#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "sbmm/counting.hpp"

using namespace sbmm;

namespace {

PatternGraph doubled_triangle() { return PatternGraph(3, {{0, 1, 2}, {1, 2, 1}, {0, 2, 1}}); }
PatternGraph looped_triangle() { return PatternGraph(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}, {{0, 1}}); }

ObservedMultigraph uniform(int n, std::uint32_t y) {
  ObservedMultigraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.set_edges(u, v, y);
  return g;
}

ObservedMultigraph random_graph(std::mt19937_64& gen, int n, int max_mult, bool loops) {
  ObservedMultigraph g(n);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) g.set_edges(u, v, static_cast<std::uint32_t>(gen() % static_cast<std::uint64_t>(max_mult + 1)));
    if (loops) g.set_self_loops(u, static_cast<std::uint32_t>(gen() % 3));
  }
  return g;
}

// classical triangle count of the simple reduction
std::uint64_t triangles(const ObservedMultigraph& g) {
  std::uint64_t t = 0;
  for (int a = 0; a < g.n(); ++a)
    for (int b = a + 1; b < g.n(); ++b)
      for (int c = b + 1; c < g.n(); ++c) t += (g.edges(a, b) > 0 && g.edges(b, c) > 0 && g.edges(a, c) > 0);
  return t;
}

}  // namespace

TEST_CASE("worked examples") {
  ObservedMultigraph g(3);
  g.set_edges(0, 1, 1);
  g.set_edges(1, 2, 3);
  CHECK(count_copies(g, PatternGraph::path(3)) == 3);
  CHECK(count_copies_bruteforce(g, PatternGraph::path(3)) == 3);

  const auto doubled = uniform(3, 2);
  CHECK(count_copies(doubled, PatternGraph::triangle()) == 8);
  CHECK(count_copies(doubled, doubled_triangle()) == 12);
  CHECK(count_copies_bruteforce(doubled, PatternGraph::triangle()) == 8);
  CHECK(count_copies_bruteforce(doubled, doubled_triangle()) == 12);

  // a required multiplicity above every observed count
  CHECK(count_copies(uniform(5, 1), doubled_triangle()) == 0);
  CHECK(count_copies(ObservedMultigraph(6), PatternGraph::cycle(4)) == 0);
  CHECK(count_copies_bruteforce(ObservedMultigraph(6), PatternGraph::cycle(4)) == 0);
  CHECK_THROWS_AS(count_copies(ObservedMultigraph(2), PatternGraph::triangle()), precondition_error);
}

TEST_CASE("clump sizes") {
  CHECK(clump_size({{2, 2, 2}, {}}, PatternGraph::triangle()) == 8);
  CHECK(clump_size({{1, 1, 0}, {}}, PatternGraph::triangle()) == 0);
  CHECK(clump_size({{2, 2, 2}, {}}, doubled_triangle()) == 12);
  CHECK(clump_size({{1, 1, 1}, {}}, PatternGraph::path(3)) == 3);
  CHECK(clump_size({{1, 1, 1}, {2, 0, 0}}, looped_triangle()) == 2);
  CHECK_THROWS_AS(clump_size({{1, 1}, {}}, PatternGraph::triangle()), precondition_error);
  CHECK_THROWS_AS(clump_size({{1, 1, 1}, {1}}, PatternGraph::triangle()), precondition_error);
}

TEST_CASE("counter matches the injective-map oracle") {
  std::mt19937_64 gen(17);
  const std::vector<PatternGraph> patterns = {PatternGraph::triangle(), PatternGraph::path(3), PatternGraph::cycle(4),
                                              doubled_triangle(), looped_triangle(), PatternGraph::complete_minus_edge(4)};
  int cases = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 3 + static_cast<int>(gen() % 5);
    const auto g = random_graph(gen, n, 3, rep % 2 == 0);
    for (const auto& p : patterns) {
      if (p.vertex_count() > n) continue;
      REQUIRE(count_copies(g, p) == count_copies_bruteforce(g, p));
      ++cases;
    }
  }
  CHECK(cases >= 200);
}

TEST_CASE("congruence for doubled edges") {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 30; ++rep) {
    ObservedMultigraph g(7);
    for (int u = 0; u < 7; ++u)
      for (int v = u + 1; v < 7; ++v) g.set_edges(u, v, gen() % 2 ? 2 : 0);
    const BigInt w = count_copies(g, PatternGraph::triangle());
    CHECK(w % 8 == 0);
    CHECK(w == 8 * triangles(g));
  }
}

TEST_CASE("simple graphs match classical counts") {
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = random_graph(gen, 8, 1, false);
    CHECK(count_copies(g, PatternGraph::triangle()) == triangles(g));
  }
}

TEST_CASE("monotone in edges and invariant under relabelling") {
  std::mt19937_64 gen(41);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = random_graph(gen, 6, 2, false);
    const auto p = rep % 2 ? PatternGraph::cycle(4) : doubled_triangle();
    const BigInt before = count_copies(g, p);
    const int u = static_cast<int>(gen() % 5);
    g.add_edges(u, u + 1, 1);
    CHECK(count_copies(g, p) >= before);

    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    ObservedMultigraph h(6);
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b) h.set_edges(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)], g.edges(a, b));
    CHECK(count_copies(h, p) == count_copies(g, p));
  }
}

TEST_CASE("large counts stay exact") {
  // 10 vertices with 10^6 parallel edges each: W = C(10,3) (10^6)^3 overflows 64 bits
  const auto g = uniform(10, 1000000);
  const BigInt expected = BigInt(120) * BigInt(1000000) * BigInt(1000000) * BigInt(1000000);
  CHECK(count_copies(g, PatternGraph::triangle()) == expected);
}

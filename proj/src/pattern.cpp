#include "sbmm/pattern.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <numeric>
#include <set>

namespace sbmm {

namespace {

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw precondition_error("malformed " + std::string(what) + " in pattern shortcut: '" +
                             std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

struct SubgraphMinima {
  std::optional<Rational> alpha;
  std::optional<Rational> gamma;
  bool strictly_balanced = true;
};

// Minima of alpha/gamma over proper subgraphs H (e(H) >= 1, no isolated
// vertices). For a fixed vertex set U both objectives decrease with e(H), so
// the induced subgraph G[U] is the only candidate per U != V. On U = V the
// best proper H drops a single edge, when that keeps every vertex covered.
// With `reduced` every present pair counts once.
SubgraphMinima subgraph_minima(const PatternGraph& g, bool reduced) {
  const int v = g.vertex_count();
  auto weight = [&](const PatternGraph::Edge& e) { return reduced ? 1 : e.multiplicity; };
  std::int64_t total = 0;
  for (const auto& e : g.edges()) total += weight(e);
  const Rational d(total, v);

  SubgraphMinima out;
  auto take_min = [](std::optional<Rational>& slot, const Rational& x) {
    if (!slot || x < *slot) slot = x;
  };

  const std::uint32_t full = (v >= 32) ? 0xffffffffu : ((1u << v) - 1u);
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    std::int64_t w = 0;
    std::uint32_t covered = 0;
    for (const auto& e : g.edges()) {
      const std::uint32_t bu = 1u << e.u;
      const std::uint32_t bv = 1u << e.v;
      if ((mask & bu) && (mask & bv)) {
        w += weight(e);
        covered |= bu | bv;
      }
    }
    if (w == 0 || covered != mask) continue;
    const int vh = std::popcount(mask);
    take_min(out.alpha, Rational(total - w, v - vh));
    take_min(out.gamma, d * vh - w);
    if (Rational(w, vh) >= d) out.strictly_balanced = false;
  }

  std::vector<int> incident(static_cast<std::size_t>(v), 0);
  for (const auto& e : g.edges()) {
    ++incident[static_cast<std::size_t>(e.u)];
    ++incident[static_cast<std::size_t>(e.v)];
  }
  bool spanning_drop = false;
  for (const auto& e : g.edges()) {
    if (!reduced && e.multiplicity >= 2) spanning_drop = true;
    if (incident[static_cast<std::size_t>(e.u)] >= 2 && incident[static_cast<std::size_t>(e.v)] >= 2) {
      spanning_drop = true;
    }
  }
  const bool spans_all = std::all_of(incident.begin(), incident.end(), [](int c) { return c > 0; });
  if (spanning_drop && spans_all && total >= 2) {
    take_min(out.gamma, d * v - (total - 1));
  }
  return out;
}

}  // namespace

PatternGraph::PatternGraph(int vertex_count, const std::vector<Edge>& edges,
                           const std::vector<std::pair<int, int>>& self_loops)
    : n_(vertex_count) {
  if (n_ < 1) throw precondition_error("pattern needs at least one vertex");
  if (n_ > 16) throw precondition_error("pattern vertex count above 16 is not supported");
  mult_.assign(static_cast<std::size_t>(n_ * n_), 0);
  loops_.assign(static_cast<std::size_t>(n_), 0);
  auto check_vertex = [&](int w) {
    if (w < 0 || w >= n_) {
      throw precondition_error("pattern vertex index " + std::to_string(w) + " out of range");
    }
  };
  for (auto e : edges) {
    check_vertex(e.u);
    check_vertex(e.v);
    if (e.u == e.v) throw precondition_error("pattern edge endpoints must differ; use self_loops");
    if (e.multiplicity < 0) throw precondition_error("negative pattern multiplicity");
    if (e.multiplicity == 0) continue;
    if (e.u > e.v) std::swap(e.u, e.v);
    auto& slot = mult_[static_cast<std::size_t>(e.u * n_ + e.v)];
    if (slot != 0) throw precondition_error("pattern pair listed twice");
    slot = e.multiplicity;
    mult_[static_cast<std::size_t>(e.v * n_ + e.u)] = e.multiplicity;
  }
  for (const auto& [w, count] : self_loops) {
    check_vertex(w);
    if (count < 0) throw precondition_error("negative self-loop count");
    if (loops_[static_cast<std::size_t>(w)] != 0 && count != 0) {
      throw precondition_error("self-loop vertex listed twice");
    }
    loops_[static_cast<std::size_t>(w)] = count;
  }
  for (int u = 0; u < n_; ++u) {
    for (int v = u + 1; v < n_; ++v) {
      const int m = multiplicity(u, v);
      if (m > 0) {
        edges_.push_back({u, v, m});
        edge_count_ += m;
        max_mult_ = std::max(max_mult_, m);
      }
    }
    loop_count_ += loops_[static_cast<std::size_t>(u)];
  }
  for (int w = 0; w < n_; ++w) {
    bool touched = loops_[static_cast<std::size_t>(w)] > 0;
    for (int u = 0; u < n_ && !touched; ++u) touched = multiplicity(w, u) > 0;
    if (!touched) throw precondition_error("pattern has an isolated vertex " + std::to_string(w));
  }
}

PatternGraph PatternGraph::triangle() { return complete(3); }

PatternGraph PatternGraph::cycle(int v) {
  if (v < 3) throw precondition_error("cycle needs at least 3 vertices");
  std::vector<Edge> edges;
  for (int i = 0; i < v; ++i) edges.push_back({i, (i + 1) % v, 1});
  return PatternGraph(v, edges);
}

PatternGraph PatternGraph::complete(int v) { return complete_multi(v, 1); }

PatternGraph PatternGraph::path(int v) {
  if (v < 2) throw precondition_error("path needs at least 2 vertices");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < v; ++i) edges.push_back({i, i + 1, 1});
  return PatternGraph(v, edges);
}

PatternGraph PatternGraph::complete_multi(int v, int t) {
  if (v < 2) throw precondition_error("complete graph needs at least 2 vertices");
  if (t < 1) throw precondition_error("complete multigraph needs multiplicity >= 1");
  std::vector<Edge> edges;
  for (int u = 0; u < v; ++u)
    for (int w = u + 1; w < v; ++w) edges.push_back({u, w, t});
  return PatternGraph(v, edges);
}

PatternGraph PatternGraph::complete_minus_edge(int v) {
  if (v < 3) throw precondition_error("complete-minus-edge needs at least 3 vertices");
  std::vector<Edge> edges;
  for (int u = 0; u < v; ++u)
    for (int w = u + 1; w < v; ++w)
      if (!(u == 0 && w == 1)) edges.push_back({u, w, 1});
  return PatternGraph(v, edges);
}

int PatternGraph::pairs_with_multiplicity(int i) const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(),
                                        [i](const Edge& e) { return e.multiplicity == i; }));
}

PatternGraph PatternGraph::relabelled(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != n_) throw precondition_error("relabelling size mismatch");
  std::vector<Edge> edges;
  for (const auto& e : edges_) edges.push_back({perm[e.u], perm[e.v], e.multiplicity});
  std::vector<std::pair<int, int>> loops;
  for (int w = 0; w < n_; ++w)
    if (self_loops(w) > 0) loops.emplace_back(perm[w], self_loops(w));
  return PatternGraph(n_, edges, loops);
}

PatternGraph parse_pattern(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  if (!text.empty() && text.front() == '{') {
    return pattern_from_json(nlohmann::json::parse(text));
  }
  const auto parts = split(text, ':');
  const auto& name = parts[0];
  auto arg = [&](std::size_t k) { return parse_int(parts.at(k), "argument"); };
  if (name == "triangle" && parts.size() == 1) return PatternGraph::triangle();
  if (name == "cycle" && parts.size() == 2) return PatternGraph::cycle(arg(1));
  if (name == "complete" && parts.size() == 2) return PatternGraph::complete(arg(1));
  if (name == "path" && parts.size() == 2) return PatternGraph::path(arg(1));
  if (name == "edge" && parts.size() == 1) return PatternGraph(2, {{0, 1, 1}});
  if (name == "complete_minus_edge" && parts.size() == 2) return PatternGraph::complete_minus_edge(arg(1));
  if (name == "complete_multi" && parts.size() == 3) return PatternGraph::complete_multi(arg(1), arg(2));
  throw precondition_error("unknown pattern '" + std::string(text) + "'");
}

PatternGraph pattern_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_pattern(j.get<std::string>());
  const int n = j.at("vertices").get<int>();
  std::vector<PatternGraph::Edge> edges;
  for (const auto& e : j.value("edges", nlohmann::json::array())) {
    if (!e.is_array() || e.size() != 3) throw precondition_error("pattern edge must be [u, v, multiplicity]");
    edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
  }
  std::vector<std::pair<int, int>> loops;
  for (const auto& s : j.value("self_loops", nlohmann::json::array())) {
    if (!s.is_array() || s.size() != 2) throw precondition_error("self-loop entry must be [w, count]");
    loops.emplace_back(s[0].get<int>(), s[1].get<int>());
  }
  return PatternGraph(n, edges, loops);
}

nlohmann::ordered_json pattern_to_json(const PatternGraph& g) {
  nlohmann::ordered_json j;
  j["vertices"] = g.vertex_count();
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v, e.multiplicity});
  j["edges"] = edges;
  if (g.self_loop_count() > 0) {
    auto loops = nlohmann::ordered_json::array();
    for (int w = 0; w < g.vertex_count(); ++w)
      if (g.self_loops(w) > 0) loops.push_back({w, g.self_loops(w)});
    j["self_loops"] = loops;
  }
  return j;
}

std::uint64_t automorphism_count(const PatternGraph& g) {
  const int n = g.vertex_count();
  // Invariant signature per vertex: (self-loops, sorted incident multiplicities).
  std::vector<std::vector<int>> signature(static_cast<std::size_t>(n));
  for (int w = 0; w < n; ++w) {
    auto& s = signature[static_cast<std::size_t>(w)];
    for (int u = 0; u < n; ++u)
      if (u != w && g.multiplicity(w, u) > 0) s.push_back(g.multiplicity(w, u));
    std::sort(s.begin(), s.end());
    s.push_back(-g.self_loops(w) - 1);
  }

  std::vector<int> image(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::uint64_t count = 0;
  auto extend = [&](auto&& self, int w) -> void {
    if (w == n) {
      ++count;
      return;
    }
    for (int x = 0; x < n; ++x) {
      if (used[static_cast<std::size_t>(x)]) continue;
      if (signature[static_cast<std::size_t>(x)] != signature[static_cast<std::size_t>(w)]) continue;
      bool ok = true;
      for (int u = 0; u < w && ok; ++u) {
        ok = g.multiplicity(w, u) == g.multiplicity(x, image[static_cast<std::size_t>(u)]);
      }
      if (!ok) continue;
      image[static_cast<std::size_t>(w)] = x;
      used[static_cast<std::size_t>(x)] = true;
      self(self, w + 1);
      used[static_cast<std::size_t>(x)] = false;
    }
  };
  extend(extend, 0);
  return count;
}

std::uint64_t rho(const PatternGraph& g) {
  return factorial_u64(g.vertex_count()) / automorphism_count(g);
}

std::vector<std::vector<int>> distinct_placements(const PatternGraph& g) {
  const int n = g.vertex_count();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> out;
  std::vector<int> placed(static_cast<std::size_t>(n * n + n));
  do {
    std::fill(placed.begin(), placed.end(), 0);
    for (const auto& e : g.edges()) {
      int a = perm[static_cast<std::size_t>(e.u)];
      int b = perm[static_cast<std::size_t>(e.v)];
      if (a > b) std::swap(a, b);
      placed[static_cast<std::size_t>(a * n + b)] = e.multiplicity;
    }
    for (int w = 0; w < n; ++w) {
      placed[static_cast<std::size_t>(n * n + perm[static_cast<std::size_t>(w)])] = g.self_loops(w);
    }
    if (seen.insert(placed).second) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

BalancednessProfile balancedness_profile(const PatternGraph& g) {
  if (g.edge_count() == 0) {
    throw precondition_error("balancedness undefined for a pattern without non-loop edges");
  }
  BalancednessProfile p;
  const int v = g.vertex_count();
  p.density = Rational(g.edge_count(), v);
  p.pseudo_density = Rational(g.pair_count(), v);
  const auto simple = subgraph_minima(g, false);
  const auto reduced = subgraph_minima(g, true);
  p.alpha = simple.alpha;
  p.gamma = simple.gamma;
  p.strictly_balanced = simple.strictly_balanced;
  p.alpha_m = reduced.alpha;
  p.gamma_m = reduced.gamma;
  p.strictly_pseudo_balanced = reduced.strictly_balanced;
  return p;
}

nlohmann::ordered_json profile_to_json(const BalancednessProfile& p) {
  auto rational = [](const std::optional<Rational>& r) -> nlohmann::ordered_json {
    if (!r) return nullptr;
    return to_string(*r);
  };
  nlohmann::ordered_json j;
  j["density"] = to_string(p.density);
  j["pseudo_density"] = to_string(p.pseudo_density);
  j["alpha"] = rational(p.alpha);
  j["gamma"] = rational(p.gamma);
  j["alpha_m"] = rational(p.alpha_m);
  j["gamma_m"] = rational(p.gamma_m);
  j["strictly_balanced"] = p.strictly_balanced;
  j["strictly_pseudo_balanced"] = p.strictly_pseudo_balanced;
  return j;
}

Rational kappa(const PatternGraph& g, int i, KappaVariant variant) {
  return kappa(g, balancedness_profile(g), i, variant);
}

Rational kappa(const PatternGraph& g, const BalancednessProfile& profile, int i,
               KappaVariant variant) {
  const int v = g.vertex_count();
  if (i < 1 || i > v - 1) {
    throw precondition_error("kappa index " + std::to_string(i) + " outside [1, " +
                             std::to_string(v - 1) + "]");
  }
  const bool simple = variant == KappaVariant::simple;
  if (simple && !g.is_simple()) {
    throw precondition_error("simple kappa requires a pattern without multi-edges or self-loops");
  }
  const auto& alpha = simple ? profile.alpha : profile.alpha_m;
  const auto& gamma = simple ? profile.gamma : profile.gamma_m;
  const Rational density = simple ? profile.density : profile.pseudo_density;
  if (!alpha || !gamma) {
    throw precondition_error("kappa undefined: pattern has no admissible proper subgraph");
  }
  const Rational first = Rational(g.edge_count()) - density * i + *gamma;
  const Rational second = *alpha * (v - i);
  return std::max(first, second);
}

}  // namespace sbmm

#include "sbmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace sbmm {

namespace {

constexpr double kWeightTolerance = 1e-12;

std::vector<ExactReal> parse_weights(const nlohmann::json& arr, std::vector<double>& as_double) {
  if (!arr.is_array()) throw precondition_error("class weights 'f' must be an array");
  const bool all_strings = std::all_of(arr.begin(), arr.end(), [](const auto& x) { return x.is_string(); });
  std::vector<ExactReal> exact;
  for (const auto& x : arr) {
    if (x.is_string()) {
      exact.push_back(parse_exact(x.get<std::string>()));
      as_double.push_back(to_double(exact.back()));
    } else {
      as_double.push_back(x.get<double>());
      exact.push_back(exact_from_double(as_double.back()));
    }
  }
  if (all_strings) {
    ExactReal total = 0;
    for (const auto& x : exact) total += x;
    if (total != 1) throw precondition_error("exact class weights must sum to exactly 1");
  }
  return exact;
}

}  // namespace

SbmmSpec::SbmmSpec(int n, std::vector<double> f, std::vector<std::vector<EdgeCountDistribution>> edge_laws,
                   std::optional<std::vector<double>> degree_weights,
                   std::optional<std::vector<EdgeCountDistribution>> self_loop_laws)
    : n_(n),
      f_(std::move(f)),
      edge_laws_(std::move(edge_laws)),
      degree_weights_(std::move(degree_weights)),
      self_loop_laws_(std::move(self_loop_laws)) {
  if (n_ < 1) throw precondition_error("model needs n >= 1");
  const auto q = f_.size();
  if (q == 0) throw precondition_error("model needs at least one class");
  double total = 0.0;
  for (double x : f_) {
    if (!(x > 0.0)) throw precondition_error("class weights must be strictly positive");
    total += x;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) throw precondition_error("class weights must sum to 1");
  for (double x : f_) f_exact_.push_back(exact_from_double(x));

  if (edge_laws_.size() != q) throw precondition_error("edge_laws must be a Q x Q table");
  for (const auto& row : edge_laws_)
    if (row.size() != q) throw precondition_error("edge_laws must be a Q x Q table");
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = a + 1; b < q; ++b)
      if (!(edge_laws_[a][b] == edge_laws_[b][a])) throw precondition_error("edge_laws must be symmetric");

  if (degree_weights_) {
    if (degree_weights_->size() != static_cast<std::size_t>(n_)) {
      throw precondition_error("degree_weights must have one entry per vertex");
    }
    for (double w : *degree_weights_)
      if (!(w > 0.0) || !std::isfinite(w)) throw precondition_error("degree weights must be positive");
    if (!all_edge_laws(EdgeCountDistribution::Family::poisson)) {
      throw precondition_error("degree correction requires Poisson edge laws");
    }
  }
  if (self_loop_laws_ && self_loop_laws_->size() != q) {
    throw precondition_error("self_loop_laws must have one law per class");
  }
}

SbmmSpec SbmmSpec::homogeneous(int n, const EdgeCountDistribution& law) {
  return SbmmSpec(n, {1.0}, {{law}});
}

const EdgeCountDistribution& SbmmSpec::self_loop_law(int a) const {
  if (!self_loop_laws_) return no_loops_;
  return (*self_loop_laws_)[static_cast<std::size_t>(a)];
}

bool SbmmSpec::all_edge_laws(EdgeCountDistribution::Family family) const {
  for (const auto& row : edge_laws_)
    for (const auto& law : row)
      if (law.family() != family) return false;
  return true;
}

SbmmSpec SbmmSpec::with_n(int n) const {
  if (degree_weights_) throw precondition_error("cannot resize a degree-corrected model");
  SbmmSpec copy = *this;
  if (n < 1) throw precondition_error("model needs n >= 1");
  copy.n_ = n;
  return copy;
}

SbmmSpec SbmmSpec::with_exact_f(std::vector<ExactReal> f_exact) const {
  if (f_exact.size() != f_.size()) throw precondition_error("exact class weights size mismatch");
  SbmmSpec copy = *this;
  copy.f_exact_ = std::move(f_exact);
  return copy;
}

SbmmSpec spec_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  std::vector<double> f;
  std::vector<ExactReal> f_exact;
  int q = 1;
  if (j.contains("f")) {
    f_exact = parse_weights(j.at("f"), f);
    q = static_cast<int>(f.size());
  } else {
    f = {1.0};
    f_exact = {ExactReal(1)};
  }
  if (j.contains("Q") && j.at("Q").get<int>() != q) throw precondition_error("Q does not match the length of f");

  std::vector<std::vector<EdgeCountDistribution>> laws;
  const auto& laws_json = j.at("edge_laws");
  if (laws_json.is_object()) {
    const auto law = distribution_from_json(laws_json);
    laws.assign(static_cast<std::size_t>(q), std::vector<EdgeCountDistribution>(static_cast<std::size_t>(q), law));
  } else {
    for (const auto& row : laws_json) {
      std::vector<EdgeCountDistribution> r;
      for (const auto& law : row) r.push_back(distribution_from_json(law));
      laws.push_back(std::move(r));
    }
  }

  std::optional<std::vector<double>> weights;
  if (j.contains("degree_weights") && !j.at("degree_weights").is_null()) {
    weights = j.at("degree_weights").get<std::vector<double>>();
  }
  std::optional<std::vector<EdgeCountDistribution>> loops;
  if (j.contains("self_loop_laws") && !j.at("self_loop_laws").is_null()) {
    std::vector<EdgeCountDistribution> l;
    for (const auto& law : j.at("self_loop_laws")) l.push_back(distribution_from_json(law));
    loops = std::move(l);
  }
  return SbmmSpec(n, f, std::move(laws), std::move(weights), std::move(loops)).with_exact_f(std::move(f_exact));
}

nlohmann::ordered_json spec_to_json(const SbmmSpec& spec) {
  nlohmann::ordered_json j;
  j["n"] = spec.n();
  j["Q"] = spec.classes();
  j["f"] = spec.f();
  auto laws = nlohmann::ordered_json::array();
  for (int a = 0; a < spec.classes(); ++a) {
    auto row = nlohmann::ordered_json::array();
    for (int b = 0; b < spec.classes(); ++b) row.push_back(distribution_to_json(spec.edge_law(a, b)));
    laws.push_back(row);
  }
  j["edge_laws"] = laws;
  if (spec.degree_corrected()) j["degree_weights"] = spec.degree_weights();
  if (spec.has_self_loops()) {
    auto loops = nlohmann::ordered_json::array();
    for (int a = 0; a < spec.classes(); ++a) loops.push_back(distribution_to_json(spec.self_loop_law(a)));
    j["self_loop_laws"] = loops;
  }
  return j;
}

ObservedMultigraph::ObservedMultigraph(int n) : n_(n) {
  if (n < 0) throw precondition_error("graph vertex count must be nonnegative");
  const auto nn = static_cast<std::size_t>(n);
  counts_.assign(nn * (nn > 0 ? nn - 1 : 0) / 2, 0);
  loops_.assign(nn, 0);
}

std::size_t ObservedMultigraph::index(int u, int v) const {
  if (u == v || u < 0 || v < 0 || u >= n_ || v >= n_) {
    throw precondition_error("invalid vertex pair (" + std::to_string(u) + ", " + std::to_string(v) + ")");
  }
  if (u > v) std::swap(u, v);
  const auto uu = static_cast<std::size_t>(u);
  const auto nn = static_cast<std::size_t>(n_);
  // row-major upper triangle
  return uu * (2 * nn - uu - 1) / 2 + static_cast<std::size_t>(v - u - 1);
}

void ObservedMultigraph::set_classes(std::vector<int> classes) {
  if (!classes.empty() && classes.size() != static_cast<std::size_t>(n_)) {
    throw precondition_error("class labels must cover every vertex");
  }
  classes_ = std::move(classes);
}

std::vector<std::uint32_t> ObservedMultigraph::dense_counts() const {
  const auto nn = static_cast<std::size_t>(n_);
  std::vector<std::uint32_t> dense(nn * nn, 0);
  std::size_t k = 0;
  for (std::size_t u = 0; u < nn; ++u)
    for (std::size_t v = u + 1; v < nn; ++v, ++k) {
      dense[u * nn + v] = counts_[k];
      dense[v * nn + u] = counts_[k];
    }
  return dense;
}

void write_edge_list(std::ostream& out, const ObservedMultigraph& g) {
  out << "# n " << g.n() << '\n';
  if (!g.classes().empty()) {
    out << "# classes";
    for (int c : g.classes()) out << ' ' << c;
    out << '\n';
  }
  for (int u = 0; u < g.n(); ++u) {
    if (g.self_loops(u) > 0) out << u << ' ' << u << ' ' << g.self_loops(u) << '\n';
    for (int v = u + 1; v < g.n(); ++v)
      if (g.edges(u, v) > 0) out << u << ' ' << v << ' ' << g.edges(u, v) << '\n';
  }
}

ObservedMultigraph read_edge_list(std::istream& in) {
  struct Entry {
    int u, v;
    std::uint64_t count;
  };
  std::vector<Entry> entries;
  std::vector<int> classes;
  int n = 0;
  std::optional<int> declared_n;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first.front() == '#') {
      std::string key = first.size() > 1 ? first.substr(1) : std::string();
      if (key.empty()) ls >> key;
      if (key == "n") {
        int declared = 0;
        if (ls >> declared) {
          n = std::max(n, declared);
          declared_n = declared;
        }
      } else if (key == "classes") {
        int c = 0;
        while (ls >> c) classes.push_back(c);
      }
      continue;
    }
    Entry e{};
    std::istringstream full(line);
    if (!(full >> e.u >> e.v >> e.count) || e.u < 0 || e.v < 0) {
      throw std::runtime_error("malformed edge-list line " + std::to_string(line_no) + ": '" + line + "'");
    }
    if (declared_n && std::max(e.u, e.v) >= *declared_n) {
      throw std::runtime_error("vertex out of range on edge-list line " + std::to_string(line_no));
    }
    entries.push_back(e);
    n = std::max({n, e.u + 1, e.v + 1});
  }
  if (!classes.empty()) n = std::max(n, static_cast<int>(classes.size()));
  ObservedMultigraph g(n);
  for (const auto& e : entries) {
    if (e.u == e.v) {
      g.set_self_loops(e.u, g.self_loops(e.u) + static_cast<std::uint32_t>(e.count));
    } else {
      g.add_edges(e.u, e.v, static_cast<std::uint32_t>(e.count));
    }
  }
  if (!classes.empty()) {
    classes.resize(static_cast<std::size_t>(n), 0);
    g.set_classes(std::move(classes));
  }
  return g;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, StreamTag tag, std::uint64_t i, std::uint64_t j) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  h = mix64(h ^ i);
  return mix64(h ^ j);
}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ObservedMultigraph sample_graph(const SbmmSpec& spec, std::uint64_t seed) {
  const int n = spec.n();
  ObservedMultigraph g(n);
  std::vector<double> cdf(spec.f().size());
  std::partial_sum(spec.f().begin(), spec.f().end(), cdf.begin());

  std::vector<int> classes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    SplitMix64 gen(substream_seed(seed, StreamTag::vertex_class, static_cast<std::uint64_t>(i)));
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    int c = 0;
    while (c + 1 < static_cast<int>(cdf.size()) && u >= cdf[static_cast<std::size_t>(c)]) ++c;
    classes[static_cast<std::size_t>(i)] = c;
  }

  for (int i = 0; i < n; ++i) {
    const int ci = classes[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) {
      const int cj = classes[static_cast<std::size_t>(j)];
      SplitMix64 gen(substream_seed(seed, StreamTag::pair, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)));
      const auto& law = spec.edge_law(ci, cj);
      int count = 0;
      if (spec.degree_corrected()) {
        const auto& theta = spec.degree_weights();
        const double rate = theta[static_cast<std::size_t>(i)] * theta[static_cast<std::size_t>(j)] * law.parameter();
        count = EdgeCountDistribution::poisson(rate).sample(gen);
      } else {
        count = law.sample(gen);
      }
      if (count > 0) g.set_edges(i, j, static_cast<std::uint32_t>(count));
    }
    if (spec.has_self_loops()) {
      SplitMix64 gen(substream_seed(seed, StreamTag::self_loop, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(i)));
      g.set_self_loops(i, static_cast<std::uint32_t>(spec.self_loop_law(ci).sample(gen)));
    }
  }
  g.set_classes(std::move(classes));
  return g;
}

ModelExtrema model_extrema(const SbmmSpec& spec, const PatternGraph& pattern) {
  const int t = std::max(1, pattern.max_multiplicity());
  const int q = spec.classes();
  ModelExtrema m;
  m.mu_star.assign(static_cast<std::size_t>(2 * t), 0.0);
  m.mu_dstar.assign(static_cast<std::size_t>(t), 0.0);
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      const auto& law = spec.edge_law(a, b);
      m.mu1_star = std::max(m.mu1_star, law.moment(1));
      for (int k = 1; k <= 2 * t; ++k) {
        auto& slot = m.mu_star[static_cast<std::size_t>(k - 1)];
        slot = std::max(slot, law.moment(k));
      }
      for (int k = 1; k <= t; ++k) {
        auto& slot = m.mu_dstar[static_cast<std::size_t>(k - 1)];
        slot = std::max(slot, law.binomial_moment(k));
      }
      m.q2_star = std::max(m.q2_star, law.tail(2));
    }
  }
  m.psi = 2.0 * m.mu_star.back();
  for (double x : m.mu_dstar) m.psi = std::max(m.psi, x);

  if (spec.has_self_loops()) {
    double phi = 0.0;
    for (int a = 0; a < q; ++a) phi = std::max(phi, spec.self_loop_law(a).mean());
    m.phi_star = phi;
  }
  if (spec.all_edge_laws(EdgeCountDistribution::Family::poisson)) {
    double omega = 0.0;
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) omega = std::max(omega, spec.edge_law(a, b).parameter());
    m.omega_star = omega;
  }
  if (spec.degree_corrected()) {
    // any two distinct vertices can carry any pair of classes, so the maximum
    // over (a, b, i, j) is the product of the two largest weights times omega*
    auto theta = spec.degree_weights();
    std::sort(theta.begin(), theta.end(), std::greater<>());
    const double top_pair = theta.size() >= 2 ? theta[0] * theta[1] : 0.0;
    m.inhom_max = top_pair * m.omega_star.value_or(0.0);
  } else {
    m.inhom_max = m.mu1_star;
  }
  return m;
}

nlohmann::ordered_json extrema_to_json(const ModelExtrema& m) {
  nlohmann::ordered_json j;
  j["mu1_star"] = m.mu1_star;
  j["mu_star"] = m.mu_star;
  j["mu_dstar"] = m.mu_dstar;
  j["psi"] = m.psi;
  j["phi_star"] = m.phi_star ? nlohmann::ordered_json(*m.phi_star) : nlohmann::ordered_json(nullptr);
  j["q2_star"] = m.q2_star;
  j["omega_star"] = m.omega_star ? nlohmann::ordered_json(*m.omega_star) : nlohmann::ordered_json(nullptr);
  j["inhom_max"] = m.inhom_max;
  return j;
}

}  // namespace sbmm

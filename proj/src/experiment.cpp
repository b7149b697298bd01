#include "sbmm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "sbmm/counting.hpp"

namespace sbmm {

namespace {

constexpr double kExactLimit = 1e8;
constexpr double kReferenceAtomFloor = 1e-12;

std::uint64_t to_u64(const BigInt& w) {
  if (w > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("copy count exceeds 64 bits");
  return static_cast<std::uint64_t>(w);
}

double total_mass(const Pmf& p) {
  double s = 0.0;
  for (const auto& [k, x] : p) {
    if (x < 0.0) throw precondition_error("pmf has negative mass at " + std::to_string(k));
    s += x;
  }
  return s;
}

}  // namespace

Pmf exact_count_pmf(const SbmmSpec& spec, const PatternGraph& pattern) {
  if (spec.degree_corrected()) throw precondition_error("exact law needs a spec without degree correction");
  const int n = spec.n();
  const int q = spec.classes();
  int max_support = 0;
  int max_loop_support = 0;
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      const auto& law = spec.edge_law(a, b);
      if (!law.support_max()) throw precondition_error("exact law needs finite-support edge laws");
      max_support = std::max(max_support, *law.support_max());
    }
    const auto& loop = spec.self_loop_law(a);
    if (!loop.support_max()) throw precondition_error("exact law needs finite-support self-loop laws");
    max_loop_support = std::max(max_loop_support, *loop.support_max());
  }
  const int pairs = n * (n - 1) / 2;
  const double size = std::pow(q, n) * std::pow(max_support + 1, pairs) * std::pow(max_loop_support + 1, n);
  if (size > kExactLimit) {
    throw infeasible_error("exact enumeration needs " + std::to_string(size) + " configurations (limit 1e8)");
  }

  const CopyCounter counter(pattern);
  if (pattern.vertex_count() > n) return Pmf{{0, 1.0}};

  // W does not depend on the classes, so each configuration carries the
  // class-mixed probability; enumeration is class assignment outer.
  std::vector<std::pair<int, int>> coords;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) coords.emplace_back(u, v);
  const bool loops = spec.has_self_loops();
  if (loops)
    for (int w = 0; w < n; ++w) coords.emplace_back(w, w);

  Pmf out;
  ObservedMultigraph g(n);
  std::vector<int> cls(static_cast<std::size_t>(n), 0);
  while (true) {
    double weight = 1.0;
    for (int c : cls) weight *= spec.f()[static_cast<std::size_t>(c)];
    if (weight > 0.0) {
      auto descend = [&](auto&& self, std::size_t depth, double prob) -> void {
        if (depth == coords.size()) {
          out[to_u64(counter.count(g))] += prob;
          return;
        }
        const auto [u, v] = coords[depth];
        const auto& law = u == v ? spec.self_loop_law(cls[static_cast<std::size_t>(u)])
                                 : spec.edge_law(cls[static_cast<std::size_t>(u)], cls[static_cast<std::size_t>(v)]);
        for (int k = 0; k <= *law.support_max(); ++k) {
          const double p = law.pmf(k);
          if (p == 0.0) continue;
          if (u == v) {
            g.set_self_loops(u, static_cast<std::uint32_t>(k));
          } else {
            g.set_edges(u, v, static_cast<std::uint32_t>(k));
          }
          self(self, depth + 1, prob * p);
        }
        if (u == v) {
          g.set_self_loops(u, 0);
        } else {
          g.set_edges(u, v, 0);
        }
      };
      descend(descend, 0, weight);
    }
    int k = n - 1;
    while (k >= 0 && ++cls[static_cast<std::size_t>(k)] == q) cls[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
  }
  return out;
}

Pmf MonteCarloResult::pmf() const {
  Pmf p;
  for (const auto& [k, c] : histogram) p[k] = static_cast<double>(c) / static_cast<double>(reps);
  return p;
}

MonteCarloResult monte_carlo_pmf(const SbmmSpec& spec, const PatternGraph& pattern, std::uint64_t reps,
                                 std::uint64_t seed, int threads) {
  if (reps == 0) throw precondition_error("Monte Carlo needs reps >= 1");
  const CopyCounter counter(pattern);
  const bool fits = pattern.vertex_count() <= spec.n();
  const auto workers = static_cast<std::uint64_t>(std::clamp<std::uint64_t>(threads < 1 ? 1 : static_cast<std::uint64_t>(threads), 1, reps));

  std::vector<std::map<std::uint64_t, std::uint64_t>> partial(workers);
  auto run_block = [&](std::uint64_t w) {
    const std::uint64_t begin = reps * w / workers;
    const std::uint64_t end = reps * (w + 1) / workers;
    auto& hist = partial[w];
    for (std::uint64_t r = begin; r < end; ++r) {
      const auto g = sample_graph(spec, substream_seed(seed, StreamTag::replicate, r));
      ++hist[fits ? to_u64(counter.count(g)) : 0];
    }
  };
  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(run_block, w);
    for (auto& t : pool) t.join();
  }

  MonteCarloResult out;
  out.reps = reps;
  for (const auto& h : partial)
    for (const auto& [k, c] : h) out.histogram[k] += c;
  return out;
}

double tv_distance(const Pmf& p, const Pmf& q) {
  const double deficit_p = std::max(0.0, 1.0 - total_mass(p));
  const double deficit_q = std::max(0.0, 1.0 - total_mass(q));
  double s = 0.0;
  auto ip = p.begin();
  auto iq = q.begin();
  while (ip != p.end() || iq != q.end()) {
    if (iq == q.end() || (ip != p.end() && ip->first < iq->first)) {
      s += ip->second;
      ++ip;
    } else if (ip == p.end() || iq->first < ip->first) {
      s += iq->second;
      ++iq;
    } else {
      s += std::abs(ip->second - iq->second);
      ++ip;
      ++iq;
    }
  }
  return std::min(1.0, 0.5 * s + 0.5 * std::abs(deficit_p - deficit_q));
}

double mc_allowance(const Pmf& empirical, const Pmf& reference, std::uint64_t reps) {
  if (reps == 0) throw precondition_error("allowance needs reps >= 1");
  std::size_t atoms = empirical.size();
  for (const auto& [k, x] : reference)
    if (x >= kReferenceAtomFloor && !empirical.contains(k)) ++atoms;
  return std::sqrt(static_cast<double>(atoms + 1) / (4.0 * static_cast<double>(reps)));
}

Pmf pmf_from_vector(const std::vector<double>& p) {
  Pmf out;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] != 0.0) out[k] = p[k];
  return out;
}

std::string pmf_to_csv(const Pmf& p) {
  std::string out = "k,prob\n";
  char buf[64];
  for (const auto& [k, x] : p) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g\n", static_cast<unsigned long long>(k), x);
    out += buf;
  }
  return out;
}

nlohmann::ordered_json pmf_to_json(const Pmf& p) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& [k, x] : p) j.push_back({k, x});
  return j;
}

nlohmann::ordered_json run_experiment(const nlohmann::json& config, int threads) {
  const SbmmSpec spec = spec_from_json(config.at("spec"));
  const auto& pj = config.at("pattern");
  const PatternGraph pattern = pj.is_string() ? parse_pattern(pj.get<std::string>()) : pattern_from_json(pj);
  const BoundVariant variant = parse_bound_variant(config.at("variant").get<std::string>());
  const std::string mode = config.value("mode", std::string("exact"));
  if (mode != "exact" && mode != "monte_carlo") throw precondition_error("mode must be 'exact' or 'monte_carlo'");
  if (spec.degree_corrected()) throw precondition_error("experiments need the reference law, which is not computable under degree correction");

  BoundOptions options;
  options.eps = config.value("eps", 1e-10);
  if (config.contains("c_override") && !config["c_override"].is_null()) options.c_override = config["c_override"].get<double>();
  if (config.contains("regime_lower")) options.regime_lower = config["regime_lower"].get<double>();
  if (config.contains("regime_upper")) options.regime_upper = config["regime_upper"].get<double>();

  nlohmann::ordered_json report;
  report["variant"] = bound_variant_name(variant);
  report["mode"] = mode;
  report["pattern"] = pattern_to_json(pattern);
  report["spec"] = spec_to_json(spec);
  report["profile"] = profile_to_json(balancedness_profile(pattern));
  report["extrema"] = extrema_to_json(model_extrema(spec, pattern));
  const double nu = expected_count(spec, pattern);
  report["nu"] = nu;

  const auto params = lambda_params(spec, pattern, options.eps);
  report["lambda"] = params_to_json(params);
  const BoundReport bound = tv_bound(spec, pattern, variant, options);
  report["bound"] = report_to_json(bound);

  Pmf observed;
  std::uint64_t reps = 0;
  if (mode == "exact") {
    observed = exact_count_pmf(spec, pattern);
  } else {
    reps = config.value("reps", std::uint64_t{10000});
    const auto seed = config.value("seed", std::uint64_t{0});
    const auto mc = monte_carlo_pmf(spec, pattern, reps, seed, threads);
    observed = mc.pmf();
    auto hist = nlohmann::ordered_json::array();
    for (const auto& [k, c] : mc.histogram) hist.push_back({k, c});
    report["reps"] = reps;
    report["seed"] = seed;
    report["histogram"] = hist;
  }

  // the Poisson forms compare against Po(nu), the rest against CP(lambda)
  const bool poisson_reference =
      variant == BoundVariant::thm52_poisson_approx || variant == BoundVariant::cor55_poisson_sbm;
  CompoundPoissonParams reference = params;
  if (poisson_reference) {
    reference = CompoundPoissonParams{};
    reference.lambda = {nu};
    reference.imax = 1;
    reference.total = nu;
  }
  std::uint64_t kmax = observed.empty() ? 0 : observed.rbegin()->first;
  kmax = std::max<std::uint64_t>(kmax, config.value("kmax", std::uint64_t{0}));
  const Pmf reference_pmf = pmf_from_vector(cp_pmf(reference, static_cast<int>(kmax)));

  const double d_tv = tv_distance(observed, reference_pmf);
  const double allowance = mode == "exact" ? 0.0 : mc_allowance(observed, reference_pmf, reps);
  report["reference"] = poisson_reference ? "poisson" : "compound_poisson";
  report["reference_pmf"] = pmf_to_json(reference_pmf);
  report["observed_pmf"] = pmf_to_json(observed);
  report["d_tv"] = d_tv;
  report["mc_allowance"] = allowance;
  report["pass"] = d_tv <= bound.value + allowance;

  std::uint64_t support_gcd = 0;
  for (const auto& [k, x] : observed)
    if (x > 0.0) support_gcd = std::gcd(support_gcd, k);
  std::uint64_t lambda_gcd = 0;
  for (std::size_t i = 0; i < params.lambda.size(); ++i)
    if (params.lambda[i] > 0.0) lambda_gcd = std::gcd(lambda_gcd, static_cast<std::uint64_t>(i + 1));
  report["support_gcd"] = support_gcd;
  report["lambda_index_gcd"] = lambda_gcd;
  report["congruence_holds"] = lambda_gcd == 0 ? support_gcd == 0 : support_gcd % lambda_gcd == 0;
  return report;
}

}  // namespace sbmm

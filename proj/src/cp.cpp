#include "sbmm/cp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/special_functions/gamma.hpp>

#include "sbmm/counting.hpp"

namespace sbmm {

namespace {

constexpr double kEnumerationLimit = 1e8;

void require_plain(const SbmmSpec& spec, const char* what) {
  if (spec.degree_corrected()) {
    throw precondition_error(std::string(what) + " is not defined for degree-corrected specs");
  }
}

void require_fits(const SbmmSpec& spec, const PatternGraph& pattern) {
  if (pattern.vertex_count() > spec.n()) throw precondition_error("pattern has more vertices than the model");
}

std::size_t slot_pair(int a, int b, int v) {
  return static_cast<std::size_t>(a * (2 * v - a - 1) / 2 + (b - a - 1));
}

// Arithmetic used by the templated enumerations.
struct DoubleArith {
  using Real = double;
  static double weight(const SbmmSpec& s, int c) { return s.f()[static_cast<std::size_t>(c)]; }
  static double binomial_moment(const EdgeCountDistribution& law, int m) { return law.binomial_moment(m); }
};

struct ExactArith {
  using Real = ExactReal;
  static ExactReal weight(const SbmmSpec& s, int c) { return s.f_exact()[static_cast<std::size_t>(c)]; }
  static ExactReal binomial_moment(const EdgeCountDistribution& law, int m) {
    if (!law.has_exact()) throw precondition_error("exact arithmetic needs categorical laws");
    ExactReal s = 0;
    for (int k = m; k <= *law.support_max(); ++k) s += ExactReal(binomial_big(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(m))) * law.exact_pmf(k);
    return s;
  }
};

// Calls fn(classes) for every assignment of Q classes to v slots.
template <class Fn>
void for_each_class_assignment(int q, int v, Fn&& fn) {
  std::vector<int> c(static_cast<std::size_t>(v), 0);
  while (true) {
    fn(c);
    int k = v - 1;
    while (k >= 0 && ++c[static_cast<std::size_t>(k)] == q) c[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) return;
  }
}

template <class Arith>
typename Arith::Real mean_impl(const SbmmSpec& spec, const PatternGraph& pattern) {
  using Real = typename Arith::Real;
  require_plain(spec, "the occurrence mean");
  const int v = pattern.vertex_count();
  Real total = 0;
  for_each_class_assignment(spec.classes(), v, [&](const std::vector<int>& c) {
    Real term = 1;
    for (int w = 0; w < v; ++w) term *= Arith::weight(spec, c[static_cast<std::size_t>(w)]);
    for (const auto& e : pattern.edges()) {
      if (term == 0) break;
      term *= Arith::binomial_moment(spec.edge_law(c[static_cast<std::size_t>(e.u)], c[static_cast<std::size_t>(e.v)]), e.multiplicity);
    }
    for (int w = 0; w < v && term != 0; ++w) {
      const int s = pattern.self_loops(w);
      if (s > 0) term *= Arith::binomial_moment(spec.self_loop_law(c[static_cast<std::size_t>(w)]), s);
    }
    total += term;
  });
  return total;
}

// One enumerated coordinate: a slot pair or a self-loop slot, with the
// probabilities of counts 0..m under its law for the current classes.
template <class Real>
struct Coordinate {
  bool loop = false;
  int a = 0;
  int b = 0;
  std::vector<Real> probs;
};

template <class Arith, class ProbsOf>
std::map<std::uint64_t, typename Arith::Real> enumerate_clumps(const SbmmSpec& spec, const PatternGraph& pattern,
                                                               ProbsOf&& probs_of) {
  using Real = typename Arith::Real;
  const int v = pattern.vertex_count();
  const CopyCounter counter(pattern);

  // pairs and loop slots that some placement touches; the rest marginalise out
  std::vector<bool> pair_used(static_cast<std::size_t>(v * (v - 1) / 2), false);
  std::vector<bool> loop_used(static_cast<std::size_t>(v), false);
  for (const auto& perm : distinct_placements(pattern)) {
    for (const auto& e : pattern.edges()) {
      int a = perm[static_cast<std::size_t>(e.u)];
      int b = perm[static_cast<std::size_t>(e.v)];
      if (a > b) std::swap(a, b);
      pair_used[slot_pair(a, b, v)] = true;
    }
    for (int w = 0; w < v; ++w)
      if (pattern.self_loops(w) > 0) loop_used[static_cast<std::size_t>(perm[static_cast<std::size_t>(w)])] = true;
  }

  // feasibility first, so nothing is enumerated when it cannot finish
  double leaves = 0.0;
  std::vector<std::vector<Coordinate<Real>>> plans;
  for_each_class_assignment(spec.classes(), v, [&](const std::vector<int>& c) {
    std::vector<Coordinate<Real>> coords;
    for (int a = 0; a < v; ++a) {
      for (int b = a + 1; b < v; ++b) {
        if (!pair_used[slot_pair(a, b, v)]) continue;
        Coordinate<Real> x;
        x.a = a;
        x.b = b;
        x.probs = probs_of(spec.edge_law(c[static_cast<std::size_t>(a)], c[static_cast<std::size_t>(b)]));
        coords.push_back(std::move(x));
      }
    }
    for (int w = 0; w < v; ++w) {
      if (!loop_used[static_cast<std::size_t>(w)]) continue;
      Coordinate<Real> x;
      x.loop = true;
      x.a = w;
      x.probs = probs_of(spec.self_loop_law(c[static_cast<std::size_t>(w)]));
      coords.push_back(std::move(x));
    }
    double size = 1.0;
    for (const auto& x : coords) size *= static_cast<double>(x.probs.size());
    leaves += size;
    plans.push_back(std::move(coords));
  });
  if (leaves > kEnumerationLimit) {
    throw infeasible_error("clump enumeration needs " + std::to_string(leaves) + " configurations (limit 1e8)");
  }

  std::map<std::uint64_t, Real> law;
  std::vector<std::uint32_t> pairs(static_cast<std::size_t>(v * (v - 1) / 2), 0);
  std::vector<std::uint32_t> loops(static_cast<std::size_t>(v), 0);
  std::size_t plan_index = 0;
  for_each_class_assignment(spec.classes(), v, [&](const std::vector<int>& c) {
    const auto& coords = plans[plan_index++];
    Real weight = 1;
    for (int w = 0; w < v; ++w) weight *= Arith::weight(spec, c[static_cast<std::size_t>(w)]);
    if (weight == 0) return;
    auto descend = [&](auto&& self, std::size_t depth, const Real& prob) -> void {
      if (depth == coords.size()) {
        const std::uint64_t z = counter.clump(pairs, loops);
        if (z > 0) law[z] += prob;
        return;
      }
      const auto& x = coords[depth];
      for (std::size_t k = 0; k < x.probs.size(); ++k) {
        if (x.probs[k] == 0) continue;
        if (x.loop) {
          loops[static_cast<std::size_t>(x.a)] = static_cast<std::uint32_t>(k);
        } else {
          pairs[slot_pair(x.a, x.b, v)] = static_cast<std::uint32_t>(k);
        }
        self(self, depth + 1, Real(prob * x.probs[k]));
      }
      if (x.loop) {
        loops[static_cast<std::size_t>(x.a)] = 0;
      } else {
        pairs[slot_pair(x.a, x.b, v)] = 0;
      }
    };
    descend(descend, 0, weight);
  });
  return law;
}

template <class Real>
void fill_lambda(const std::map<std::uint64_t, Real>& law, const Real& scale, std::vector<Real>& lambda, int& imax,
                 Real& total) {
  imax = law.empty() ? 0 : static_cast<int>(law.rbegin()->first);
  lambda.assign(static_cast<std::size_t>(imax), Real(0));
  total = 0;
  for (const auto& [z, p] : law) {
    lambda[static_cast<std::size_t>(z - 1)] = scale * p;
    total += lambda[static_cast<std::size_t>(z - 1)];
  }
}

}  // namespace

double occurrence_mean(const SbmmSpec& spec, const PatternGraph& pattern) {
  return mean_impl<DoubleArith>(spec, pattern);
}

ExactReal occurrence_mean_exact(const SbmmSpec& spec, const PatternGraph& pattern) {
  return mean_impl<ExactArith>(spec, pattern);
}

double expected_count(const SbmmSpec& spec, const PatternGraph& pattern) {
  require_fits(spec, pattern);
  const double mu = occurrence_mean(spec, pattern);
  return binomial_double(spec.n(), pattern.vertex_count()) * static_cast<double>(rho(pattern)) * mu;
}

ExactReal expected_count_exact(const SbmmSpec& spec, const PatternGraph& pattern) {
  require_fits(spec, pattern);
  const ExactReal mu = occurrence_mean_exact(spec, pattern);
  const BigInt sets = binomial_big(static_cast<std::uint64_t>(spec.n()), static_cast<std::uint64_t>(pattern.vertex_count()));
  return ExactReal(sets * rho(pattern)) * mu;
}

CompoundPoissonParams lambda_params(const SbmmSpec& spec, const PatternGraph& pattern, double eps) {
  require_plain(spec, "lambda");
  require_fits(spec, pattern);
  if (!(eps > 0.0 && eps < 1.0)) throw precondition_error("truncation eps must lie in (0, 1)");

  const int v = pattern.vertex_count();
  const double sets = binomial_double(spec.n(), v);
  // neglected probability per set, by the union bound over truncated coordinates
  double neglected = 0.0;
  double assignment_weight = 0.0;
  auto probs_of = [&](const EdgeCountDistribution& law) {
    const int m = law.truncation_bound(eps);
    std::vector<double> p(static_cast<std::size_t>(m + 1));
    for (int k = 0; k <= m; ++k) p[static_cast<std::size_t>(k)] = law.pmf(k);
    return p;
  };
  const auto law = enumerate_clumps<DoubleArith>(spec, pattern, probs_of);

  // the truncation tails, weighted by class assignment probability
  for_each_class_assignment(spec.classes(), v, [&](const std::vector<int>& c) {
    double weight = 1.0;
    for (int w = 0; w < v; ++w) weight *= spec.f()[static_cast<std::size_t>(c[static_cast<std::size_t>(w)])];
    if (weight == 0.0) return;
    double tails = 0.0;
    for (int a = 0; a < v; ++a) {
      for (int b = a + 1; b < v; ++b) {
        const auto& l = spec.edge_law(c[static_cast<std::size_t>(a)], c[static_cast<std::size_t>(b)]);
        tails += l.tail(l.truncation_bound(eps) + 1);
      }
      if (pattern.self_loop_count() > 0) {
        const auto& l = spec.self_loop_law(c[static_cast<std::size_t>(a)]);
        tails += l.tail(l.truncation_bound(eps) + 1);
      }
    }
    assignment_weight += weight;
    neglected += weight * std::min(1.0, tails);
  });

  CompoundPoissonParams out;
  fill_lambda<double>(law, sets, out.lambda, out.imax, out.total);
  out.truncation_mass = sets * neglected;
  return out;
}

ExactCompoundPoissonParams lambda_params_exact(const SbmmSpec& spec, const PatternGraph& pattern) {
  require_plain(spec, "lambda");
  require_fits(spec, pattern);
  auto probs_of = [](const EdgeCountDistribution& law) {
    if (!law.has_exact()) throw precondition_error("exact lambda needs categorical laws");
    std::vector<ExactReal> p;
    for (int k = 0; k <= *law.support_max(); ++k) p.push_back(law.exact_pmf(k));
    return p;
  };
  const auto law = enumerate_clumps<ExactArith>(spec, pattern, probs_of);
  const ExactReal sets(binomial_big(static_cast<std::uint64_t>(spec.n()), static_cast<std::uint64_t>(pattern.vertex_count())));
  ExactCompoundPoissonParams out;
  fill_lambda<ExactReal>(law, sets, out.lambda, out.imax, out.total);
  return out;
}

CompoundPoissonParams to_double(const ExactCompoundPoissonParams& p) {
  CompoundPoissonParams out;
  for (const auto& x : p.lambda) out.lambda.push_back(sbmm::to_double(x));
  out.imax = p.imax;
  out.total = sbmm::to_double(p.total);
  return out;
}

nlohmann::ordered_json params_to_json(const CompoundPoissonParams& p) {
  nlohmann::ordered_json j;
  j["imax"] = p.imax;
  j["total"] = p.total;
  j["truncation_mass"] = p.truncation_mass;
  j["lambda"] = p.lambda;
  return j;
}

std::vector<double> cp_pmf(const CompoundPoissonParams& params, int kmax) {
  if (kmax < 0) throw precondition_error("kmax must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(kmax) + 1, 0.0);
  p[0] = std::exp(-params.total);
  for (int k = 1; k <= kmax; ++k) {
    double s = 0.0;
    const int top = std::min(k, params.imax);
    for (int i = 1; i <= top; ++i) {
      const double l = params.lambda[static_cast<std::size_t>(i - 1)];
      if (l != 0.0) s += i * l * p[static_cast<std::size_t>(k - i)];
    }
    p[static_cast<std::size_t>(k)] = s / k;
  }
  return p;
}

double c_lambda_upper(const CompoundPoissonParams& params) {
  const double lambda = params.total + params.truncation_mass;
  const double lambda1 = params.lambda.empty() ? 0.0 : params.lambda[0];
  const double factor = lambda1 > 0.0 ? std::min(1.0, 1.0 / lambda1) : 1.0;
  return std::exp(lambda) * factor;
}

double poisson_c_factor(double nu) {
  if (nu < 0.0) throw precondition_error("Poisson mean must be >= 0");
  if (nu == 0.0) return 1.0;
  return -std::expm1(-nu) / nu;
}

double poisson_tail_q2(double omega) {
  if (!(omega >= 0.0)) throw precondition_error("Poisson rate must be >= 0");
  if (omega == 0.0) return 0.0;
  // regularised lower gamma avoids the cancellation in 1 - (1 + w) e^{-w}
  return boost::math::gamma_p(2.0, omega);
}

namespace {

struct VariantName {
  BoundVariant variant;
  std::string_view name;
};

constexpr VariantName kVariantNames[] = {
    {BoundVariant::thm31_simple, "thm31_simple"},
    {BoundVariant::cor35_inhom, "cor35_inhom"},
    {BoundVariant::thm41_multi, "thm41_multi"},
    {BoundVariant::thm51_selfloop, "thm51_selfloop"},
    {BoundVariant::thm52_poisson_approx, "thm52_poisson_approx"},
    {BoundVariant::cor55_poisson_sbm, "cor55_poisson_sbm"},
    {BoundVariant::regime_corpn, "regime_corpn"},
};

}  // namespace

std::string_view bound_variant_name(BoundVariant v) {
  for (const auto& x : kVariantNames)
    if (x.variant == v) return x.name;
  throw std::logic_error("unknown bound variant");
}

BoundVariant parse_bound_variant(std::string_view name) {
  for (const auto& x : kVariantNames)
    if (x.name == name) return x.variant;
  throw precondition_error("unknown bound variant '" + std::string(name) + "'");
}

const std::vector<BoundVariant>& all_bound_variants() {
  static const std::vector<BoundVariant> all = [] {
    std::vector<BoundVariant> v;
    for (const auto& x : kVariantNames) v.push_back(x.variant);
    return v;
  }();
  return all;
}

std::optional<double> BoundReport::ingredient(std::string_view name) const {
  for (const auto& [k, x] : ingredients)
    if (k == name) return x;
  return std::nullopt;
}

nlohmann::ordered_json report_to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["variant"] = bound_variant_name(r.variant);
  j["value"] = r.value;
  j["c_source"] = r.c_source;
  nlohmann::ordered_json ing = nlohmann::ordered_json::object();
  for (const auto& [k, x] : r.ingredients) ing[k] = x;
  j["ingredients"] = ing;
  j["flags"] = r.flags;
  return j;
}

namespace {

class BoundBuilder {
 public:
  BoundBuilder(const SbmmSpec& spec, const PatternGraph& pattern, BoundVariant variant, const BoundOptions& options)
      : spec_(spec), pattern_(pattern), options_(options) {
    report_.variant = variant;
    if (pattern.vertex_count() > spec.n()) throw precondition_error("pattern has more vertices than the model");
    profile_ = balancedness_profile(pattern);
    extrema_ = model_extrema(spec, pattern);
    v_ = pattern.vertex_count();
    n_ = static_cast<double>(spec.n());
    e_ = pattern.edge_count();
    rho_ = static_cast<double>(rho(pattern));
    vfact_ = std::tgamma(v_ + 1.0);
    add("n", n_);
    add("v", v_);
    add("e", e_);
    add("rho", rho_);
  }

  void add(const std::string& name, double x) { report_.ingredients.emplace_back(name, x); }
  void flag(std::string text) { report_.flags.push_back(std::move(text)); }

  void require_simple_balanced() {
    if (pattern_.max_multiplicity() != 1) throw precondition_error("pattern has multi-edges (t(G) = 1 required)");
    if (pattern_.self_loop_count() != 0) throw precondition_error("pattern has self-loops (s(G) = 0 required)");
    if (!profile_.strictly_balanced) throw precondition_error("pattern not strictly balanced");
  }
  void require_pseudo_balanced() {
    if (!profile_.strictly_pseudo_balanced) throw precondition_error("pattern not strictly pseudo-balanced");
  }
  void require_no_degree_correction() {
    if (spec_.degree_corrected()) {
      throw precondition_error("degree-corrected specs are only supported by cor35_inhom");
    }
  }

  void add_structure(KappaVariant kv) {
    if (kv == KappaVariant::simple) {
      add("d", sbmm::to_double(profile_.density));
      if (profile_.alpha) add("alpha", sbmm::to_double(*profile_.alpha));
      if (profile_.gamma) add("gamma", sbmm::to_double(*profile_.gamma));
    } else {
      add("pseudo_density", sbmm::to_double(profile_.pseudo_density));
      if (profile_.alpha_m) add("alpha_m", sbmm::to_double(*profile_.alpha_m));
      if (profile_.gamma_m) add("gamma_m", sbmm::to_double(*profile_.gamma_m));
    }
    kappa_.clear();
    for (int i = 1; i <= v_ - 1; ++i) {
      kappa_.push_back(sbmm::to_double(kappa(pattern_, profile_, i, kv)));
      add((kv == KappaVariant::simple ? "kappa_" : "kappa_m_") + std::to_string(i), kappa_.back());
    }
  }

  // c(lambda): override, else the bound from the enumerated lambda
  double compound_constant() {
    if (options_.c_override) {
      report_.c_source = "override";
      add("c_lambda", *options_.c_override);
      return *options_.c_override;
    }
    if (spec_.degree_corrected()) {
      throw precondition_error("degree-corrected specs need an explicit c_override (lambda is not computable)");
    }
    const auto params = lambda_params(spec_, pattern_, options_.eps);
    const double c = c_lambda_upper(params);
    report_.c_source = "c_lambda_upper";
    add("lambda_total", params.total);
    add("lambda_1", params.lambda.empty() ? 0.0 : params.lambda[0]);
    add("truncation_mass", params.truncation_mass);
    add("c_lambda", c);
    return c;
  }

  double poisson_constant() {
    const double nu = expected_count(spec_, pattern_);
    add("nu", nu);
    if (options_.c_override) {
      report_.c_source = "override";
      add("c_factor", *options_.c_override);
      return *options_.c_override;
    }
    const double f = poisson_c_factor(nu);
    report_.c_source = "poisson_factor";
    add("c_factor", f);
    return f;
  }

  // sum_{i=1}^{v-1} C(v,i) n^{v-i} term(i) / (v-i)!
  template <class Term>
  double overlap_sum(Term&& term) const {
    double s = 0.0;
    for (int i = 1; i <= v_ - 1; ++i) {
      s += binomial_double(v_, i) * std::pow(n_, v_ - i) * term(i) / std::tgamma(v_ - i + 1.0);
    }
    return s;
  }

  double lead() const { return rho_ * rho_ / vfact_ * std::pow(n_, v_); }
  double self_term() const { return v_ * v_ / vfact_ * std::pow(n_, v_ - 1); }

  BoundReport simple(double mu, double c, const char* mu_name) {
    add(mu_name, mu);
    const double first = self_term() * std::pow(mu, e_);
    const double rest = overlap_sum([&](int i) { return std::pow(mu, kappa_[static_cast<std::size_t>(i - 1)]); });
    return finish(c * lead() * std::pow(mu, e_) * (first + rest));
  }

  BoundReport multi(double c, int s, std::optional<double> phi) {
    const int t = pattern_.max_multiplicity();
    double prod = 1.0;
    for (int i = 1; i <= t; ++i) {
      const double mu = extrema_.mu_dstar[static_cast<std::size_t>(i - 1)];
      add("mu_dstar_" + std::to_string(i), mu);
      prod *= std::pow(mu, 2 * pattern_.pairs_with_multiplicity(i));
    }
    add("mu_star_" + std::to_string(2 * t), extrema_.mu_star.back());
    add("psi", extrema_.psi);
    double first = self_term() * prod;
    if (phi) first *= std::pow(*phi, 2 * s);
    const double rest = overlap_sum([&](int i) {
      const double loops = phi ? std::pow(*phi, 2 * s - i) : 1.0;
      return loops * std::pow(extrema_.psi, e_ + kappa_[static_cast<std::size_t>(i - 1)]);
    });
    return finish(c * lead() * (first + rest));
  }

  BoundReport poisson(double mu, double q2, double f, const char* mu_name, const char* q2_name) {
    add(mu_name, mu);
    add(q2_name, q2);
    const double first = self_term() * std::pow(mu, e_ + 1);
    const double rest = overlap_sum([&](int i) { return std::pow(mu, kappa_[static_cast<std::size_t>(i - 1)] + 1.0); });
    return finish(f * lead() * std::pow(mu, e_ - 1) * (first + q2 + rest));
  }

  BoundReport regime() {
    if (!options_.regime_lower || !options_.regime_upper) {
      throw precondition_error("regime_corpn needs the regime constants c and C");
    }
    const double lo = *options_.regime_lower;
    const double hi = *options_.regime_upper;
    if (!(lo >= 0.0 && hi > 0.0 && lo <= hi)) throw precondition_error("regime constants must satisfy 0 <= c <= C, C > 0");
    const double d = sbmm::to_double(profile_.density);
    const double scale = std::pow(n_, -1.0 / d);
    for (int a = 0; a < spec_.classes(); ++a) {
      for (int b = 0; b < spec_.classes(); ++b) {
        const double mean = spec_.edge_law(a, b).mean();
        const double slack = 1e-12 * scale * hi;
        if (mean < lo * scale - slack || mean > hi * scale + slack) {
          throw precondition_error("edge means outside the regime c n^{-1/d} <= E Y <= C n^{-1/d}");
        }
      }
    }
    add("regime_lower", lo);
    add("regime_upper", hi);
    const double k = compound_constant();
    const double alpha = sbmm::to_double(*profile_.alpha);
    const double gamma = sbmm::to_double(*profile_.gamma);
    const double a = std::pow(1.0 + std::pow(hi, alpha), v_ - 1) * std::pow(n_, 1.0 - alpha / d);
    const double b = std::pow(hi, e_ + gamma) * std::pow(1.0 + std::pow(hi, -d), v_ - 1) * std::pow(n_, -gamma / d);
    add("A", a);
    add("B", b);
    const double value =
        k * rho_ * rho_ / vfact_ * std::pow(hi, e_) * (self_term_regime() * std::pow(hi, e_) / n_ + std::min(a, b));
    return finish(value);
  }

  const BalancednessProfile& profile() const { return profile_; }
  const ModelExtrema& extrema() const { return extrema_; }

 private:
  double self_term_regime() const { return v_ * v_ / vfact_; }

  BoundReport finish(double value) {
    report_.value = value;
    return report_;
  }

  const SbmmSpec& spec_;
  const PatternGraph& pattern_;
  const BoundOptions& options_;
  BoundReport report_;
  BalancednessProfile profile_;
  ModelExtrema extrema_;
  std::vector<double> kappa_;
  int v_ = 0;
  double n_ = 0.0;
  int e_ = 0;
  double rho_ = 0.0;
  double vfact_ = 1.0;
};

}  // namespace

BoundReport tv_bound(const SbmmSpec& spec, const PatternGraph& pattern, BoundVariant variant,
                     const BoundOptions& options) {
  BoundBuilder b(spec, pattern, variant, options);
  switch (variant) {
    case BoundVariant::thm31_simple: {
      b.require_no_degree_correction();
      b.require_simple_balanced();
      b.add_structure(KappaVariant::simple);
      const double c = b.compound_constant();
      return b.simple(b.extrema().mu1_star, c, "mu1_star");
    }
    case BoundVariant::cor35_inhom: {
      b.require_simple_balanced();
      b.add_structure(KappaVariant::simple);
      const double c = b.compound_constant();
      return b.simple(b.extrema().inhom_max, c, "inhom_max");
    }
    case BoundVariant::thm41_multi: {
      b.require_no_degree_correction();
      if (pattern.self_loop_count() != 0) throw precondition_error("pattern has self-loops (s(G) = 0 required)");
      b.require_pseudo_balanced();
      b.add_structure(KappaVariant::multi);
      const double c = b.compound_constant();
      return b.multi(c, 0, std::nullopt);
    }
    case BoundVariant::thm51_selfloop: {
      b.require_no_degree_correction();
      if (pattern.self_loop_count() == 0) {
        auto r = tv_bound(spec, pattern, BoundVariant::thm41_multi, options);
        r.variant = BoundVariant::thm51_selfloop;
        r.flags.push_back("no self-loops in pattern: evaluated as thm41_multi");
        return r;
      }
      b.require_pseudo_balanced();
      const auto phi = b.extrema().phi_star;
      if (!phi || !(*phi > 0.0)) throw precondition_error("self-loop bound needs phi* > 0");
      b.add_structure(KappaVariant::multi);
      const int s = pattern.self_loop_count();
      b.add("s", s);
      b.add("phi_star", *phi);
      if (2 * s - (pattern.vertex_count() - 1) < 0) b.flag("negative exponent 2s(G) - i on phi*");
      const double c = b.compound_constant();
      return b.multi(c, s, phi);
    }
    case BoundVariant::thm52_poisson_approx: {
      b.require_no_degree_correction();
      b.require_simple_balanced();
      b.add_structure(KappaVariant::simple);
      const double f = b.poisson_constant();
      return b.poisson(b.extrema().mu1_star, b.extrema().q2_star, f, "mu1_star", "q2_star");
    }
    case BoundVariant::cor55_poisson_sbm: {
      b.require_no_degree_correction();
      if (!spec.all_edge_laws(EdgeCountDistribution::Family::poisson)) {
        throw precondition_error("edge laws are not all Poisson");
      }
      b.require_simple_balanced();
      b.add_structure(KappaVariant::simple);
      const double f = b.poisson_constant();
      const double omega = *b.extrema().omega_star;
      return b.poisson(omega, 0.5 * omega * omega, f, "omega_star", "half_omega_star_sq");
    }
    case BoundVariant::regime_corpn: {
      b.require_no_degree_correction();
      b.require_simple_balanced();
      b.add_structure(KappaVariant::simple);
      return b.regime();
    }
  }
  throw std::logic_error("unhandled bound variant");
}

}  // namespace sbmm

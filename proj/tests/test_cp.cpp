#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sbmm/cp.hpp"

using namespace sbmm;

namespace {

using Law = EdgeCountDistribution;

PatternGraph doubled_triangle() { return PatternGraph(3, {{0, 1, 2}, {1, 2, 1}, {0, 2, 1}}); }

ExactReal q(long a, long b) { return ExactReal(a, b); }

CompoundPoissonParams params_of(std::vector<double> lambda) {
  CompoundPoissonParams p;
  p.imax = static_cast<int>(lambda.size());
  for (double x : lambda) p.total += x;
  p.lambda = std::move(lambda);
  return p;
}

// law of sum_i i Z_i with independent Z_i ~ Po(lambda_i), by direct convolution
std::vector<double> convolution_oracle(const std::vector<double>& lambda, int kmax) {
  std::vector<double> acc(static_cast<std::size_t>(kmax + 1), 0.0);
  acc[0] = 1.0;
  for (std::size_t idx = 0; idx < lambda.size(); ++idx) {
    const int i = static_cast<int>(idx + 1);
    std::vector<double> term(static_cast<std::size_t>(kmax + 1), 0.0);
    double pz = std::exp(-lambda[idx]);
    for (int z = 0; z * i <= kmax; ++z) {
      term[static_cast<std::size_t>(z * i)] = pz;
      pz *= lambda[idx] / (z + 1);
    }
    std::vector<double> next(static_cast<std::size_t>(kmax + 1), 0.0);
    for (int a = 0; a <= kmax; ++a)
      for (int b = 0; a + b <= kmax; ++b) next[static_cast<std::size_t>(a + b)] += acc[static_cast<std::size_t>(a)] * term[static_cast<std::size_t>(b)];
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

TEST_CASE("occurrence mean and expected count") {
  const double p = 0.3;
  const auto bern = SbmmSpec::homogeneous(10, Law::categorical({1 - p, p}));
  CHECK(occurrence_mean(bern, PatternGraph::triangle()) == doctest::Approx(p * p * p));
  CHECK(expected_count(bern, PatternGraph::triangle()) == doctest::Approx(120 * p * p * p));

  const auto pois = SbmmSpec::homogeneous(10, Law::poisson(0.7));
  CHECK(occurrence_mean(pois, PatternGraph::triangle()) == doctest::Approx(0.343));

  const auto multi = SbmmSpec::homogeneous(10, Law::categorical({0.5, 0.2, 0.2, 0.1}));
  const PatternGraph triple(2, {{0, 1, 3}});
  CHECK(occurrence_mean(multi, triple) == doctest::Approx(0.1));

  const double r = 0.05;
  const auto twos_only = SbmmSpec::homogeneous(20, Law::categorical({1 - r, 0.0, r}));
  CHECK(expected_count(twos_only, PatternGraph::triangle()) == doctest::Approx(8 * 1140 * r * r * r));
  CHECK(expected_count(SbmmSpec::homogeneous(10, Law::zero()), PatternGraph::triangle()) == 0.0);

  CHECK_THROWS_AS(occurrence_mean(SbmmSpec(3, {1.0}, {{Law::poisson(1.0)}}, std::vector<double>{1, 1, 1}),
                                  PatternGraph::triangle()),
                  precondition_error);
}

TEST_CASE("exact lambda: complete patterns in G(n,p)") {
  for (int v = 3; v <= 4; ++v) {
    const auto law = Law::categorical_exact({q(2, 3), q(1, 3)});
    const auto spec = SbmmSpec::homogeneous(9, law);
    const auto params = lambda_params_exact(spec, PatternGraph::complete(v));
    REQUIRE(params.imax == 1);
    ExactReal expected(binomial_big(9, static_cast<std::uint64_t>(v)));
    for (int k = 0; k < v * (v - 1) / 2; ++k) expected *= q(1, 3);
    CHECK(params.lambda[0] == expected);
  }
}

TEST_CASE("exact lambda: multiplicity-t edge with two classes") {
  const std::vector<ExactReal> f = {q(1, 4), q(3, 4)};
  const std::vector<std::vector<ExactReal>> laws = {{q(1, 2), q(1, 4), q(1, 8), q(1, 8)},
                                                    {q(1, 3), q(1, 3), q(0, 1), q(1, 3)},
                                                    {q(3, 5), q(1, 5), q(1, 5)}};
  const auto l00 = Law::categorical_exact(laws[0]);
  const auto l01 = Law::categorical_exact(laws[1]);
  const auto l11 = Law::categorical_exact(laws[2]);
  const SbmmSpec spec = SbmmSpec(7, {0.25, 0.75}, {{l00, l01}, {l01, l11}}).with_exact_f(f);
  for (int t = 1; t <= 2; ++t) {
    const auto params = lambda_params_exact(spec, PatternGraph(2, {{0, 1, t}}));
    // lambda_{C(i,t)} = C(n,2) sum_{c1,c2} f f pi_{c1,c2,i}
    std::map<int, ExactReal> expected;
    for (int i = t; i <= 3; ++i) {
      ExactReal s = 0;
      s += f[0] * f[0] * l00.exact_pmf(i);
      s += 2 * f[0] * f[1] * l01.exact_pmf(i);
      s += f[1] * f[1] * l11.exact_pmf(i);
      expected[static_cast<int>(binomial_u64(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(t)))] += 21 * s;
    }
    for (int k = 1; k <= params.imax; ++k) {
      CAPTURE(t);
      CAPTURE(k);
      const ExactReal want = expected.contains(k) ? expected[k] : ExactReal(0);
      CHECK(params.lambda[static_cast<std::size_t>(k - 1)] == want);
    }
  }
}

TEST_CASE("lambda for the doubled-edge model sits at index 8") {
  const double p = 0.05;
  const auto spec = SbmmSpec::homogeneous(20, Law::categorical({1 - p, 0.0, p}));
  const auto params = lambda_params(spec, PatternGraph::triangle());
  REQUIRE(params.imax == 8);
  for (int i = 1; i < 8; ++i) CHECK(params.lambda[static_cast<std::size_t>(i - 1)] == 0.0);
  CHECK(params.lambda[7] == doctest::Approx(1140 * p * p * p).epsilon(1e-12));
  CHECK(params.truncation_mass == 0.0);
}

TEST_CASE("mean consistency on a small grid") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.05, 0.6);
  const std::vector<PatternGraph> patterns = {PatternGraph::triangle(), PatternGraph::path(3), doubled_triangle(),
                                              PatternGraph::cycle(4)};
  for (int rep = 0; rep < 12; ++rep) {
    const Law a = rep % 3 == 0 ? Law::poisson(u(gen)) : rep % 3 == 1 ? Law::geometric(u(gen) / 2) : Law::categorical({0.5, 0.3, 0.2});
    const Law b = Law::poisson(u(gen) / 3);
    const SbmmSpec spec(8, {0.4, 0.6}, {{a, b}, {b, a}});
    for (const auto& pat : patterns) {
      const auto params = lambda_params(spec, pat, 1e-10);
      double mean = 0.0;
      for (int i = 1; i <= params.imax; ++i) mean += i * params.lambda[static_cast<std::size_t>(i - 1)];
      const double nu = expected_count(spec, pat);
      CHECK(std::abs(mean - nu) <= params.truncation_mass * params.imax + 1e-9);
    }
  }
}

TEST_CASE("enumeration size limit") {
  const auto spec = SbmmSpec::homogeneous(30, Law::poisson(20.0));
  CHECK_THROWS_AS(lambda_params(spec, PatternGraph::complete(5)), infeasible_error);
}

TEST_CASE("compound Poisson pmf") {
  const double nu = 1.7;
  const auto pois = cp_pmf(params_of({nu}), 40);
  double term = std::exp(-nu);
  for (int k = 0; k <= 40; ++k) {
    CHECK(std::abs(pois[static_cast<std::size_t>(k)] - term) <= 1e-14);
    term *= nu / (k + 1);
  }

  std::vector<double> eight(8, 0.0);
  eight[7] = 0.9;
  const auto p8 = cp_pmf(params_of(eight), 40);
  for (int k = 0; k <= 40; ++k) {
    if (k % 8 != 0) {
      CHECK(p8[static_cast<std::size_t>(k)] == 0.0);
    } else {
      const int j = k / 8;
      CHECK(p8[static_cast<std::size_t>(k)] == doctest::Approx(std::exp(-0.9) * std::pow(0.9, j) / std::tgamma(j + 1.0)));
    }
  }

  const auto conv = convolution_oracle({0.5, 0.25}, 200);
  const auto rec = cp_pmf(params_of({0.5, 0.25}), 200);
  for (int k = 0; k <= 200; ++k) CHECK(std::abs(conv[static_cast<std::size_t>(k)] - rec[static_cast<std::size_t>(k)]) <= 1e-12);

  double mass = 0.0;
  for (double x : rec) mass += x;
  CHECK(mass <= 1.0 + 1e-12);
  CHECK(mass > 1.0 - 1e-12);
}

TEST_CASE("c(lambda) and Poisson factors") {
  CHECK(c_lambda_upper(params_of({1.0})) == doctest::Approx(std::exp(1.0)));
  CHECK(c_lambda_upper(params_of({2.0, 1.0})) == doctest::Approx(std::exp(3.0) / 2));
  CHECK(c_lambda_upper(params_of({0.0, 0.5})) == doctest::Approx(std::exp(0.5)));
  CHECK(c_lambda_upper(params_of({})) == 1.0);
  CHECK(poisson_c_factor(0.0) == 1.0);
  CHECK(poisson_c_factor(2.0) == doctest::Approx((1 - std::exp(-2.0)) / 2));
  CHECK(poisson_tail_q2(0.0) == 0.0);
  CHECK(poisson_tail_q2(1.0) == doctest::Approx(1 - 2 / std::exp(1.0)).epsilon(1e-14));
  for (double w = 0.0; w <= 2.0; w += 0.05) {
    double series = 0.0;
    double term = std::exp(-w) * w * w / 2;
    for (int k = 2; k < 60; ++k) {
      series += term;
      term *= w / (k + 1);
    }
    CHECK(poisson_tail_q2(w) == doctest::Approx(series).epsilon(1e-12));
    CHECK(poisson_tail_q2(w) <= w * w / 2);
  }
}

TEST_CASE("variant names") {
  for (auto v : all_bound_variants()) CHECK(parse_bound_variant(bound_variant_name(v)) == v);
  CHECK_THROWS_AS(parse_bound_variant("thm99"), precondition_error);
}

TEST_CASE("zero edge laws give a zero bound") {
  const auto spec = SbmmSpec::homogeneous(12, Law::zero());
  const auto tri = PatternGraph::triangle();
  CHECK(tv_bound(spec, tri, BoundVariant::thm31_simple).value == 0.0);
  CHECK(tv_bound(spec, tri, BoundVariant::cor35_inhom).value == 0.0);
  CHECK(tv_bound(spec, tri, BoundVariant::thm41_multi).value == 0.0);
  CHECK(tv_bound(spec, tri, BoundVariant::thm51_selfloop).value == 0.0);
  CHECK(tv_bound(spec, tri, BoundVariant::thm52_poisson_approx).value == 0.0);
  CHECK(tv_bound(spec, doubled_triangle(), BoundVariant::thm41_multi).value == 0.0);
  const auto pois0 = SbmmSpec::homogeneous(12, Law::poisson(0.0));
  CHECK(tv_bound(pois0, tri, BoundVariant::cor55_poisson_sbm).value == 0.0);
}

TEST_CASE("Poisson form with no multi-edges equals the simple form with the Poisson factor") {
  for (int n : {10, 50, 400}) {
    for (double p : {0.01, 0.1, 0.3}) {
      const auto bern = Law::categorical({1 - p, p});
      const auto other = Law::categorical({1 - p / 2, p / 2});
      const SbmmSpec spec(n, {0.5, 0.5}, {{bern, other}, {other, bern}});
      for (const auto& pat : {PatternGraph::triangle(), PatternGraph::cycle(4), PatternGraph::complete(4)}) {
        const auto poisson = tv_bound(spec, pat, BoundVariant::thm52_poisson_approx);
        CHECK(*poisson.ingredient("q2_star") == 0.0);
        BoundOptions o;
        o.c_override = poisson_c_factor(expected_count(spec, pat));
        const auto simple = tv_bound(spec, pat, BoundVariant::thm31_simple, o);
        CHECK(poisson.value == doctest::Approx(simple.value).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Poisson SBM bound against a hand evaluation") {
  const int n = 100;
  const double w = 1.0 / n;
  const auto spec = SbmmSpec::homogeneous(n, Law::poisson(w));
  const auto r = tv_bound(spec, PatternGraph::triangle(), BoundVariant::cor55_poisson_sbm);
  // triangle: rho = 1, v = 3, e = 3, kappa(1) = 4, kappa(2) = 2
  const double nu = 161700.0 * w * w * w;
  const double f = (1 - std::exp(-nu)) / nu;
  const double lead = f / 6.0 * std::pow(n, 3) * w * w;
  const double first = 9.0 / 6.0 * n * n * std::pow(w, 4);
  const double half = 0.5 * w * w;
  const double i1 = 3.0 * n * n * std::pow(w, 5) / 2.0;
  const double i2 = 3.0 * n * std::pow(w, 3);
  CHECK(r.value == doctest::Approx(lead * (first + half + i1 + i2)).epsilon(1e-12));
  CHECK(r.c_source == "poisson_factor");
}

TEST_CASE("simple bound recomputed from its ingredients") {
  const auto spec = SbmmSpec(30, {0.3, 0.7},
                             {{Law::categorical({0.9, 0.1}), Law::categorical({0.8, 0.15, 0.05})},
                              {Law::categorical({0.8, 0.15, 0.05}), Law::categorical({0.95, 0.05})}});
  const auto pat = PatternGraph::cycle(4);
  const auto r = tv_bound(spec, pat, BoundVariant::thm31_simple);
  const double c = *r.ingredient("c_lambda");
  const double mu = *r.ingredient("mu1_star");
  const double n = 30;
  double sum = 0.0;
  for (int i = 1; i <= 3; ++i)
    sum += binomial_double(4, i) * std::pow(n, 4 - i) * std::pow(mu, *r.ingredient("kappa_" + std::to_string(i))) / std::tgamma(5.0 - i);
  const double rho2 = 9.0;
  const double expected = c * rho2 / 24.0 * std::pow(n, 4) * std::pow(mu, 4) * (16.0 / 24.0 * std::pow(n, 3) * std::pow(mu, 4) + sum);
  CHECK(r.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(r.c_source == "c_lambda_upper");
  CHECK(*r.ingredient("kappa_1") == doctest::Approx(4.5));
}

TEST_CASE("multigraph bound recomputed from its ingredients") {
  const double p = 0.05;
  const auto spec = SbmmSpec::homogeneous(20, Law::categorical({1 - p, 0.0, p}));
  const auto pat = doubled_triangle();
  const auto r = tv_bound(spec, pat, BoundVariant::thm41_multi);
  const double c = *r.ingredient("c_lambda");
  const double m1 = *r.ingredient("mu_dstar_1");
  const double m2 = *r.ingredient("mu_dstar_2");
  const double psi = *r.ingredient("psi");
  CHECK(psi == doctest::Approx(std::max({2 * 16 * p, m1, m2})));
  double sum = 0.0;
  for (int i = 1; i <= 2; ++i)
    sum += binomial_double(3, i) * std::pow(20.0, 3 - i) * std::pow(psi, 4 + *r.ingredient("kappa_m_" + std::to_string(i))) / std::tgamma(4.0 - i);
  const double first = 9.0 / 6.0 * 400.0 * std::pow(m1, 4) * std::pow(m2, 2);
  CHECK(r.value == doctest::Approx(c * 9.0 / 6.0 * 8000.0 * (first + sum)).epsilon(1e-12));
}

TEST_CASE("self-loop bound") {
  const auto loops = SbmmSpec(8, {1.0}, {{Law::poisson(0.1)}}, std::nullopt, std::vector<Law>{Law::poisson(0.3)});
  const PatternGraph looped(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}, {{0, 1}});
  const auto r = tv_bound(loops, looped, BoundVariant::thm51_selfloop);
  CHECK(r.value > 0.0);
  CHECK(*r.ingredient("phi_star") == doctest::Approx(0.3));
  CHECK(r.flags.empty());
  // one loop on four vertices: 2s - i < 0 at i = 3
  const PatternGraph looped_cycle(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}}, {{1, 1}});
  const auto bern_loops = SbmmSpec(8, {1.0}, {{Law::categorical({0.9, 0.1})}}, std::nullopt,
                                   std::vector<Law>{Law::categorical({0.7, 0.3})});
  CHECK(tv_bound(bern_loops, looped_cycle, BoundVariant::thm51_selfloop).flags.size() == 1);

  const auto plain = tv_bound(loops, PatternGraph::triangle(), BoundVariant::thm51_selfloop);
  const auto multi = tv_bound(loops, PatternGraph::triangle(), BoundVariant::thm41_multi);
  CHECK(plain.value == multi.value);
  CHECK(plain.variant == BoundVariant::thm51_selfloop);
  CHECK_FALSE(plain.flags.empty());

  const auto no_loops = SbmmSpec::homogeneous(8, Law::poisson(0.1));
  CHECK_THROWS_AS(tv_bound(no_loops, looped, BoundVariant::thm51_selfloop), precondition_error);
}

TEST_CASE("regime bound") {
  const int n = 1000;
  const auto pat = PatternGraph::cycle(5);
  const auto spec = SbmmSpec::homogeneous(n, Law::poisson(2.0 / n));
  BoundOptions o;
  o.regime_lower = 1.0;
  o.regime_upper = 3.0;
  const auto r = tv_bound(spec, pat, BoundVariant::regime_corpn, o);
  const double alpha = 4.0 / 3.0;
  const double a = std::pow(1 + std::pow(3.0, alpha), 4) * std::pow(n, 1 - alpha);
  const double b = std::pow(3.0, 6.0) * std::pow(1 + 1 / 3.0, 4) * std::pow(n, -1.0);
  CHECK(*r.ingredient("A") == doctest::Approx(a).epsilon(1e-12));
  CHECK(*r.ingredient("B") == doctest::Approx(b).epsilon(1e-12));
  const double k = *r.ingredient("c_lambda");
  const double expected = k * 144.0 / 120.0 * std::pow(3.0, 5) * (25.0 / 120.0 * std::pow(3.0, 5) / n + std::min(a, b));
  CHECK(r.value == doctest::Approx(expected).epsilon(1e-12));

  o.regime_upper = 1.5;
  CHECK_THROWS_AS(tv_bound(spec, pat, BoundVariant::regime_corpn, o), precondition_error);
  CHECK_THROWS_AS(tv_bound(spec, pat, BoundVariant::regime_corpn), precondition_error);
}

TEST_CASE("hypotheses are enforced") {
  const auto bern = SbmmSpec::homogeneous(10, Law::categorical({0.9, 0.1}));
  const auto star = PatternGraph(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}});  // triangle with a pendant edge
  CHECK_THROWS_WITH_AS(tv_bound(bern, star, BoundVariant::thm31_simple), "pattern not strictly balanced", precondition_error);
  CHECK_THROWS_AS(tv_bound(bern, doubled_triangle(), BoundVariant::thm31_simple), precondition_error);
  CHECK_THROWS_AS(tv_bound(bern, PatternGraph::triangle(), BoundVariant::cor55_poisson_sbm), precondition_error);
  CHECK_THROWS_AS(tv_bound(SbmmSpec::homogeneous(2, Law::categorical({0.9, 0.1})), PatternGraph::triangle(),
                           BoundVariant::thm31_simple),
                  precondition_error);

  const auto dc = SbmmSpec(4, {1.0}, {{Law::poisson(0.2)}}, std::vector<double>{1, 2, 1, 1});
  CHECK_THROWS_AS(tv_bound(dc, PatternGraph::triangle(), BoundVariant::thm31_simple), precondition_error);
  CHECK_THROWS_AS(tv_bound(dc, PatternGraph::triangle(), BoundVariant::cor35_inhom), precondition_error);
  BoundOptions o;
  o.c_override = 1.0;
  const auto r = tv_bound(dc, PatternGraph::triangle(), BoundVariant::cor35_inhom, o);
  CHECK(*r.ingredient("inhom_max") == doctest::Approx(0.4));
  CHECK(r.c_source == "override");
}

TEST_CASE("report JSON keeps ingredient order") {
  const auto spec = SbmmSpec::homogeneous(10, Law::categorical({0.9, 0.1}));
  const auto j = report_to_json(tv_bound(spec, PatternGraph::triangle(), BoundVariant::thm31_simple));
  CHECK(j["variant"] == "thm31_simple");
  CHECK(j["ingredients"].begin().key() == "n");
  CHECK(j["ingredients"].contains("kappa_2"));
}

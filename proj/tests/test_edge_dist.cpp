#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sbmm/edge_dist.hpp"
#include "sbmm/model.hpp"

using namespace sbmm;

namespace {

// Series oracles summed directly over the pmf.
double series_moment(const EdgeCountDistribution& d, int r, int kmax = 400) {
  double s = 0.0;
  for (int k = 1; k <= kmax; ++k) s += std::pow(k, r) * d.pmf(k);
  return s;
}

double series_binomial_moment(const EdgeCountDistribution& d, int r, int kmax = 400) {
  double s = 0.0;
  for (int k = r; k <= kmax; ++k) s += binomial_double(k, r) * d.pmf(k);
  return s;
}

// sum_{a >= r} C(a-1, r-1) P(Y >= a)
double tail_form(const EdgeCountDistribution& d, int r, int kmax = 400) {
  double s = 0.0;
  for (int a = r; a <= kmax; ++a) s += binomial_double(a - 1, r - 1) * d.tail(a);
  return s;
}

std::vector<EdgeCountDistribution> corpus() {
  return {EdgeCountDistribution::categorical({0.9, 0.0, 0.1}),
          EdgeCountDistribution::categorical({0.2, 0.3, 0.1, 0.4}),
          EdgeCountDistribution::poisson(0.3),
          EdgeCountDistribution::poisson(2.5),
          EdgeCountDistribution::geometric(0.2),
          EdgeCountDistribution::geometric(0.6)};
}

}  // namespace

TEST_CASE("pmf and tail") {
  const auto c = EdgeCountDistribution::categorical({0.9, 0.0, 0.1});
  CHECK(c.pmf_tail(2).first == doctest::Approx(0.1));
  CHECK(c.pmf_tail(2).second == doctest::Approx(0.1));
  CHECK(c.tail(0) == 1.0);
  CHECK(c.tail(3) == 0.0);

  for (double w : {0.0, 0.1, 1.0, 3.0}) {
    const auto p = EdgeCountDistribution::poisson(w);
    CHECK(p.tail(2) == doctest::Approx(1.0 - (1.0 + w) * std::exp(-w)).epsilon(1e-12));
  }
  const auto g = EdgeCountDistribution::geometric(0.3);
  for (int k = 0; k < 8; ++k) CHECK(g.tail(k) == doctest::Approx(std::pow(0.3, k)).epsilon(1e-14));

  for (const auto& d : corpus()) {
    double s = 0.0;
    for (int k = 0; k <= 400; ++k) s += d.pmf(k);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("moments") {
  const double p = 0.07;
  const auto two = EdgeCountDistribution::categorical({1 - p, 0.0, p});
  CHECK(two.moment(1) == doctest::Approx(2 * p));
  CHECK(EdgeCountDistribution::poisson(0.4).moment(1) == doctest::Approx(0.4));

  // Touchard polynomial: E Y^4 = w^4 + 6w^3 + 7w^2 + w
  const double w = 0.3;
  CHECK(EdgeCountDistribution::poisson(w).moment(4) ==
        doctest::Approx(w * w * w * w + 6 * w * w * w + 7 * w * w + w).epsilon(1e-12));

  for (const auto& d : corpus()) {
    for (int r = 1; r <= 6; ++r) {
      CAPTURE(r);
      CHECK(d.moment(r) == doctest::Approx(series_moment(d, r)).epsilon(1e-10));
      CHECK(d.binomial_moment(r) == doctest::Approx(series_binomial_moment(d, r)).epsilon(1e-10));
      CHECK(d.binomial_moment(r) == doctest::Approx(tail_form(d, r)).epsilon(1e-10));
      CHECK(d.moment(r) <= d.moment(r + 1) * (1 + 1e-12));
    }
    CHECK(d.binomial_moment(1) == doctest::Approx(d.moment(1)));
  }
  CHECK(EdgeCountDistribution::poisson(0.5).binomial_moment(3) == doctest::Approx(0.125 / 6));
  CHECK(EdgeCountDistribution::geometric(0.2).binomial_moment(2) == doctest::Approx(0.0625));
}

TEST_CASE("truncation bound") {
  CHECK(EdgeCountDistribution::categorical({0.5, 0.25, 0.25}).truncation_bound(1e-10) <= 2);
  CHECK(EdgeCountDistribution::poisson(0.0).truncation_bound(1e-10) == 0);
  const auto p = EdgeCountDistribution::poisson(0.5);
  const int m = p.truncation_bound(1e-10);
  CHECK(p.tail(m + 1) <= 1e-10);
  CHECK(p.tail(m) > 1e-10);
  const auto g = EdgeCountDistribution::geometric(0.5);
  CHECK(g.tail(g.truncation_bound(1e-10) + 1) <= 1e-10);
  CHECK_THROWS_AS(p.truncation_bound(0.0), precondition_error);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(EdgeCountDistribution::categorical({0.5, 0.4}), precondition_error);
  CHECK_THROWS_AS(EdgeCountDistribution::categorical({1.2, -0.2}), precondition_error);
  CHECK_THROWS_AS(EdgeCountDistribution::categorical({}), precondition_error);
  CHECK_THROWS_AS(EdgeCountDistribution::poisson(-1.0), precondition_error);
  CHECK_THROWS_AS(EdgeCountDistribution::geometric(1.0), precondition_error);
  CHECK_THROWS_AS(EdgeCountDistribution::categorical_exact({ExactReal(1, 3), ExactReal(1, 3)}), precondition_error);
  CHECK_THROWS_AS(EdgeCountDistribution::categorical({0.5, 0.5}).parameter(), precondition_error);
}

TEST_CASE("exact categorical path") {
  const auto d = EdgeCountDistribution::categorical_exact({ExactReal(2, 3), ExactReal(0), ExactReal(1, 3)});
  CHECK(d.exact_pmf(2) == ExactReal(1, 3));
  CHECK(d.exact_pmf(5) == 0);
  CHECK(d.pmf(0) == doctest::Approx(2.0 / 3));
  CHECK(d.support_max() == 2);
  // trailing zeros are trimmed
  CHECK(EdgeCountDistribution::categorical({1.0, 0.0, 0.0}).support_max() == 0);
  CHECK(EdgeCountDistribution::poisson(1.0).support_max() == std::nullopt);
}

TEST_CASE("JSON round trip") {
  for (const auto& d : corpus()) {
    const auto j = distribution_to_json(d);
    CHECK(distribution_from_json(nlohmann::json::parse(j.dump())) == d);
  }
  const auto exact = distribution_from_json(nlohmann::json::parse(R"({"type":"categorical","p":["3/4","1/4"]})"));
  CHECK(exact.exact_pmf(1) == ExactReal(1, 4));
  CHECK_THROWS_AS(distribution_from_json(nlohmann::json::parse(R"({"type":"binomial"})")), precondition_error);
}

TEST_CASE("sampler marginals") {
  constexpr int kDraws = 200000;
  for (const auto& d : corpus()) {
    SplitMix64 gen(99);
    std::vector<double> counts(64, 0.0);
    double sum = 0.0;
    for (int i = 0; i < kDraws; ++i) {
      const int y = d.sample(gen);
      sum += y;
      if (y < 64) counts[static_cast<std::size_t>(y)] += 1.0;
    }
    const double mean = d.moment(1);
    const double sd = std::sqrt(d.moment(2) - mean * mean);
    CHECK(std::abs(sum / kDraws - mean) <= 4.0 * sd / std::sqrt(kDraws));
    // chi-square over cells with expected count >= 5, remainder pooled
    double chi2 = 0.0;
    int cells = 0;
    double pooled_obs = kDraws;
    double pooled_exp = kDraws;
    for (int k = 0; k < 64; ++k) {
      const double expect = kDraws * d.pmf(k);
      if (expect < 5.0) continue;
      chi2 += (counts[static_cast<std::size_t>(k)] - expect) * (counts[static_cast<std::size_t>(k)] - expect) / expect;
      pooled_obs -= counts[static_cast<std::size_t>(k)];
      pooled_exp -= expect;
      ++cells;
    }
    if (pooled_exp >= 5.0) {
      chi2 += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
      ++cells;
    }
    // 1e-3 critical values of chi-square with cells-1 degrees of freedom, loosely
    // bounded by df + 3.3 sqrt(2 df) + 10 for the df used here
    const double df = cells - 1;
    CHECK(chi2 < df + 3.3 * std::sqrt(2 * df) + 10.0);
  }
}

TEST_CASE("large Poisson rates use the quantile path") {
  const auto d = EdgeCountDistribution::poisson(2000.0);
  SplitMix64 gen(5);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) sum += d.sample(gen);
  CHECK(std::abs(sum / 20000 - 2000.0) < 4.0 * std::sqrt(2000.0 / 20000));
}

TEST_CASE("Stirling numbers") {
  CHECK(stirling2(4, 2) == 7);
  CHECK(stirling2(5, 3) == 25);
  CHECK(stirling2(3, 0) == 0);
  CHECK(stirling2(0, 0) == 1);
}

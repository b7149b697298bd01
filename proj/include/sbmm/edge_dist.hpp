#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sbmm/common.hpp"

namespace sbmm {

/// Law of a nonnegative integer edge (or self-loop) count.
///
/// Three families: finite Categorical p_0..p_m, Poisson(omega) and
/// Geometric(ratio) with pmf ratio^k (1 - ratio). Categorical laws also keep
/// their probabilities as exact rationals; doubles convert exactly, and the
/// JSON form accepts "p/q" strings.
class EdgeCountDistribution {
 public:
  enum class Family { categorical, poisson, geometric };

  static EdgeCountDistribution categorical(const std::vector<double>& p);
  static EdgeCountDistribution categorical_exact(const std::vector<ExactReal>& p);
  static EdgeCountDistribution poisson(double omega);
  static EdgeCountDistribution geometric(double ratio);
  /// Categorical point mass at zero.
  static EdgeCountDistribution zero();

  Family family() const;
  /// Poisson rate or geometric ratio.
  double parameter() const;

  double pmf(int k) const;
  /// P(Y >= k).
  double tail(int k) const;
  std::pair<double, double> pmf_tail(int k) const { return {pmf(k), tail(k)}; }

  /// E[Y^r], r >= 1.
  double moment(int r) const;
  /// E[C(Y, r)], r >= 1.
  double binomial_moment(int r) const;
  double mean() const { return moment(1); }

  /// Smallest m with P(Y > m) <= eps.
  int truncation_bound(double eps) const;

  /// Largest support point for finite laws.
  std::optional<int> support_max() const;

  bool has_exact() const { return family() == Family::categorical; }
  ExactReal exact_pmf(int k) const;

  /// Draws one value by inversion of a single 53-bit uniform taken from `gen`.
  template <class URBG>
  int sample(URBG& gen) const;

  friend bool operator==(const EdgeCountDistribution& a, const EdgeCountDistribution& b);

 private:
  struct Categorical {
    std::vector<double> p;
    std::vector<ExactReal> exact;
    std::vector<double> cdf;
  };
  struct Poisson {
    double omega;
  };
  struct Geometric {
    double ratio;
  };
  using Law = std::variant<Categorical, Poisson, Geometric>;

  explicit EdgeCountDistribution(Law law) : law_(std::move(law)) {}

  static int sample_poisson(double u, double omega);

  Law law_;
};

EdgeCountDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::ordered_json distribution_to_json(const EdgeCountDistribution& d);

/// Stirling number of the second kind S(r, k).
double stirling2(int r, int k);

template <class URBG>
int EdgeCountDistribution::sample(URBG& gen) const {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  switch (law_.index()) {
    case 0: {
      const auto& c = std::get<Categorical>(law_);
      for (std::size_t k = 0; k + 1 < c.cdf.size(); ++k)
        if (u < c.cdf[k]) return static_cast<int>(k);
      return static_cast<int>(c.cdf.size()) - 1;
    }
    case 1:
      return sample_poisson(u, std::get<Poisson>(law_).omega);
    default: {
      const double ratio = std::get<Geometric>(law_).ratio;
      if (ratio <= 0.0) return 0;
      // P(floor(log(1-u)/log(ratio)) >= k) = ratio^k
      return static_cast<int>(std::floor(std::log1p(-u) / std::log(ratio)));
    }
  }
}

}  // namespace sbmm

#include "sbmm/edge_dist.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace sbmm {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr int kTruncationScanLimit = 10'000'000;

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  return cdf;
}

void trim_trailing_zeros(std::vector<double>& p, std::vector<ExactReal>& exact) {
  while (p.size() > 1 && p.back() == 0.0 && exact.back() == 0) {
    p.pop_back();
    exact.pop_back();
  }
}

}  // namespace

double stirling2(int r, int k) {
  if (r < 0 || k < 0 || k > r) return 0.0;
  // row-by-row recurrence S(n,k) = k S(n-1,k) + S(n-1,k-1)
  std::vector<double> row(static_cast<std::size_t>(r + 1), 0.0);
  row[0] = 1.0;
  for (int n = 1; n <= r; ++n) {
    for (int j = n; j >= 1; --j) {
      row[static_cast<std::size_t>(j)] = j * row[static_cast<std::size_t>(j)] + row[static_cast<std::size_t>(j - 1)];
    }
    row[0] = 0.0;
  }
  return row[static_cast<std::size_t>(k)];
}

EdgeCountDistribution EdgeCountDistribution::categorical(const std::vector<double>& p) {
  if (p.empty()) throw precondition_error("categorical law needs at least one probability");
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw precondition_error("categorical probabilities must be nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw precondition_error("categorical probabilities must sum to 1 (got " + std::to_string(total) + ")");
  }
  Categorical c;
  c.p = p;
  for (double x : p) c.exact.push_back(exact_from_double(x));
  trim_trailing_zeros(c.p, c.exact);
  c.cdf = cumulative(c.p);
  return EdgeCountDistribution(std::move(c));
}

EdgeCountDistribution EdgeCountDistribution::categorical_exact(const std::vector<ExactReal>& p) {
  if (p.empty()) throw precondition_error("categorical law needs at least one probability");
  ExactReal total = 0;
  for (const auto& x : p) {
    if (x < 0) throw precondition_error("categorical probabilities must be nonnegative");
    total += x;
  }
  if (total != 1) throw precondition_error("exact categorical probabilities must sum to exactly 1");
  Categorical c;
  c.exact = p;
  for (const auto& x : p) c.p.push_back(to_double(x));
  trim_trailing_zeros(c.p, c.exact);
  c.cdf = cumulative(c.p);
  return EdgeCountDistribution(std::move(c));
}

EdgeCountDistribution EdgeCountDistribution::poisson(double omega) {
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw precondition_error("Poisson rate must be finite and >= 0");
  return EdgeCountDistribution(Poisson{omega});
}

EdgeCountDistribution EdgeCountDistribution::geometric(double ratio) {
  if (!(ratio >= 0.0 && ratio < 1.0)) throw precondition_error("geometric ratio must lie in [0, 1)");
  return EdgeCountDistribution(Geometric{ratio});
}

EdgeCountDistribution EdgeCountDistribution::zero() { return categorical_exact({ExactReal(1)}); }

EdgeCountDistribution::Family EdgeCountDistribution::family() const {
  switch (law_.index()) {
    case 0: return Family::categorical;
    case 1: return Family::poisson;
    default: return Family::geometric;
  }
}

double EdgeCountDistribution::parameter() const {
  if (const auto* p = std::get_if<Poisson>(&law_)) return p->omega;
  if (const auto* g = std::get_if<Geometric>(&law_)) return g->ratio;
  throw precondition_error("categorical law has no scalar parameter");
}

double EdgeCountDistribution::pmf(int k) const {
  if (k < 0) return 0.0;
  if (const auto* c = std::get_if<Categorical>(&law_)) {
    return static_cast<std::size_t>(k) < c->p.size() ? c->p[static_cast<std::size_t>(k)] : 0.0;
  }
  if (const auto* p = std::get_if<Poisson>(&law_)) {
    if (p->omega == 0.0) return k == 0 ? 1.0 : 0.0;
    return boost::math::pdf(boost::math::poisson_distribution<double>(p->omega), k);
  }
  const double r = std::get<Geometric>(law_).ratio;
  return std::pow(r, k) * (1.0 - r);
}

double EdgeCountDistribution::tail(int k) const {
  if (k <= 0) return 1.0;
  if (const auto* c = std::get_if<Categorical>(&law_)) {
    double s = 0.0;
    for (std::size_t j = static_cast<std::size_t>(k); j < c->p.size(); ++j) s += c->p[j];
    return s;
  }
  if (const auto* p = std::get_if<Poisson>(&law_)) {
    if (p->omega == 0.0) return 0.0;
    // P(Y >= k) = P(Gamma(k, 1) <= omega)
    return boost::math::gamma_p(static_cast<double>(k), p->omega);
  }
  return std::pow(std::get<Geometric>(law_).ratio, k);
}

double EdgeCountDistribution::binomial_moment(int r) const {
  if (r < 1) throw precondition_error("binomial moment order must be >= 1");
  if (const auto* c = std::get_if<Categorical>(&law_)) {
    double s = 0.0;
    for (std::size_t k = 0; k < c->p.size(); ++k) s += binomial_double(static_cast<double>(k), r) * c->p[k];
    return s;
  }
  if (const auto* p = std::get_if<Poisson>(&law_)) {
    return std::pow(p->omega, r) / std::tgamma(r + 1.0);
  }
  const double ratio = std::get<Geometric>(law_).ratio;
  return std::pow(ratio / (1.0 - ratio), r);
}

double EdgeCountDistribution::moment(int r) const {
  if (r < 1) throw precondition_error("moment order must be >= 1");
  if (const auto* c = std::get_if<Categorical>(&law_)) {
    double s = 0.0;
    for (std::size_t k = 1; k < c->p.size(); ++k) s += std::pow(static_cast<double>(k), r) * c->p[k];
    return s;
  }
  // E[Y^r] = sum_k S(r,k) E[(Y)_k], with falling factorial moment k! E[C(Y,k)]
  double s = 0.0;
  for (int k = 1; k <= r; ++k) s += stirling2(r, k) * std::tgamma(k + 1.0) * binomial_moment(k);
  return s;
}

int EdgeCountDistribution::truncation_bound(double eps) const {
  if (!(eps > 0.0 && eps < 1.0)) throw precondition_error("truncation eps must lie in (0, 1)");
  if (const auto* c = std::get_if<Categorical>(&law_)) {
    int m = static_cast<int>(c->p.size()) - 1;
    while (m > 0 && tail(m) <= eps) --m;
    return m;
  }
  for (int m = 0; m < kTruncationScanLimit; ++m)
    if (tail(m + 1) <= eps) return m;
  throw infeasible_error("truncation bound exceeds scan limit");
}

std::optional<int> EdgeCountDistribution::support_max() const {
  if (const auto* c = std::get_if<Categorical>(&law_)) return static_cast<int>(c->p.size()) - 1;
  if (const auto* p = std::get_if<Poisson>(&law_); p && p->omega == 0.0) return 0;
  if (const auto* g = std::get_if<Geometric>(&law_); g && g->ratio == 0.0) return 0;
  return std::nullopt;
}

ExactReal EdgeCountDistribution::exact_pmf(int k) const {
  const auto* c = std::get_if<Categorical>(&law_);
  if (c == nullptr) throw precondition_error("exact probabilities require a categorical law");
  if (k < 0 || static_cast<std::size_t>(k) >= c->exact.size()) return ExactReal(0);
  return c->exact[static_cast<std::size_t>(k)];
}

int EdgeCountDistribution::sample_poisson(double u, double omega) {
  if (omega == 0.0) return 0;
  if (omega <= 500.0) {
    double p = std::exp(-omega);
    double cdf = p;
    int k = 0;
    while (u >= cdf && k < 100'000) {
      ++k;
      p *= omega / k;
      cdf += p;
      if (p == 0.0 && static_cast<double>(k) > omega) break;
    }
    return k;
  }
  return static_cast<int>(boost::math::quantile(boost::math::poisson_distribution<double>(omega), u));
}

bool operator==(const EdgeCountDistribution& a, const EdgeCountDistribution& b) {
  if (a.law_.index() != b.law_.index()) return false;
  if (const auto* c = std::get_if<EdgeCountDistribution::Categorical>(&a.law_)) {
    return c->exact == std::get<EdgeCountDistribution::Categorical>(b.law_).exact;
  }
  return a.parameter() == b.parameter();
}

EdgeCountDistribution distribution_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "categorical") {
    const auto& p = j.at("p");
    if (!p.is_array()) throw precondition_error("categorical 'p' must be an array");
    const bool all_strings = std::all_of(p.begin(), p.end(), [](const auto& x) { return x.is_string(); });
    if (all_strings) {
      std::vector<ExactReal> exact;
      for (const auto& x : p) exact.push_back(parse_exact(x.get<std::string>()));
      return EdgeCountDistribution::categorical_exact(exact);
    }
    std::vector<double> values;
    for (const auto& x : p) {
      values.push_back(x.is_string() ? to_double(parse_exact(x.get<std::string>())) : x.get<double>());
    }
    return EdgeCountDistribution::categorical(values);
  }
  if (type == "poisson") return EdgeCountDistribution::poisson(j.at("omega").get<double>());
  if (type == "geometric") return EdgeCountDistribution::geometric(j.at("p").get<double>());
  throw precondition_error("unknown edge law type '" + type + "'");
}

nlohmann::ordered_json distribution_to_json(const EdgeCountDistribution& d) {
  nlohmann::ordered_json j;
  switch (d.family()) {
    case EdgeCountDistribution::Family::categorical: {
      j["type"] = "categorical";
      auto p = nlohmann::ordered_json::array();
      for (int k = 0; k <= *d.support_max(); ++k) p.push_back(d.pmf(k));
      j["p"] = p;
      break;
    }
    case EdgeCountDistribution::Family::poisson:
      j["type"] = "poisson";
      j["omega"] = d.parameter();
      break;
    case EdgeCountDistribution::Family::geometric:
      j["type"] = "geometric";
      j["p"] = d.parameter();
      break;
  }
  return j;
}

}  // namespace sbmm

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbmm/cp.hpp"
#include "sbmm/model.hpp"
#include "sbmm/pattern.hpp"

namespace sbmm {

/// Count -> probability. Total mass may fall short of 1; the shortfall is
/// treated as an unmatched atom by tv_distance.
using Pmf = std::map<std::uint64_t, double>;

/// Exact law of W by enumerating every class assignment and every edge
/// (and self-loop) configuration of the whole graph. Categorical laws only;
/// refuses when Q^n (m+1)^{C(n,2)} (times the self-loop factor) exceeds 10^8.
Pmf exact_count_pmf(const SbmmSpec& spec, const PatternGraph& pattern);

struct MonteCarloResult {
  std::map<std::uint64_t, std::uint64_t> histogram;
  std::uint64_t reps = 0;
  Pmf pmf() const;
};

/// reps independent draws of W. Replicate r uses the substream keyed by
/// (seed, r), so the histogram does not depend on `threads`.
MonteCarloResult monte_carlo_pmf(const SbmmSpec& spec, const PatternGraph& pattern, std::uint64_t reps,
                                 std::uint64_t seed, int threads = 1);

/// 1/2 sum |p - q| plus 1/2 |deficit_p - deficit_q|.
double tv_distance(const Pmf& p, const Pmf& q);

/// sqrt(K / (4 reps)) with K the number of atoms carried by either the
/// empirical law or the reference (reference atoms >= 1e-12), plus one.
double mc_allowance(const Pmf& empirical, const Pmf& reference, std::uint64_t reps);

Pmf pmf_from_vector(const std::vector<double>& p);
std::string pmf_to_csv(const Pmf& p);
nlohmann::ordered_json pmf_to_json(const Pmf& p);

/// Runs one validation experiment described by
/// {"spec", "pattern", "variant", "mode": "exact"|"monte_carlo", "reps",
///  "seed", "eps", "c_override", "regime_lower", "regime_upper", "kmax"}
/// and returns the report. Identical configs give identical reports.
nlohmann::ordered_json run_experiment(const nlohmann::json& config, int threads = 1);

}  // namespace sbmm

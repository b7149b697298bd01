#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sbmm/common.hpp"
#include "sbmm/model.hpp"
#include "sbmm/pattern.hpp"

namespace sbmm {

/// mu(G): expected number of copies on one fixed placement, summed over
/// class assignments of the v(G) slots. Not defined for degree-corrected
/// specs (the per-placement mean then depends on the vertices).
double occurrence_mean(const SbmmSpec& spec, const PatternGraph& pattern);

/// nu = EW = C(n, v) rho(G) mu(G).
double expected_count(const SbmmSpec& spec, const PatternGraph& pattern);

/// Exact versions; every edge (and self-loop) law must be categorical.
ExactReal occurrence_mean_exact(const SbmmSpec& spec, const PatternGraph& pattern);
ExactReal expected_count_exact(const SbmmSpec& spec, const PatternGraph& pattern);

/// lambda[i-1] holds lambda_i for i = 1..imax.
struct CompoundPoissonParams {
  std::vector<double> lambda;
  int imax = 0;
  double truncation_mass = 0.0;  // certified bound on the neglected lambda mass
  double total = 0.0;            // sum of lambda_i, i <= imax
};

struct ExactCompoundPoissonParams {
  std::vector<ExactReal> lambda;
  int imax = 0;
  ExactReal total = 0;
};

/// Clump parameters lambda_i = C(n, v) P(Z = i), where Z counts the copies
/// supported on one fixed v(G)-set. The law of Z comes from enumerating
/// class assignments of the set and, per assignment, every edge and
/// self-loop configuration with each count truncated at the law's
/// truncation_bound(eps). Summing E[X I(Z = i)] over the copies on a set
/// gives i P(Z = i), which is why the grouping by vertex set works.
///
/// Throws infeasible_error when the enumeration would exceed 10^8 leaves.
CompoundPoissonParams lambda_params(const SbmmSpec& spec, const PatternGraph& pattern,
                                    double eps = 1e-10);

/// Same enumeration in exact arithmetic over the full finite supports.
ExactCompoundPoissonParams lambda_params_exact(const SbmmSpec& spec, const PatternGraph& pattern);

CompoundPoissonParams to_double(const ExactCompoundPoissonParams& p);

nlohmann::ordered_json params_to_json(const CompoundPoissonParams& p);

/// P(0..kmax) of CP(lambda): P(0) = exp(-lambda), k P(k) = sum_i i lambda_i P(k-i).
std::vector<double> cp_pmf(const CompoundPoissonParams& params, int kmax);

/// exp(lambda) min(1, 1/lambda_1) with lambda = total + truncation_mass.
double c_lambda_upper(const CompoundPoissonParams& params);

/// nu^{-1}(1 - exp(-nu)); 1 at nu = 0.
double poisson_c_factor(double nu);

/// P(Po(omega) >= 2) = 1 - (1 + omega) exp(-omega).
double poisson_tail_q2(double omega);

enum class BoundVariant {
  thm31_simple,
  cor35_inhom,
  thm41_multi,
  thm51_selfloop,
  thm52_poisson_approx,
  cor55_poisson_sbm,
  regime_corpn,
};

std::string_view bound_variant_name(BoundVariant v);
BoundVariant parse_bound_variant(std::string_view name);
const std::vector<BoundVariant>& all_bound_variants();

struct BoundOptions {
  std::optional<double> c_override;
  std::optional<double> regime_lower;  // c in c n^{-1/d} <= E Y
  std::optional<double> regime_upper;  // C in E Y <= C n^{-1/d}
  double eps = 1e-10;
};

struct BoundReport {
  BoundVariant variant = BoundVariant::thm31_simple;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> ingredients;  // in insertion order
  std::vector<std::string> flags;
  std::string c_source;  // "override", "c_lambda_upper" or "poisson_factor"

  std::optional<double> ingredient(std::string_view name) const;
};

nlohmann::ordered_json report_to_json(const BoundReport& r);

/// Total-variation bound of the requested form. Hypotheses are checked and a
/// violated one raises precondition_error naming it.
BoundReport tv_bound(const SbmmSpec& spec, const PatternGraph& pattern, BoundVariant variant,
                     const BoundOptions& options = {});

}  // namespace sbmm

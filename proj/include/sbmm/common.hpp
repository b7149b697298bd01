#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace sbmm {

/// Exact rational used for structural graph quantities (densities, minima).
using Rational = boost::rational<std::int64_t>;

/// Arbitrary-precision integer for copy counts.
using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational for the exact probability path.
using ExactReal = boost::multiprecision::cpp_rational;

/// A documented hypothesis of an operation does not hold for its inputs.
/// The message names the failed hypothesis.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exhaustive enumeration would exceed its size limit.
class infeasible_error : public precondition_error {
 public:
  using precondition_error::precondition_error;
};

std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// Exact conversion of a finite double to a rational (doubles are dyadic).
ExactReal exact_from_double(double x);

/// Parses "p/q", "p" or a decimal literal such as "0.25" into an exact rational.
ExactReal parse_exact(const std::string& text);

double to_double(const ExactReal& x);

/// Binomial coefficient n choose k; zero when k > n.
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k);
BigInt binomial_big(std::uint64_t n, std::uint64_t k);
double binomial_double(double n, int k);

std::uint64_t factorial_u64(int n);

}  // namespace sbmm

#include "sbmm/common.hpp"

#include <cmath>
#include <limits>

namespace sbmm {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

ExactReal exact_from_double(double x) {
  if (!std::isfinite(x)) throw precondition_error("non-finite value has no exact rational form");
  if (x == 0.0) return ExactReal(0);
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  // mantissa * 2^53 is an exact integer
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  ExactReal result{BigInt(scaled)};
  BigInt power = BigInt(1) << std::abs(exponent);
  if (exponent >= 0) {
    result *= ExactReal(power);
  } else {
    result /= ExactReal(power);
  }
  return result;
}

ExactReal parse_exact(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const BigInt num(text.substr(0, slash));
    const BigInt den(text.substr(slash + 1));
    if (den == 0) throw precondition_error("zero denominator in rational '" + text + "'");
    return ExactReal(num, den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return ExactReal(BigInt(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const std::size_t decimals = text.size() - dot - 1;
  bool negative = false;
  if (!digits.empty() && digits.front() == '-') {
    negative = true;
    digits.erase(0, 1);
  }
  if (digits.empty()) throw precondition_error("malformed number '" + text + "'");
  BigInt den = 1;
  for (std::size_t i = 0; i < decimals; ++i) den *= 10;
  ExactReal value(BigInt(digits), den);
  return negative ? ExactReal(-value) : value;
}

double to_double(const ExactReal& x) { return x.convert_to<double>(); }

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error("binomial coefficient exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(result);
}

BigInt binomial_big(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result *= (n - k + i);
    result /= i;
  }
  return result;
}

double binomial_double(double n, int k) {
  if (k < 0 || static_cast<double>(k) > n) return 0.0;
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result *= (n - k + i) / i;
  return result;
}

std::uint64_t factorial_u64(int n) {
  if (n < 0 || n > 20) throw std::overflow_error("factorial argument out of 64-bit range");
  std::uint64_t r = 1;
  for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
  return r;
}

}  // namespace sbmm

#include "shardbus/stats.hpp"

#include <cmath>

namespace shardbus::stats {

namespace {
// 97.5th percentile of the standard normal, for the two-sided 95% level.
constexpr double kZ95 = 1.959963984540054;
}  // namespace

Result<Interval> wilson_ci(std::uint64_t successes, std::uint64_t n) {
  if (n == 0 || successes > n) return Error::DomainError;
  const double nd = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nd;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nd;
  const double center = (p + z2 / (2.0 * nd)) / denom;
  const double half =
      (kZ95 / denom) * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd));
  Interval out;
  out.lo = std::max(0.0, center - half);
  out.hi = std::min(1.0, center + half);
  return out;
}

Result<double> rule_of_three(std::uint64_t n) {
  if (n == 0) return Error::DomainError;
  return 3.0 / static_cast<double>(n);
}

}  // namespace shardbus::stats

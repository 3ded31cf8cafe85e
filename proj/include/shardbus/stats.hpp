#ifndef SHARDBUS_STATS_HPP
#define SHARDBUS_STATS_HPP

#include <cstdint>
#include <utility>

#include "shardbus/result.hpp"

namespace shardbus::stats {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// 95% Wilson score interval for `successes` out of `n` Bernoulli trials.
Result<Interval> wilson_ci(std::uint64_t successes, std::uint64_t n);

/// 95% upper bound 3/n on an event rate when zero events were observed in
/// n trials. The zero-events precondition is the caller's to enforce.
Result<double> rule_of_three(std::uint64_t n);

}  // namespace shardbus::stats

#endif  // SHARDBUS_STATS_HPP

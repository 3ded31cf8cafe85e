#ifndef SHARDBUS_CLOCK_HPP
#define SHARDBUS_CLOCK_HPP

#include <atomic>
#include <chrono>
#include <cstdint>

namespace shardbus {

/// Monotonic millisecond clock. Injectable so tests and the harness can
/// drive session expiry deterministically.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::uint64_t now_ms() = 0;
};

class SteadyClock final : public Clock {
 public:
  std::uint64_t now_ms() override {
    using namespace std::chrono;
    return static_cast<std::uint64_t>(
        duration_cast<milliseconds>(steady_clock::now().time_since_epoch())
            .count());
  }
};

/// Clock that only moves when told to. Never goes backwards.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::uint64_t start_ms = 0) : now_(start_ms) {}

  std::uint64_t now_ms() override { return now_.load(std::memory_order_relaxed); }

  void advance_ms(std::uint64_t delta) {
    now_.fetch_add(delta, std::memory_order_relaxed);
  }

 private:
  std::atomic<std::uint64_t> now_;
};

}  // namespace shardbus

#endif  // SHARDBUS_CLOCK_HPP

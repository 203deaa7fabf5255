#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>

namespace restore {

// Deterministic uniform generator. All randomness in the library flows through
// this wrapper so that results depend only on the seed, not on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    if (hi <= lo) return lo;
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Wall-clock budget. Checks happen between units of work (plan attempts,
// merge attempts, scan probes); running solves are not interrupted.
class Deadline {
 public:
  Deadline() = default;

  static Deadline none() { return Deadline{}; }

  static Deadline after_seconds(double seconds) {
    Deadline d;
    d.at_ = std::chrono::steady_clock::now() +
            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(seconds));
    return d;
  }

  bool unlimited() const { return !at_.has_value(); }

  bool expired() const {
    return at_.has_value() && std::chrono::steady_clock::now() >= *at_;
  }

  // Remaining budget in seconds; nullopt when unlimited.
  std::optional<double> remaining_sec() const {
    if (!at_) return std::nullopt;
    const auto left = std::chrono::duration<double>(
        *at_ - std::chrono::steady_clock::now());
    return left.count() > 0.0 ? left.count() : 0.0;
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> at_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace restore

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "grandpoincare/errors.hpp"

namespace gp {

/// Lebesgue exponent p in [1, inf]. Infinity is a dedicated marker so power
/// sums never see a huge float.
class Exponent {
 public:
  constexpr Exponent(double p) : p_(p) {}  // NOLINT: implicit by design
  static constexpr Exponent infinity() {
    return Exponent(std::numeric_limits<double>::infinity());
  }
  constexpr bool is_infinite() const { return std::isinf(p_); }
  constexpr double value() const { return p_; }
  friend constexpr bool operator==(Exponent a, Exponent b) { return a.p_ == b.p_; }

 private:
  double p_;
};

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic RNG (splitmix64 core). Identical streams on every platform,
/// independent of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ^ 0xd1b54a32d192ed03ULL) {
    // Warm up so trivially related seeds decorrelate.
    splitmix64(state_);
  }

  /// Derives a child seed for an independent stream (restart index, field index, ...).
  static uint64_t derive(uint64_t seed, uint64_t stream) {
    uint64_t s = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    return splitmix64(s);
  }

  uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
  }

  /// Standard normal via Box-Muller (pairs cached per instance).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

namespace detail {

inline std::atomic<int>& thread_cap_storage() {
  static std::atomic<int> cap{0};  // 0 = auto (GP_THREADS env or hardware)
  return cap;
}

inline bool& in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}

}  // namespace detail

/// Caps library parallelism; 0 restores the default (GP_THREADS env, then hardware).
inline void set_thread_cap(int n) { detail::thread_cap_storage().store(n); }

inline int effective_threads() {
  int cap = detail::thread_cap_storage().load();
  if (cap <= 0) {
    if (const char* env = std::getenv("GP_THREADS")) {
      cap = std::atoi(env);
    }
  }
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (cap <= 0 || cap > hw) cap = hw;
  return cap;
}

/// Runs body(i) for i in [0, n). Work per index is sequential and isolated, so
/// results are bit-identical for any thread count. Nested calls run serially.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const int threads = effective_threads();
  if (n == 0) return;
  if (threads <= 1 || n == 1 || detail::in_parallel_region()) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    detail::in_parallel_region() = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      body(i);
    }
    detail::in_parallel_region() = false;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

/// FNV-1a over bytes; used for config echo hashes.
inline uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace gp

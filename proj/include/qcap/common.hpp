/*
 * This file is part of the oneshot-qcap library.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCAP_COMMON_HPP
#define QCAP_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qcap {

// All entropic quantities are in bits (logarithm to base 2).
inline constexpr double k_inf = std::numeric_limits<double>::infinity();

inline constexpr double k_herm_tol = 1e-10;
inline constexpr double k_psd_tol = 1e-9;
inline constexpr double k_trace_tol = 1e-9;
inline constexpr double k_tie_tol = 1e-12;
inline constexpr double k_rank_tol = 1e-10;  // relative to largest eigenvalue

struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct grid_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double log2_positive(double x) {
  if (x <= 0.0) return -k_inf;
  return std::log2(x);
}

// Sums a vector with a fixed pairwise order so the result does not depend
// on how work was split across threads.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v, 0, v.size());
}

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ONESHOT_QCAP_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Evaluates fn(i) for i in [0, count) with each result written to its own
// slot; the caller reduces the slots, so the outcome is independent of the
// thread count.
inline std::vector<double> parallel_map(std::size_t count, int threads,
                                        const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(count, 0.0);
  int nt = resolve_thread_count(threads);
  if (nt <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  std::size_t chunk = (count + static_cast<std::size_t>(nt) - 1) / static_cast<std::size_t>(nt);
  for (int t = 0; t < nt; ++t) {
    std::size_t lo = static_cast<std::size_t>(t) * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi]() {
      for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

inline MeanSe mean_and_se(const std::vector<double>& v) {
  MeanSe r;
  r.n = v.size();
  if (r.n == 0) return r;
  r.mean = pairwise_sum(v) / static_cast<double>(r.n);
  if (r.n < 2) return r;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double d = v[i] - r.mean;
    sq[i] = d * d;
  }
  double var = pairwise_sum(sq) / static_cast<double>(r.n - 1);
  r.se = std::sqrt(var / static_cast<double>(r.n));
  return r;
}

}  // namespace qcap

#endif  // QCAP_COMMON_HPP

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace convexp {

inline constexpr double kSimplexTol = 1e-12;   // accepted as-is below this
inline constexpr double kRenormMax = 1e-9;     // renormalized below this, error above
inline constexpr int kMaxAlphabet = 64;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

inline double nats_to_bits(double v) { return v / 0.69314718055994530942; }

// 0*log(0) = 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline double logsumexp(std::span<const double> v) {
  double m = kNegInf;
  for (double a : v) m = std::max(m, a);
  if (m == kNegInf) return kNegInf;
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double a : v) s += std::exp(a - m);
  return m + std::log(s);
}

// Streaming form for callers that build terms on the fly.
class LogSumExp {
 public:
  void add(double a) { terms_.push_back(a); }
  double value() const { return logsumexp(terms_); }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<double> terms_;
};

// Runs fn(i) for i in [0, n). Results must be written to disjoint slots so the
// outcome is independent of the thread count.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  int t = std::max(1, threads);
  t = static_cast<int>(std::min<std::size_t>(t, n));
  if (t == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int k = 0; k < t; ++k) {
    pool.emplace_back([&, k]() {
      try {
        for (std::size_t i = static_cast<std::size_t>(k); i < n;
             i += static_cast<std::size_t>(t)) {
          fn(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
};

// Maximizes a unimodal f on [lo, hi] to argument resolution xtol.
inline GoldenResult golden_max(const std::function<double(double)>& f,
                               double lo, double hi, double xtol,
                               int max_iter = 200) {
  constexpr double invphi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  if (f1 >= f2) return {x1, f1};
  return {x2, f2};
}

}  // namespace convexp

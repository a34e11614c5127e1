#pragma once

// Brute-force chain enumeration for the series coefficients, independent of
// the level-by-level accumulation in the library.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace brute {

/// Calls f(chain) for every strictly increasing chain of length len with
/// entries in [lo, hi].
inline void for_each_chain(std::size_t len, std::size_t lo, std::size_t hi,
                           const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> c(len);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
    if (pos == len) {
      f(c);
      return;
    }
    for (std::size_t j = start; j <= hi; ++j) {
      c[pos] = j;
      rec(pos + 1, j + 1);
    }
  };
  rec(0, lo);
}

/// z^m coefficient magnitude of F over chains with indices <= J.
inline double f_coeff(const std::vector<double>& a, double k, std::size_t m, std::size_t J) {
  if (m == 0) return 1.0;
  const double k2 = k * k;
  double sum = 0.0;
  for_each_chain(m, 0, J, [&](const std::vector<std::size_t>& c) {
    double t = (1.0 - std::pow(k2, static_cast<double>(c[0] + 1))) / ((1.0 - k2) * a[c[0]]);
    for (std::size_t i = 1; i < m; ++i) {
      t *= (1.0 - std::pow(k2, static_cast<double>(c[i] - c[i - 1]))) / ((1.0 - k2) * a[c[i]]);
    }
    sum += t;
  });
  return sum;
}

/// z^m coefficient magnitude of W_n over chains n <= j_0 < ... < j_m <= J.
inline double w_coeff(const std::vector<double>& a, double k, std::size_t n, std::size_t m, std::size_t J) {
  const double k2 = k * k;
  double sum = 0.0;
  for_each_chain(m + 1, n, J, [&](const std::vector<std::size_t>& c) {
    double t = std::pow(k2, static_cast<double>(c[0])) / a[c[0]];
    for (std::size_t i = 1; i <= m; ++i) {
      t *= (1.0 - std::pow(k2, static_cast<double>(c[i] - c[i - 1]))) / ((1.0 - k2) * a[c[i]]);
    }
    sum += t;
  });
  return sum;
}

}  // namespace brute

#include "latnet/special.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace latnet {

namespace {

constexpr int kMaxBernoulli = 30;

const std::array<long double, kMaxBernoulli + 1>& bernoulli_table() {
  static const auto table = [] {
    std::array<long double, kMaxBernoulli + 1> b{};
    // Pascal row C(n+1, k), rebuilt per n.
    b[0] = 1.0L;
    for (int n = 1; n <= kMaxBernoulli; ++n) {
      long double sum = 0.0L;
      long double binom = 1.0L;  // C(n+1, 0)
      for (int k = 0; k < n; ++k) {
        sum += binom * b[k];
        binom = binom * static_cast<long double>(n + 1 - k) / static_cast<long double>(k + 1);
      }
      b[n] = -sum / static_cast<long double>(n + 1);
      if (n > 1 && n % 2 == 1) b[n] = 0.0L;
    }
    return b;
  }();
  return table;
}

}  // namespace

double bernoulli_number(int n) {
  if (n < 0 || n > kMaxBernoulli) {
    throw std::out_of_range("bernoulli_number: n = " + std::to_string(n) + " outside [0, 30]");
  }
  return static_cast<double>(bernoulli_table()[n]);
}

double bernoulli_poly(int n, double x) {
  if (n < 0 || n > 12) {
    throw std::out_of_range("bernoulli_poly: n = " + std::to_string(n) + " outside [0, 12]");
  }
  const auto& b = bernoulli_table();
  // Horner over B_n(x) = sum_k C(n,k) B_k x^{n-k}, highest power first.
  long double acc = 0.0L;
  long double binom = 1.0L;  // C(n, 0)
  for (int k = 0; k <= n; ++k) {
    acc = acc * x + binom * b[k];
    binom = binom * static_cast<long double>(n - k) / static_cast<long double>(k + 1);
  }
  return static_cast<double>(acc);
}

double riemann_zeta(double x) {
  if (!(x >= 1.001)) {
    throw std::domain_error("riemann_zeta: argument " + std::to_string(x) +
                            " must be >= 1.001");
  }
  constexpr int n = 20;
  const long double s = x;
  long double sum = 0.0L;
  for (int h = n - 1; h >= 1; --h) sum += std::pow(static_cast<long double>(h), -s);
  const long double ln = n;
  sum += std::pow(ln, 1.0L - s) / (s - 1.0L);
  sum += 0.5L * std::pow(ln, -s);
  // Corrections B_{2k}/(2k)! * s(s+1)...(s+2k-2) * n^{-s-2k+1}.
  long double rising = s;
  long double fact = 2.0L;
  for (int k = 1; k <= 6; ++k) {
    sum += bernoulli_table()[2 * k] / fact * rising * std::pow(ln, -s - 2.0L * k + 1.0L);
    rising *= (s + 2.0L * k - 1.0L) * (s + 2.0L * k);
    fact *= (2.0L * k + 1.0L) * (2.0L * k + 2.0L);
  }
  return static_cast<double>(sum);
}

u128 stirling2_exact(int n, int k) {
  if (n < 0 || k < 0 || n > 30 || k > 30) {
    throw std::out_of_range("stirling2: arguments (" + std::to_string(n) + ", " +
                            std::to_string(k) + ") outside [0, 30]");
  }
  static const auto table = [] {
    std::array<std::array<u128, 31>, 31> t{};
    t[0][0] = 1;
    for (int i = 1; i <= 30; ++i) {
      for (int j = 1; j <= i; ++j) {
        t[i][j] = static_cast<u128>(j) * t[i - 1][j] + t[i - 1][j - 1];
      }
    }
    return t;
  }();
  return table[n][k];
}

double stirling2(int n, int k) { return static_cast<double>(stirling2_exact(n, k)); }

std::uint64_t eulerian(int n, int k) {
  if (n < 0 || n > 15) {
    throw std::out_of_range("eulerian: n = " + std::to_string(n) + " outside [0, 15]");
  }
  if (k < 0 || k > n) return n == 0 && k == 0 ? 1 : 0;
  static const auto table = [] {
    std::array<std::array<std::uint64_t, 16>, 16> t{};
    t[0][0] = 1;
    for (int i = 1; i <= 15; ++i) {
      for (int j = 0; j < i; ++j) {
        std::uint64_t a = static_cast<std::uint64_t>(j + 1) * t[i - 1][j];
        std::uint64_t b = j > 0 ? static_cast<std::uint64_t>(i - j) * t[i - 1][j - 1] : 0;
        t[i][j] = a + b;
      }
    }
    return t;
  }();
  if (n == 0) return k == 0 ? 1 : 0;
  return table[n][k];
}

double factorial(int n) {
  if (n < 0 || n > 170) {
    throw std::out_of_range("factorial: n = " + std::to_string(n) + " outside [0, 170]");
  }
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

long double log_factorial(int n) {
  if (n < 0) throw std::out_of_range("log_factorial: negative argument");
  return std::lgamma(static_cast<long double>(n) + 1.0L);
}

}  // namespace latnet

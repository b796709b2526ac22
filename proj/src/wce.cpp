#include "latnet/wce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "latnet/special.hpp"

namespace latnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long double kTermGuard = 1e300L;

// Number of cosine terms so that 2 sum_{h>H} (2 pi h)^{-alpha} < 1e-12, using
// the integral bound 2 (2 pi)^{-alpha} H^{1-alpha} / (alpha - 1).
std::size_t odd_series_terms(int alpha) {
  const double c = 2.0 * std::pow(kTwoPi, -alpha) / (alpha - 1);
  return static_cast<std::size_t>(std::ceil(std::pow(c / 1e-12, 1.0 / (alpha - 1)))) + 1;
}

void check_kernel_supported(const SpaceSetting& setting) {
  switch (setting.kind()) {
    case SpaceKind::SobolevShifted: return;
    case SpaceKind::KorobovHilbert:
      if (2 * setting.alpha() > 12) {
        throw std::invalid_argument("kernel: Korobov smoothness above 6 is not supported");
      }
      return;
    case SpaceKind::KorobovNonHilbert:
      if (setting.alpha() > 12) {
        throw std::invalid_argument("kernel: Korobov smoothness above 12 is not supported");
      }
      return;
  }
}

// Per-point order polynomials prod_{j<J} (1 + sum_m g_{j,m} omega(t_{k,j}) x^m)
// for every lattice point, stored contiguously with stride `cap`.
class OrderState {
 public:
  OrderState(std::size_t n, std::size_t cap) : n_(n), cap_(cap), coef_(n * cap, 0.0L) {
    for (std::size_t k = 0; k < n; ++k) coef_[k * cap] = 1.0L;
  }

  std::size_t degree() const { return degree_; }

  // Multiplies point k's polynomial by 1 + sum_m f[m-1] x^m.
  void multiply(std::size_t k, const long double* f, int d) {
    long double* p = &coef_[k * cap_];
    const std::size_t top = degree_ + static_cast<std::size_t>(d);
    for (std::size_t i = top; i >= 1; --i) {
      long double acc = i <= degree_ ? p[i] : 0.0L;
      for (int m = 1; m <= d && static_cast<std::size_t>(m) <= i; ++m) {
        std::size_t src = i - static_cast<std::size_t>(m);
        if (src <= degree_) acc += f[m - 1] * p[src];
      }
      p[i] = acc;
    }
  }

  void grow(int d) { degree_ += static_cast<std::size_t>(d); }

  const long double* poly(std::size_t k) const { return &coef_[k * cap_]; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_, cap_;
  std::size_t degree_ = 0;
  std::vector<long double> coef_;
};

long double checked(long double v, std::size_t order) {
  if (!std::isfinite(v) || std::fabs(v) > kTermGuard) {
    throw std::overflow_error("worst-case error: partial product exceeds 1e300 at order " +
                              std::to_string(order));
  }
  return v;
}

// sum_{l >= shift, l - shift >= skip} Gamma_l p[l - shift]
long double shifted_order_sum(const WeightScheme& w, const long double* p, std::size_t degree,
                              std::size_t shift, std::size_t skip) {
  long double acc = 0.0L;
  for (std::size_t l = skip; l <= degree; ++l) {
    if (p[l] == 0.0L) continue;
    acc += checked(w.order_factor(l + shift) * p[l], l + shift);
  }
  return acc;
}

void fill_factors(const WeightScheme& w, std::size_t j, double omega, long double* out) {
  for (int m = 1; m <= w.degree(); ++m) {
    out[m - 1] = static_cast<long double>(w.dim_factor(j, m)) * omega;
  }
}

OrderState build_state(const GeneratingVector& gv, const WeightScheme& w,
                       const std::vector<double>& table, std::size_t extra_degree) {
  const std::size_t n = gv.modulus();
  const std::size_t s = gv.dimension();
  const int d = w.degree();
  OrderState state(n, (s + extra_degree) * static_cast<std::size_t>(d) + 1);
  std::vector<long double> f(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < s; ++j) {
    const std::uint64_t z = gv[j];
    for (std::size_t k = 0; k < n; ++k) {
      // row k holds point index k+1
      std::uint64_t r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(k + 1) * z) % n);
      fill_factors(w, j, table[r], f.data());
      state.multiply(k, f.data(), d);
    }
    state.grow(d);
  }
  return state;
}

void require_weights(const WeightScheme& w, std::size_t s) {
  if (w.dimension() < s) {
    throw std::invalid_argument("weights defined for " + std::to_string(w.dimension()) +
                                " coordinates, need " + std::to_string(s));
  }
}

double bound_scale(const SpaceSetting& setting, double lambda) {
  switch (setting.kind()) {
    case SpaceKind::SobolevShifted: return varrho(1, lambda) * std::pow(2.0, lambda);
    case SpaceKind::KorobovHilbert: return varrho(setting.alpha(), lambda);
    case SpaceKind::KorobovNonHilbert: return varrho(setting.alpha(), lambda / 2.0);
  }
  return 0.0;
}

}  // namespace

double kernel_omega(const SpaceSetting& setting, double x) {
  check_kernel_supported(setting);
  const int alpha = setting.alpha();
  switch (setting.kind()) {
    case SpaceKind::SobolevShifted: return bernoulli_poly(2, x);
    case SpaceKind::KorobovHilbert: {
      double sign = alpha % 2 == 1 ? 1.0 : -1.0;
      return sign * bernoulli_poly(2 * alpha, x) / factorial(2 * alpha);
    }
    case SpaceKind::KorobovNonHilbert: {
      if (alpha % 2 == 0) {
        double sign = (alpha / 2) % 2 == 1 ? 1.0 : -1.0;
        return sign * bernoulli_poly(alpha, x) / factorial(alpha);
      }
      const std::size_t terms = odd_series_terms(alpha);
      double acc = 0.0;
      for (std::size_t h = terms; h >= 1; --h) {
        acc += std::cos(kTwoPi * static_cast<double>(h) * x) /
               std::pow(kTwoPi * static_cast<double>(h), alpha);
      }
      return 2.0 * acc;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<double> kernel_table(const SpaceSetting& setting, std::size_t n) {
  check_kernel_supported(setting);
  std::vector<double> t(n);
  if (setting.kind() == SpaceKind::KorobovNonHilbert && setting.alpha() % 2 == 1) {
    // cos(2 pi h k / N) depends on h k mod N only.
    std::vector<double> cosines(n);
    for (std::size_t r = 0; r < n; ++r) cosines[r] = std::cos(kTwoPi * r / static_cast<double>(n));
    const std::size_t terms = odd_series_terms(setting.alpha());
    std::vector<double> coeff(terms + 1);
    for (std::size_t h = 1; h <= terms; ++h) {
      coeff[h] = 2.0 / std::pow(kTwoPi * static_cast<double>(h), setting.alpha());
    }
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t h = terms; h >= 1; --h) acc += coeff[h] * cosines[(h * k) % n];
      t[k] = acc;
    }
    return t;
  }
  for (std::size_t k = 0; k < n; ++k) t[k] = kernel_omega(setting, static_cast<double>(k) / n);
  return t;
}

double wce_criterion(const GeneratingVector& gv, const WeightScheme& w,
                     const SpaceSetting& setting) {
  require_weights(w, gv.dimension());
  const std::size_t n = gv.modulus();
  const auto table = kernel_table(setting, n);
  const OrderState state = build_state(gv, w, table, 0);
  long double acc = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    acc += shifted_order_sum(w, state.poly(k), state.degree(), 0, 1);
  }
  return static_cast<double>(acc / static_cast<long double>(n));
}

double worst_case_error(const GeneratingVector& gv, const WeightScheme& w,
                        const SpaceSetting& setting) {
  double c = wce_criterion(gv, w, setting);
  if (setting.kind() == SpaceKind::KorobovNonHilbert) return c;
  return std::sqrt(std::max(c, 0.0));
}

double theoretical_bound(std::size_t n, const WeightScheme& w, double lambda,
                         const SpaceSetting& setting) {
  if (!(lambda > setting.lambda_lower() && lambda <= 1.0)) {
    throw std::domain_error("theoretical_bound: lambda " + std::to_string(lambda) +
                            " outside (" + std::to_string(setting.lambda_lower()) + ", 1]");
  }
  const long double sum = weighted_power_sum(w, lambda, bound_scale(setting, lambda)).value;
  const long double inner = 2.0L / static_cast<long double>(n) * sum;
  const long double exponent =
      setting.kind() == SpaceKind::KorobovNonHilbert ? 1.0L / lambda : 1.0L / (2.0L * lambda);
  return static_cast<double>(std::pow(inner, exponent));
}

std::vector<double> lambda_grid(const SpaceSetting& setting, std::size_t count, double offset) {
  const double lo = setting.lambda_lower() + offset;
  const double hi = 1.0;
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = hi;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  g.back() = hi;
  return g;
}

namespace {

// Criterion for each candidate z given the per-point state of the prefix.
// Returns NaN for z outside Z_N.
std::vector<double> evaluate_candidates(const OrderState& state, const WeightScheme& w,
                                        std::size_t j, const std::vector<double>& table,
                                        unsigned threads) {
  const std::size_t n = state.size();
  const int d = w.degree();
  const std::size_t deg = state.degree();
  // Fixed part and per-m coefficients of each point.
  std::vector<double> base(n);
  std::vector<double> coef(n * static_cast<std::size_t>(d));
  long double fixed = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    const long double* p = state.poly(k);
    fixed += shifted_order_sum(w, p, deg, 0, 1);
    for (int m = 1; m <= d; ++m) {
      long double b = shifted_order_sum(w, p, deg, static_cast<std::size_t>(m), 0);
      coef[k * d + (m - 1)] = static_cast<double>(checked(w.dim_factor(j, m) * b, deg + m));
    }
  }
  // Only the kernel-weighted sum depends on z: sum_k c_k omega((k+1) z mod N).
  std::vector<double> ck(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int m = 0; m < d; ++m) acc += coef[k * d + m];
    ck[k] = acc;
  }
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  const long double fixed_mean = fixed / static_cast<long double>(n);
  auto work = [&](std::size_t z_lo, std::size_t z_hi) {
    for (std::size_t z = z_lo; z < z_hi; ++z) {
      if (!in_unit_group(z, n)) continue;
      long double acc = 0.0L;
      std::size_t r = z % n;
      for (std::size_t k = 0; k < n; ++k) {
        acc += ck[k] * table[r];
        r += z;
        if (r >= n) r -= n;
      }
      out[z] = static_cast<double>(fixed_mean + acc / static_cast<long double>(n));
    }
  };
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (t == 1 || n < 64) {
    work(1, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + t - 1) / t;
    for (unsigned i = 0; i < t; ++i) {
      std::size_t lo = std::max<std::size_t>(1, i * chunk);
      std::size_t hi = std::min(n, (i + 1) * chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

std::size_t pick_candidate(const std::vector<double>& values) {
  double best = std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (!std::isnan(v)) best = std::min(best, v);
  }
  const double slack = 1e-14 * std::fabs(best);
  for (std::size_t z = 0; z < values.size(); ++z) {
    if (!std::isnan(values[z]) && values[z] <= best + slack) return z;
  }
  throw std::logic_error("cbc: no admissible candidate");
}

}  // namespace

std::vector<double> cbc_candidates(const GeneratingVector& prefix, const WeightScheme& w,
                                   const SpaceSetting& setting) {
  const std::size_t j = prefix.dimension();
  require_weights(w, j + 1);
  const std::size_t n = prefix.modulus();
  const auto table = kernel_table(setting, n);
  const OrderState state = build_state(prefix, w, table, 1);
  return evaluate_candidates(state, w, j, table, 1);
}

CbcResult cbc_construct(std::size_t n, std::size_t s, const WeightScheme& w,
                        const SpaceSetting& setting, const CbcOptions& options) {
  if (n < 2) throw std::invalid_argument("cbc: N must be at least 2");
  require_weights(w, s);
  const auto table = kernel_table(setting, n);
  const int d = w.degree();
  OrderState state(n, s * static_cast<std::size_t>(d) + 1);
  std::vector<std::uint64_t> z;
  CbcResult result;
  std::vector<long double> f(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < s; ++j) {
    auto values = evaluate_candidates(state, w, j, table, options.threads);
    const std::size_t zj = pick_candidate(values);
    z.push_back(zj);
    result.trace.push_back(values[zj]);
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t r = static_cast<std::size_t>((static_cast<unsigned __int128>(k + 1) * zj) % n);
      fill_factors(w, j, table[r], f.data());
      state.multiply(k, f.data(), d);
    }
    state.grow(d);
  }
  result.gv = GeneratingVector(n, std::move(z));
  return result;
}

WorstCaseReport bound_report(const GeneratingVector& gv, const WeightScheme& w,
                             const SpaceSetting& setting, std::size_t grid_points) {
  WorstCaseReport r;
  r.error = worst_case_error(gv, w, setting);
  r.lambdas = lambda_grid(setting, grid_points);
  const WeightScheme ws = w.prefix(gv.dimension());
  for (double lam : r.lambdas) {
    double b = theoretical_bound(gv.modulus(), ws, lam, setting);
    r.bounds.push_back(b);
    if (!(r.error <= b)) r.dominated = false;
  }
  return r;
}

}  // namespace latnet

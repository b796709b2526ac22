#include "latnet/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "latnet/special.hpp"

namespace latnet {

namespace {

using Poly = std::vector<long double>;

constexpr long double kTwoPi = 2.0L * std::numbers::pi_v<long double>;
constexpr long double kOverflow = 1e4900L;
constexpr std::size_t kMaxEnumerationDim = 20;

void guard(long double v, std::size_t order, const char* what) {
  if (!std::isfinite(v) || std::fabs(v) > kOverflow) {
    throw std::overflow_error(std::string(what) + ": partial product overflows at order " +
                              std::to_string(order));
  }
}

// p <- p * (1 + sum_{m=1}^{D} c[m-1] x^m)
void mul_one_plus(Poly& p, std::span<const long double> c) {
  const std::size_t old = p.size();
  p.resize(old + c.size(), 0.0L);
  for (std::size_t i = p.size(); i-- > 1;) {
    long double acc = p[i];
    for (std::size_t m = 1; m <= c.size() && m <= i; ++m) {
      if (i - m < old) acc += c[m - 1] * p[i - m];
    }
    p[i] = acc;
  }
}

// p <- p * (sum_{m=1}^{D} c[m-1] x^m)
Poly mul_pure(const Poly& p, std::span<const long double> c) {
  Poly out(p.size() + c.size(), 0.0L);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0L) continue;
    for (std::size_t m = 1; m <= c.size(); ++m) out[i + m] += p[i] * c[m - 1];
  }
  return out;
}

// Coefficients of prod_j (1 + sum_m table[j][m-1] x^m).
Poly product_with_one(const std::vector<std::vector<long double>>& table, const char* what) {
  Poly p{1.0L};
  for (const auto& row : table) {
    mul_one_plus(p, row);
    for (std::size_t i = 0; i < p.size(); ++i) guard(p[i], i, what);
  }
  return p;
}

long double pow_factorial(int n, long double exponent) {
  return std::exp(exponent * log_factorial(n));
}

// Depth-first walk over all subsets of {0..s-1}, carrying one polynomial per
// channel: prod_{j in u} (sum_m coeff[j][m-1] x^m).
class SubsetWalker {
 public:
  using Table = std::vector<std::vector<long double>>;
  using Visit = std::function<void(std::size_t order, const std::vector<Poly>&)>;

  SubsetWalker(std::size_t s, std::vector<Table> channels) : s_(s), channels_(std::move(channels)) {
    if (s_ > kMaxEnumerationDim) {
      throw std::invalid_argument("subset enumeration limited to s <= " +
                                  std::to_string(kMaxEnumerationDim));
    }
  }

  void run(const Visit& visit) {
    std::vector<Poly> start(channels_.size(), Poly{1.0L});
    walk(0, 0, start, visit);
  }

 private:
  void walk(std::size_t first, std::size_t order, const std::vector<Poly>& polys,
            const Visit& visit) {
    visit(order, polys);
    for (std::size_t j = first; j < s_; ++j) {
      std::vector<Poly> next;
      next.reserve(polys.size());
      for (std::size_t c = 0; c < polys.size(); ++c) {
        next.push_back(mul_pure(polys[c], channels_[c][j]));
      }
      walk(j + 1, order + 1, next, visit);
    }
  }

  std::size_t s_;
  std::vector<Table> channels_;
};

// g_{j,m} table of a weight scheme as long doubles.
SubsetWalker::Table gamma_table(const WeightScheme& w, std::size_t s) {
  SubsetWalker::Table t(s, std::vector<long double>(static_cast<std::size_t>(w.degree())));
  for (std::size_t j = 0; j < s; ++j) {
    for (int m = 1; m <= w.degree(); ++m) t[j][m - 1] = w.dim_factor(j, m);
  }
  return t;
}

long double gamma_from_poly(const WeightScheme& w, const Poly& p) {
  long double g = 0.0L;
  for (std::size_t l = 0; l < p.size(); ++l) {
    if (p[l] != 0.0L) g += w.order_factor(l) * p[l];
  }
  return g;
}

// S(alpha, m) * (scale * b_j)^m for m = 1..alpha.
SubsetWalker::Table smoothness_table(std::span<const double> b, std::size_t s, int alpha,
                                     long double scale) {
  SubsetWalker::Table t(s, std::vector<long double>(static_cast<std::size_t>(alpha)));
  for (std::size_t j = 0; j < s; ++j) {
    long double pw = 1.0L;
    for (int m = 1; m <= alpha; ++m) {
      pw *= scale * static_cast<long double>(b[j]);
      t[j][m - 1] = static_cast<long double>(stirling2(alpha, m)) * pw;
    }
  }
  return t;
}

// sum_l (l+1)! p_l
long double factorial_weighted(const Poly& p) {
  long double acc = 0.0L;
  for (std::size_t l = 0; l < p.size(); ++l) {
    if (p[l] != 0.0L) acc += std::exp(log_factorial(static_cast<int>(l) + 1)) * p[l];
  }
  return acc;
}

void require_length(std::span<const double> b, std::size_t s, const char* what) {
  if (b.size() < s) {
    throw std::invalid_argument(std::string(what) + ": decay sequence has " +
                                std::to_string(b.size()) + " entries, need " + std::to_string(s));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// DecaySequence

DecaySequence DecaySequence::algebraic(double eta, double q, double normalizer, double p_star) {
  if (!(eta > 0) || !(q > 1) || !(normalizer > 0)) {
    throw std::invalid_argument("decay sequence: need eta > 0, q > 1, normalizer > 0");
  }
  if (!(p_star > 0 && p_star < 1)) {
    throw std::invalid_argument("decay sequence: summability exponent must lie in (0,1)");
  }
  DecaySequence d;
  d.closed_form_ = true;
  d.eta_ = eta;
  d.q_ = q;
  d.normalizer_ = normalizer;
  d.p_star_ = p_star;
  return d;
}

DecaySequence DecaySequence::from_values(std::vector<double> values, double p_star) {
  if (!(p_star > 0 && p_star < 1)) {
    throw std::invalid_argument("decay sequence: summability exponent must lie in (0,1)");
  }
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!(values[j] > 0)) throw std::invalid_argument("decay sequence: b_j must be positive");
    if (j > 0 && values[j] > values[j - 1]) {
      throw std::invalid_argument("decay sequence: b_j must be non-increasing");
    }
  }
  DecaySequence d;
  d.closed_form_ = false;
  d.explicit_ = std::move(values);
  d.p_star_ = p_star;
  return d;
}

double DecaySequence::operator()(std::size_t j) const {
  if (j == 0) throw std::out_of_range("decay sequence is indexed from 1");
  if (closed_form_) return eta_ / std::pow(static_cast<double>(j), q_) / normalizer_;
  if (j > explicit_.size()) {
    throw std::out_of_range("decay sequence: index " + std::to_string(j) + " beyond explicit length " +
                            std::to_string(explicit_.size()));
  }
  return explicit_[j - 1];
}

std::vector<double> DecaySequence::values(std::size_t s) const {
  std::vector<double> v(s);
  for (std::size_t j = 0; j < s; ++j) v[j] = (*this)(j + 1);
  return v;
}

double DecaySequence::power_sum(double p) const {
  if (!closed_form_) {
    double acc = 0.0;
    for (double v : explicit_) acc += std::pow(v, p);
    return acc;
  }
  const double exponent = q_ * p;
  if (exponent <= 1.0) return std::numeric_limits<double>::infinity();
  const double scale = std::pow(eta_ / normalizer_, p);
  if (exponent >= 1.001) return scale * riemann_zeta(exponent);
  // Too close to the pole for the zeta routine: direct sum until the integral
  // tail J^{1-e}/(e-1) is below 1e-14 relative, capped at 1e7 terms.
  double acc = 0.0;
  std::size_t j = 1;
  for (; j < 10000000; ++j) {
    acc += std::pow(static_cast<double>(j), -exponent);
    double tail = std::pow(static_cast<double>(j), 1.0 - exponent) / (exponent - 1.0);
    if (tail < 1e-14 * acc) break;
  }
  acc += std::pow(static_cast<double>(j), 1.0 - exponent) / (exponent - 1.0);
  return scale * acc;
}

// ---------------------------------------------------------------------------
// WeightScheme

WeightScheme WeightScheme::product(std::vector<double> gamma) {
  WeightScheme w;
  w.kind_ = Kind::Product;
  w.degree_ = 1;
  w.order_.assign(gamma.size() + 1, 1.0L);
  for (double g : gamma) {
    if (!(g >= 0)) throw std::invalid_argument("product weights must be non-negative");
    w.dims_.push_back({g});
  }
  return w;
}

WeightScheme WeightScheme::pod(std::vector<long double> order_factors,
                               std::vector<double> dim_factors) {
  if (order_factors.size() < dim_factors.size() + 1) {
    throw std::invalid_argument("POD weights need order factors Gamma_0..Gamma_s");
  }
  if (order_factors[0] != 1.0L) throw std::invalid_argument("POD weights need Gamma_0 = 1");
  WeightScheme w;
  w.kind_ = Kind::POD;
  w.degree_ = 1;
  w.order_ = std::move(order_factors);
  w.order_.resize(dim_factors.size() + 1);
  for (double g : dim_factors) w.dims_.push_back({g});
  return w;
}

WeightScheme WeightScheme::spod(int degree, std::vector<long double> order_factors,
                                std::vector<std::vector<double>> dim_factors) {
  if (degree < 1) throw std::invalid_argument("SPOD weights need degree >= 1");
  const std::size_t s = dim_factors.size();
  if (order_factors.size() < s * static_cast<std::size_t>(degree) + 1) {
    throw std::invalid_argument("SPOD weights need order factors up to s*degree");
  }
  if (order_factors[0] != 1.0L) throw std::invalid_argument("SPOD weights need Gamma_0 = 1");
  for (const auto& row : dim_factors) {
    if (row.size() != static_cast<std::size_t>(degree)) {
      throw std::invalid_argument("SPOD weights: every coordinate needs `degree` factors");
    }
  }
  WeightScheme w;
  w.kind_ = Kind::SPOD;
  w.degree_ = degree;
  w.order_ = std::move(order_factors);
  w.order_.resize(s * static_cast<std::size_t>(degree) + 1);
  w.dims_ = std::move(dim_factors);
  return w;
}

long double WeightScheme::gamma(std::span<const std::size_t> u) const {
  Poly p{1.0L};
  for (std::size_t j : u) {
    if (j >= dims_.size()) throw std::out_of_range("weight index beyond dimension");
    std::vector<long double> c(dims_[j].begin(), dims_[j].end());
    p = mul_pure(p, c);
  }
  return gamma_from_poly(*this, p);
}

WeightScheme WeightScheme::prefix(std::size_t s) const {
  if (s > dims_.size()) throw std::out_of_range("weight prefix beyond dimension");
  WeightScheme w = *this;
  w.dims_.resize(s);
  w.order_.resize(s * static_cast<std::size_t>(degree_) + 1);
  return w;
}

// ---------------------------------------------------------------------------
// Rate plans and weight construction

double varrho(int alpha, double lambda) {
  const double x = 2.0 * alpha * lambda;
  return 2.0 * riemann_zeta(x) / std::pow(2.0 * std::numbers::pi, x);
}

RatePlan select_rate_plan(double p_star, SpaceKind kind, double delta) {
  if (!(p_star > 0 && p_star < 1)) {
    throw std::invalid_argument("select_rate_plan: p* must lie in (0,1)");
  }
  if (!(delta > 0 && delta < 0.5)) {
    throw std::invalid_argument("select_rate_plan: delta must lie in (0,1/2)");
  }
  // floor() guards: 1/p* is often a binary approximation of an exact value.
  constexpr double eps = 1e-12;
  RatePlan plan;
  plan.p_star = p_star;
  plan.delta = delta;
  switch (kind) {
    case SpaceKind::SobolevShifted:
      plan.setting = SpaceSetting::sobolev_shifted();
      plan.alpha = 1;
      plan.lambda = p_star <= 2.0 / 3.0 ? 1.0 / (2.0 - 2.0 * delta) : p_star / (2.0 - p_star);
      plan.rate = std::min(1.0 - delta, 1.0 / p_star - 0.5);
      break;
    case SpaceKind::KorobovHilbert:
      plan.alpha = static_cast<int>(std::floor(1.0 / p_star + 0.5 + eps));
      plan.setting = SpaceSetting::korobov_hilbert(plan.alpha);
      plan.lambda = p_star / (2.0 - p_star);
      plan.rate = 1.0 / p_star - 0.5;
      break;
    case SpaceKind::KorobovNonHilbert:
      plan.alpha = static_cast<int>(std::floor(1.0 / p_star + eps)) + 1;
      plan.setting = SpaceSetting::korobov_non_hilbert(plan.alpha);
      plan.lambda = p_star;
      plan.rate = 1.0 / p_star;
      break;
  }
  return plan;
}

double lambda_threshold(const RatePlan& plan) {
  const double pole = plan.setting.lambda_lower();
  double summability = 0.0;
  switch (plan.setting.kind()) {
    case SpaceKind::SobolevShifted:
    case SpaceKind::KorobovHilbert:
      summability = plan.p_star / (2.0 - plan.p_star);
      break;
    case SpaceKind::KorobovNonHilbert:
      summability = plan.p_star;
      break;
  }
  return std::max(pole, summability);
}

namespace {

void require_admissible(const RatePlan& plan) {
  const double pole = plan.setting.lambda_lower();
  const double lam = plan.lambda;
  if (!(lam > pole) || lam > 1.0 || lam < lambda_threshold(plan) * (1.0 - 1e-12)) {
    throw std::domain_error("weights inadmissible for this lambda (lambda = " +
                            std::to_string(lam) + ", threshold " +
                            std::to_string(lambda_threshold(plan)) + ")");
  }
}

std::vector<long double> factorial_power_orders(std::size_t max_order, long double exponent) {
  std::vector<long double> g(max_order + 1);
  for (std::size_t l = 0; l <= max_order; ++l) {
    g[l] = pow_factorial(static_cast<int>(l) + 1, exponent);
    if (!std::isfinite(g[l])) {
      throw std::overflow_error("weight order factor overflows at order " + std::to_string(l) +
                                "; maximum supported order is " + std::to_string(l - 1));
    }
  }
  return g;
}

}  // namespace

WeightScheme build_weights(const SpaceSetting& setting, const DecaySequence& b,
                           const RatePlan& plan, std::size_t s) {
  if (!(setting == plan.setting)) {
    throw std::invalid_argument("build_weights: plan was made for " + plan.setting.name() +
                                ", not " + setting.name());
  }
  const double lam = plan.lambda;
  if (!(lam > setting.lambda_lower() && lam <= 1.0)) {
    throw std::domain_error("build_weights: lambda outside the admissible interval");
  }
  const auto bv = b.values(s);
  const long double two_pi = kTwoPi;
  switch (setting.kind()) {
    case SpaceKind::SobolevShifted: {
      const long double e = 2.0L / (1.0L + lam);
      const long double c =
          std::sqrt(std::pow(two_pi, 2.0L * lam) /
                    (2.0L * riemann_zeta(2.0 * lam) * std::pow(2.0L, static_cast<long double>(lam))));
      std::vector<double> g(s);
      for (std::size_t j = 0; j < s; ++j) g[j] = static_cast<double>(std::pow(c * bv[j], e));
      return WeightScheme::pod(factorial_power_orders(s, e), std::move(g));
    }
    case SpaceKind::KorobovHilbert: {
      const int alpha = setting.alpha();
      const long double e = 2.0L / (1.0L + lam);
      const long double root = std::sqrt(2.0L * riemann_zeta(2.0 * alpha * lam));
      const long double lead = std::pow(two_pi, 2.0L * alpha);
      std::vector<std::vector<double>> g(s, std::vector<double>(alpha));
      for (std::size_t j = 0; j < s; ++j) {
        for (int m = 1; m <= alpha; ++m) {
          long double inner =
              std::pow(static_cast<long double>(bv[j]), m) * stirling2(alpha, m) / root;
          g[j][m - 1] = static_cast<double>(lead * std::pow(inner, e));
        }
      }
      return WeightScheme::spod(alpha, factorial_power_orders(s * alpha, e), std::move(g));
    }
    case SpaceKind::KorobovNonHilbert: {
      const int alpha = setting.alpha();
      const long double lead = std::pow(two_pi, static_cast<long double>(alpha));
      std::vector<std::vector<double>> g(s, std::vector<double>(alpha));
      for (std::size_t j = 0; j < s; ++j) {
        for (int m = 1; m <= alpha; ++m) {
          g[j][m - 1] = static_cast<double>(
              lead * std::pow(static_cast<long double>(bv[j]), m) * stirling2(alpha, m));
        }
      }
      return WeightScheme::spod(alpha, factorial_power_orders(s * alpha, 1.0L), std::move(g));
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Subset sums

SubsetSum weighted_power_sum(const WeightScheme& w, double lambda, long double scale) {
  const std::size_t s = w.dimension();
  std::vector<std::vector<long double>> table(s, std::vector<long double>(w.degree()));
  for (std::size_t j = 0; j < s; ++j) {
    for (int m = 1; m <= w.degree(); ++m) {
      table[j][m - 1] = scale * std::pow(static_cast<long double>(w.dim_factor(j, m)),
                                         static_cast<long double>(lambda));
    }
  }
  Poly p = product_with_one(table, "weighted_power_sum");
  SubsetSum out;
  out.exact = w.degree() == 1;
  for (std::size_t l = 1; l < p.size(); ++l) {
    long double term = std::pow(w.order_factor(l), static_cast<long double>(lambda)) * p[l];
    guard(term, l, "weighted_power_sum");
    out.value += term;
  }
  return out;
}

void for_each_subset(std::size_t s, const std::function<void(std::span<const std::size_t>)>& f) {
  if (s > 24) throw std::invalid_argument("for_each_subset: s must be <= 24");
  std::vector<std::size_t> u;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
    u.clear();
    for (std::size_t j = 0; j < s; ++j) {
      if (mask >> j & 1U) u.push_back(j);
    }
    f(u);
  }
}

// ---------------------------------------------------------------------------
// Norm bounds

double norm_bound(const SpaceSetting& setting, std::span<const double> b, double c_bound,
                  const WeightScheme& w, std::size_t s) {
  require_length(b, s, "norm_bound");
  if (w.dimension() < s) throw std::invalid_argument("norm_bound: weights shorter than s");
  if (c_bound == 0.0) return 0.0;
  const WeightScheme ws = w.prefix(s);
  switch (setting.kind()) {
    case SpaceKind::SobolevShifted: {
      const long double lead = 16.0L * std::pow(static_cast<long double>(c_bound), 4);
      if (ws.degree() == 1) {
        // sum_l ((l+1)!)^2 / Gamma_l * e_l(b_j^2 / g_j)
        std::vector<std::vector<long double>> table(s, std::vector<long double>(1));
        for (std::size_t j = 0; j < s; ++j) {
          table[j][0] = static_cast<long double>(b[j]) * b[j] / ws.dim_factor(j, 1);
        }
        Poly p = product_with_one(table, "norm_bound");
        long double acc = 0.0L;
        for (std::size_t l = 0; l < p.size(); ++l) {
          acc += pow_factorial(static_cast<int>(l) + 1, 2.0L) / ws.order_factor(l) * p[l];
          guard(acc, l, "norm_bound");
        }
        return static_cast<double>(lead * acc);
      }
      long double acc = 0.0L;
      SubsetWalker walker(s, {gamma_table(ws, s)});
      std::vector<double> bs(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(s));
      std::vector<std::size_t> dummy;
      // Numerator is separable; recompute it from the subset order and product.
      for_each_subset(s, [&](std::span<const std::size_t> u) {
        long double prod = 1.0L;
        for (auto j : u) prod *= bs[j];
        long double num = std::exp(log_factorial(static_cast<int>(u.size()) + 1)) * prod;
        acc += num * num / ws.gamma(u);
      });
      return static_cast<double>(lead * acc);
    }
    case SpaceKind::KorobovHilbert: {
      const int alpha = setting.alpha();
      const long double lead = 16.0L * std::pow(static_cast<long double>(c_bound), 4);
      const long double per_dim = std::pow(kTwoPi, 2.0L * alpha);
      long double acc = 0.0L;
      SubsetWalker walker(s, {gamma_table(ws, s), smoothness_table(b, s, alpha, 1.0L)});
      walker.run([&](std::size_t order, const std::vector<Poly>& polys) {
        long double g = gamma_from_poly(ws, polys[0]);
        long double inner = factorial_weighted(polys[1]);
        acc += std::pow(per_dim, static_cast<long double>(order)) / g * inner * inner;
      });
      return static_cast<double>(lead * acc);
    }
    case SpaceKind::KorobovNonHilbert: {
      // Per order, the maximum over u is attained by the prefix {1..l} because
      // b is non-increasing and every factor is increasing in each b_j.
      const int alpha = setting.alpha();
      const long double lead = 4.0L * static_cast<long double>(c_bound) * c_bound;
      const long double per_dim = std::pow(kTwoPi, static_cast<long double>(alpha));
      auto table = smoothness_table(b, s, alpha, 1.0L);
      Poly p{1.0L};
      std::vector<std::size_t> u;
      long double best = 1.0L;  // u = empty
      for (std::size_t l = 1; l <= s; ++l) {
        p = mul_pure(p, table[l - 1]);
        u.push_back(l - 1);
        long double value =
            std::pow(per_dim, static_cast<long double>(l)) / ws.gamma(u) * factorial_weighted(p);
        guard(value, l, "norm_bound");
        best = std::max(best, value);
      }
      return static_cast<double>(lead * best);
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Appendix constants

AppendixConstant appendix_constant(const DecaySequence& b, const RatePlan& plan, double kappa_sl,
                                   std::size_t s) {
  if (!(kappa_sl >= 1.0)) throw std::invalid_argument("appendix_constant: kappa*S_L must be >= 1");
  require_admissible(plan);
  const double lam = plan.lambda;
  const auto bv = b.values(s);
  const SpaceSetting& setting = plan.setting;
  AppendixConstant out;
  switch (setting.kind()) {
    case SpaceKind::SobolevShifted: {
      const WeightScheme w = build_weights(setting, b, plan, s);
      const long double scale = varrho(1, lam) * std::pow(2.0, lam);
      out.first = weighted_power_sum(w, lam, scale).value;
      std::vector<std::vector<long double>> table(s, std::vector<long double>(1));
      for (std::size_t j = 0; j < s; ++j) {
        long double kb = static_cast<long double>(kappa_sl) * bv[j];
        table[j][0] = kb * kb / w.dim_factor(j, 1);
      }
      Poly p = product_with_one(table, "appendix_constant");
      for (std::size_t l = 0; l < p.size(); ++l) {
        out.second += pow_factorial(static_cast<int>(l) + 1, 2.0L) / w.order_factor(l) * p[l];
        guard(out.second, l, "appendix_constant");
      }
      out.exact = true;
      break;
    }
    case SpaceKind::KorobovHilbert: {
      const int alpha = setting.alpha();
      const long double e = 2.0L * lam / (1.0L + lam);
      const long double zeta_factor =
          std::pow(2.0L * riemann_zeta(2.0 * alpha * lam), 1.0L / (1.0L + lam));
      auto factor = [&](long double kappa) {
        std::vector<std::vector<long double>> table(s, std::vector<long double>(alpha));
        for (std::size_t j = 0; j < s; ++j) {
          for (int m = 1; m <= alpha; ++m) {
            long double v = stirling2(alpha, m) * std::pow(static_cast<long double>(bv[j]), m);
            table[j][m - 1] = zeta_factor * std::pow(v, e) * std::pow(kappa, 2.0L * m);
          }
        }
        Poly p = product_with_one(table, "appendix_constant");
        long double acc = 0.0L;
        for (std::size_t l = 0; l < p.size(); ++l) {
          acc += pow_factorial(static_cast<int>(l) + 1, e) * p[l];
          guard(acc, l, "appendix_constant");
        }
        return acc;
      };
      out.first = factor(1.0L);
      out.second = factor(kappa_sl);
      out.exact = false;
      break;
    }
    case SpaceKind::KorobovNonHilbert: {
      const int alpha = setting.alpha();
      const long double z = 2.0L * riemann_zeta(alpha * lam);
      std::vector<std::vector<long double>> table(s, std::vector<long double>(alpha));
      for (std::size_t j = 0; j < s; ++j) {
        for (int m = 1; m <= alpha; ++m) {
          long double v = stirling2(alpha, m) * std::pow(static_cast<long double>(bv[j]), m);
          table[j][m - 1] = z * std::pow(v, static_cast<long double>(lam));
        }
      }
      Poly p = product_with_one(table, "appendix_constant");
      for (std::size_t l = 1; l < p.size(); ++l) {
        out.first += pow_factorial(static_cast<int>(l) + 1, lam) * p[l];
        guard(out.first, l, "appendix_constant");
      }
      // Ratio factor: weighted average of (kappa S_L)^{|m|}; the maximum over u
      // is taken over prefixes {1..l} (largest b_j first).
      auto v_table = smoothness_table(bv, s, alpha, 1.0L);
      Poly v{1.0L};
      out.second = 1.0L;
      for (std::size_t l = 1; l <= s; ++l) {
        v = mul_pure(v, v_table[l - 1]);
        long double num = 0.0L, den = 0.0L;
        for (std::size_t i = 0; i < v.size(); ++i) {
          long double f = std::exp(log_factorial(static_cast<int>(i) + 1)) * v[i];
          den += f;
          num += f * std::pow(static_cast<long double>(kappa_sl), static_cast<long double>(i));
        }
        out.second = std::max(out.second, num / den);
      }
      out.exact = false;
      break;
    }
  }
  out.value = out.first * std::pow(out.second, static_cast<long double>(lam));
  if (!std::isfinite(out.value)) {
    throw std::overflow_error("appendix_constant: value overflows");
  }
  return out;
}

AppendixConstant appendix_constant_exact(const DecaySequence& b, const RatePlan& plan,
                                         double kappa_sl, std::size_t s) {
  if (!(kappa_sl >= 1.0)) throw std::invalid_argument("appendix_constant: kappa*S_L must be >= 1");
  require_admissible(plan);
  const double lam = plan.lambda;
  const auto bv = b.values(s);
  const SpaceSetting& setting = plan.setting;
  const WeightScheme w = build_weights(setting, b, plan, s);
  const int alpha = setting.alpha();
  AppendixConstant out;
  out.exact = true;
  long double wce_scale = 0.0L;
  switch (setting.kind()) {
    case SpaceKind::SobolevShifted: wce_scale = varrho(1, lam) * std::pow(2.0, lam); break;
    case SpaceKind::KorobovHilbert: wce_scale = varrho(alpha, lam); break;
    case SpaceKind::KorobovNonHilbert: wce_scale = varrho(alpha, lam / 2.0); break;
  }
  const int smooth = setting.kind() == SpaceKind::SobolevShifted ? 1 : alpha;
  SubsetWalker walker(s, {gamma_table(w, s), smoothness_table(bv, s, smooth, kappa_sl)});
  const long double two_pi_pow = setting.kind() == SpaceKind::KorobovHilbert
                                     ? std::pow(kTwoPi, 2.0L * alpha)
                                     : std::pow(kTwoPi, static_cast<long double>(alpha));
  walker.run([&](std::size_t order, const std::vector<Poly>& polys) {
    const long double g = gamma_from_poly(w, polys[0]);
    if (order > 0) {
      out.first += std::pow(g, static_cast<long double>(lam)) *
                   std::pow(wce_scale, static_cast<long double>(order));
    }
    switch (setting.kind()) {
      case SpaceKind::SobolevShifted: {
        // S(1,1) = 1, so the smoothness channel holds prod_j kappa b_j.
        long double num = std::exp(log_factorial(static_cast<int>(order) + 1)) * polys[1].back();
        out.second += num * num / g;
        break;
      }
      case SpaceKind::KorobovHilbert: {
        long double inner = factorial_weighted(polys[1]);
        out.second += std::pow(two_pi_pow, static_cast<long double>(order)) / g * inner * inner;
        break;
      }
      case SpaceKind::KorobovNonHilbert: {
        long double value = std::pow(two_pi_pow, static_cast<long double>(order)) / g *
                            factorial_weighted(polys[1]);
        out.second = std::max(out.second, value);
        break;
      }
    }
  });
  out.value = out.first * std::pow(out.second, static_cast<long double>(lam));
  return out;
}

}  // namespace latnet

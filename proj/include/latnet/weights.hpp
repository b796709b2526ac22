#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "latnet/setting.hpp"

namespace latnet {

// Decay sequence b_j, j >= 1. The closed form is b_j = eta / j^q / normalizer
// and is defined for every j; an explicit list is defined only up to its length.
class DecaySequence {
 public:
  static DecaySequence algebraic(double eta, double q, double normalizer, double p_star);
  static DecaySequence from_values(std::vector<double> values, double p_star);

  // b_j for 1-based j.
  double operator()(std::size_t j) const;
  std::vector<double> values(std::size_t s) const;

  double p_star() const { return p_star_; }
  bool closed_form() const { return closed_form_; }
  double eta() const { return eta_; }
  double q() const { return q_; }
  double normalizer() const { return normalizer_; }

  // sum_{j>=1} b_j^p. For the closed form the sum is truncated once the
  // integral tail bound drops below 1e-14; returns +inf when p*q <= 1.
  double power_sum(double p) const;

 private:
  DecaySequence() = default;
  bool closed_form_ = true;
  double eta_ = 0, q_ = 0, normalizer_ = 1, p_star_ = 0;
  std::vector<double> explicit_;
};

// Weights of the form
//   gamma_u = sum_{m in {1..D}^u} Gamma_{|m|} prod_{j in u} g_{j, m_j},
// which covers product weights (D = 1, Gamma = 1), POD weights (D = 1) and
// SPOD weights (D = alpha). gamma_empty = Gamma_0 = 1.
class WeightScheme {
 public:
  enum class Kind { Product, POD, SPOD };

  static WeightScheme product(std::vector<double> gamma);
  static WeightScheme pod(std::vector<long double> order_factors, std::vector<double> dim_factors);
  // dim_factors[j][m-1] = g_{j,m}; order_factors has at least s*D+1 entries.
  static WeightScheme spod(int degree, std::vector<long double> order_factors,
                           std::vector<std::vector<double>> dim_factors);

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return dims_.size(); }
  int degree() const { return degree_; }
  long double order_factor(std::size_t order) const { return order_[order]; }
  double dim_factor(std::size_t j, int m) const { return dims_[j][m - 1]; }
  std::size_t max_order() const { return order_.size() - 1; }

  // gamma_u for a set of 0-based coordinate indices.
  long double gamma(std::span<const std::size_t> u) const;

  // Truncated copy using the first s coordinates.
  WeightScheme prefix(std::size_t s) const;

 private:
  WeightScheme() = default;
  Kind kind_ = Kind::Product;
  int degree_ = 1;
  std::vector<long double> order_;
  std::vector<std::vector<double>> dims_;
};

struct RatePlan {
  SpaceSetting setting = SpaceSetting::sobolev_shifted();
  double p_star = 0;
  double lambda = 0;
  int alpha = 1;
  double rate = 0;    // r; the generalization error decays like N^{-r/2}
  double delta = 0;   // used by the Sobolev setting only
};

constexpr double kDefaultDelta = 0.05;

// varrho_alpha(lambda) = 2 zeta(2 alpha lambda) / (2 pi)^{2 alpha lambda}.
double varrho(int alpha, double lambda);

RatePlan select_rate_plan(double p_star, SpaceKind kind, double delta = kDefaultDelta);

// Weights tailored to a decay sequence for the plan's setting, over s coordinates.
WeightScheme build_weights(const SpaceSetting& setting, const DecaySequence& b,
                           const RatePlan& plan, std::size_t s);

struct SubsetSum {
  long double value = 0;
  bool exact = true;  // false when a Jensen majorant replaced the exact sum
};

// sum_{u != empty} gamma_u^lambda * scale^{|u|}. Exact for D = 1 weights; for
// D > 1 each gamma_u^lambda is replaced by sum_m (Gamma_{|m|} prod g)^lambda,
// which bounds it from above for lambda in (0, 1].
SubsetSum weighted_power_sum(const WeightScheme& w, double lambda, long double scale);

// Norm bound of the squared-error integrand for the given setting.
double norm_bound(const SpaceSetting& setting, std::span<const double> b, double c_bound,
                  const WeightScheme& w, std::size_t s);

struct AppendixConstant {
  long double value = 0;
  long double first = 0;   // worst-case-error factor
  long double second = 0;  // norm factor, before the power lambda
  bool exact = true;
};

// C_{s,gamma,lambda} for the plan's setting, with b_j replaced by kappa*S_L*b_j
// in the norm factor. The Sobolev setting is evaluated exactly; the two
// Korobov settings through the separable majorant obtained by Jensen's
// inequality over the smoothness multi-indices (and Cauchy-Schwarz in the
// Hilbert case).
AppendixConstant appendix_constant(const DecaySequence& b, const RatePlan& plan,
                                   double kappa_sl, std::size_t s);

// Exact evaluation by enumerating all subsets (s <= 20); for validation of
// the majorant above.
AppendixConstant appendix_constant_exact(const DecaySequence& b, const RatePlan& plan,
                                         double kappa_sl, std::size_t s);

// Smallest admissible lambda for a plan: the pole of the zeta factor and the
// summability condition on p*.
double lambda_threshold(const RatePlan& plan);

// Visit every subset of {0..s-1} (including the empty one); s <= 24.
void for_each_subset(std::size_t s, const std::function<void(std::span<const std::size_t>)>& f);

}  // namespace latnet

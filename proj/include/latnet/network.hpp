#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "latnet/activation.hpp"

namespace latnet {

// Fully-connected network with L hidden layers:
//   G(y) = W_L s(... W_1 s(W_0 x + v_0) + v_1 ...) + v_L,
// where x = y, or x = sin(2 pi y) for the periodic variant.
// W_l has shape d_{l+1} x d_l; d_0 = s and d_{L+1} = N_obs.
struct Network {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> v;
  Activation activation;
  bool periodic = false;

  // All-zero parameters for widths d_0..d_{L+1}.
  static Network zeros(std::span<const std::size_t> dims, Activation activation, bool periodic);

  std::size_t depth() const { return W.size() - 1; }
  std::size_t input_dim() const { return static_cast<std::size_t>(W.front().cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(W.back().rows()); }
  std::vector<std::size_t> dims() const;
  std::size_t parameter_count() const;
};

// d_0 = s, d_1..d_L = width, d_{L+1} = n_obs.
std::vector<std::size_t> uniform_dims(std::size_t s, std::size_t depth, std::size_t width,
                                      std::size_t n_obs);

// sum_l d_{l+1} d_l + sum_l d_{l+1}
std::size_t parameter_count(std::span<const std::size_t> dims);

// Same shapes as a network, used for gradients and optimizer moments.
struct ParamSet {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> v;

  static ParamSet zeros_like(const Network& net);
  double squared_norm() const;
};

Eigen::VectorXd forward(const Network& net, std::span<const double> y);

// Inputs are the columns of X (s x N); outputs are the columns of the result.
Eigen::MatrixXd forward_batch(const Network& net, const Eigen::MatrixXd& X);

// Pre-activations of every hidden layer and the output of a batch.
struct BatchPass {
  Eigen::MatrixXd input;               // x (after the sine map when periodic)
  std::vector<Eigen::MatrixXd> pre;    // z_l = W_l h_l + v_l, l = 0..L-1
  std::vector<Eigen::MatrixXd> post;   // h_{l+1} = s(z_l)
  Eigen::MatrixXd output;
};

BatchPass forward_pass(const Network& net, const Eigen::MatrixXd& X);

// Gradient of sum_k <seed_k, G(y_k)> with respect to every parameter.
ParamSet backpropagate(const Network& net, const BatchPass& pass, const Eigen::MatrixXd& seed);

// Gradient of (1/N) sum_k ||r_k||^2 where r_k = G(y_k) - target_k are the
// residuals of the current parameters.
ParamSet backward(const Network& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& residuals);

// Norm audit of a network.
struct RegularityProfile {
  std::vector<double> beta;  // beta_j = max_p |W_0[p,j]|
  std::vector<double> R;     // R[l-1] = ||W_l||_inf, l = 1..L
  std::vector<double> P;     // P_l = prod_{t<=l} xi tau R_t, l = 0..L
  double S_L = 0;
  double C_L = 0;
  double sup_norm = 0;       // sampled estimate of ||G||_inf, not a bound
  double kappa = 0;          // max(max_j beta_j / b_j, 1 / S_L)
  double xi = 0;
  double tau = 0;
};

// Lower estimate of max_y |G(y)_p| over 2^log2_points lattice points.
double sup_norm_estimate(const Network& net, unsigned log2_points = 12);

RegularityProfile regularity_profile(const Network& net, std::span<const double> b,
                                     double sup_norm);

// Bound on |d^nu G(y)_p| for a multi-index with |nu| <= 8.
double regularity_bound(const RegularityProfile& profile, std::span<const int> nu, bool periodic);

struct RestrictionReport {
  bool layers_ok = false;   // R_l <= rho, l = 1..L-1
  bool inputs_ok = false;   // beta_j <= b_j / S_L
  bool output_ok = false;   // C_L <= C
  double kappa = 0;
  double kappa_s = 0;       // kappa * S_L
};

RestrictionReport check_restrictions(const RegularityProfile& profile, std::span<const double> b,
                                     double rho, double c_bound);

// ASCII checkpoint:
//   latnet-network 1
//   activation <name>
//   periodic <0|1>
//   dims d_0 ... d_{L+1}
// followed by, for each layer, the rows of W_l and then v_l, one row per line,
// with 17 significant digits.
void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

}  // namespace latnet

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "latnet/lattice.hpp"
#include "latnet/network.hpp"
#include "latnet/rng.hpp"

namespace latnet {

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t max_epochs = 40000;
  double tol = 1e-3;
  double lambda = 0;   // coefficient of ||theta||_2^2 (all weights and biases)
  double lambda1 = 0;  // coefficient of the tailored term R_1
  int m = 6;           // even power in R_1
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

enum class StopReason { Tolerance, MaxEpochs };
std::string to_string(StopReason r);

struct TrainResult {
  Network net;
  std::vector<double> trace;      // E_T of the parameters at the start of each epoch
  std::vector<double> objective;  // full objective at the same parameters
  std::size_t epochs = 0;
  StopReason stop = StopReason::MaxEpochs;
  double final_error = 0;         // sqrt(J) of the returned parameters
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::size_t epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

// Columns of the result are the points (s x N).
Eigen::MatrixXd to_matrix(const PointSet& points);

// J = (1/N) sum_k ||Y_k - G(X_k)||^2 over columns.
double loss_J(const Network& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

// R_1 = (1/s) sum_j (1/d_1) sum_p (W_0[p,j]^2 L^2 / b_j^2)^{m/2}
double reg_R1(const Network& net, std::span<const double> b, int m);
// Gradient with respect to W_0 (the term does not touch other parameters).
Eigen::MatrixXd reg_R1_gradient(const Network& net, std::span<const double> b, int m);

// J + lambda ||theta||^2 + lambda1 R_1 and its gradient.
double objective(const Network& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                 std::span<const double> b, const TrainConfig& config, ParamSet* gradient = nullptr);

// Uniform entries on +-sqrt(6/(fan_in+fan_out)), zero biases.
Network glorot_init(std::span<const std::size_t> dims, Activation activation, bool periodic, Rng& rng);

// Full-batch Adam on the objective. Each epoch evaluates the current
// parameters, stops if sqrt(J) <= tol or the epoch cap is reached, and
// otherwise takes one step.
TrainResult train(const TrainConfig& config, const Network& initial, const Eigen::MatrixXd& X,
                  const Eigen::MatrixXd& Y, std::span<const double> b,
                  const std::function<void(std::size_t, double, double)>& log = {});

using VectorTarget = std::function<Eigen::VectorXd(std::span<const double>)>;

// Targets as columns (n_obs x N).
Eigen::MatrixXd evaluate_targets(const VectorTarget& target, const PointSet& points, std::size_t n_obs);

struct ErrorEstimate {
  double E_T = 0;
  double E_G = 0;    // estimated from the evaluation points
  double gap = 0;    // |E_G - E_T|
  std::size_t M = 0;
  std::uint64_t seed = 0;
};

constexpr std::size_t kDefaultEvaluationPoints = std::size_t{1} << 15;

// E_G ~ (1/M sum_i ||G(t_i) - G_theta(t_i)||^2)^{1/2} over the shifted
// evaluation lattice.
ErrorEstimate estimate_generalization(const Network& net, const VectorTarget& target,
                                      const PointSet& evaluation_points, double E_T,
                                      std::uint64_t seed = 0);

}  // namespace latnet

#include "latnet/training.hpp"

#include <cmath>
#include <limits>

namespace latnet {

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("m must be an even integer >= 2");
  if (lambda < 0 || lambda1 < 0) throw std::invalid_argument("regularization coefficients must be >= 0");
}

std::string to_string(StopReason r) { return r == StopReason::Tolerance ? "tolerance" : "max-epochs"; }

Eigen::MatrixXd to_matrix(const PointSet& points) {
  Eigen::MatrixXd X(points.dimension(), points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (std::size_t j = 0; j < points.dimension(); ++j) X(j, k) = points(k, j);
  }
  return X;
}

double loss_J(const Network& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  if (X.cols() == 0) throw std::invalid_argument("loss_J: empty batch");
  if (Y.cols() != X.cols()) throw std::invalid_argument("loss_J: points and targets differ in count");
  return (forward_batch(net, X) - Y).squaredNorm() / static_cast<double>(X.cols());
}

namespace {

void check_decay(const Network& net, std::span<const double> b) {
  if (b.size() < net.input_dim()) throw std::invalid_argument("R1: b shorter than the input dimension");
  for (std::size_t j = 0; j < net.input_dim(); ++j) {
    if (!(b[j] != 0.0)) throw std::invalid_argument("R1: b_j must be nonzero");
  }
}

}  // namespace

double reg_R1(const Network& net, std::span<const double> b, int m) {
  check_decay(net, b);
  const Eigen::MatrixXd& W0 = net.W[0];
  const double L = static_cast<double>(net.depth());
  const double d1 = static_cast<double>(W0.rows());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < W0.cols(); ++j) {
    const double scale = L / b[j];
    double col = 0.0;
    for (Eigen::Index p = 0; p < W0.rows(); ++p) col += std::pow(W0(p, j) * scale, m);
    acc += col / d1;
  }
  return acc / static_cast<double>(W0.cols());
}

Eigen::MatrixXd reg_R1_gradient(const Network& net, std::span<const double> b, int m) {
  check_decay(net, b);
  const Eigen::MatrixXd& W0 = net.W[0];
  const double L = static_cast<double>(net.depth());
  const double norm = static_cast<double>(m) / (static_cast<double>(W0.rows()) * W0.cols());
  Eigen::MatrixXd g(W0.rows(), W0.cols());
  for (Eigen::Index j = 0; j < W0.cols(); ++j) {
    const double scale = L / b[j];
    for (Eigen::Index p = 0; p < W0.rows(); ++p) {
      g(p, j) = norm * std::pow(W0(p, j), m - 1) * std::pow(scale, m);
    }
  }
  return g;
}

namespace {

double squared_params(const Network& net) {
  double acc = 0.0;
  for (const auto& w : net.W) acc += w.squaredNorm();
  for (const auto& v : net.v) acc += v.squaredNorm();
  return acc;
}

// Objective terms at the current parameters; fills the gradient when asked.
struct Evaluation {
  double J = 0;
  double objective = 0;
};

Evaluation evaluate(const Network& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                    std::span<const double> b, const TrainConfig& config, ParamSet* gradient) {
  if (X.cols() == 0) throw std::invalid_argument("objective: empty batch");
  if (Y.cols() != X.cols() || static_cast<std::size_t>(Y.rows()) != net.output_dim()) {
    throw std::invalid_argument("objective: target shape does not match the network");
  }
  const double n = static_cast<double>(X.cols());
  BatchPass pass = forward_pass(net, X);
  Eigen::MatrixXd residual = pass.output - Y;
  Evaluation e;
  e.J = residual.squaredNorm() / n;
  e.objective = e.J;
  if (config.lambda > 0) e.objective += config.lambda * squared_params(net);
  if (config.lambda1 > 0) e.objective += config.lambda1 * reg_R1(net, b, config.m);
  if (gradient) {
    *gradient = backpropagate(net, pass, (2.0 / n) * residual);
    if (config.lambda > 0) {
      for (std::size_t l = 0; l < net.W.size(); ++l) {
        gradient->W[l] += 2.0 * config.lambda * net.W[l];
        gradient->v[l] += 2.0 * config.lambda * net.v[l];
      }
    }
    if (config.lambda1 > 0) gradient->W[0] += config.lambda1 * reg_R1_gradient(net, b, config.m);
  }
  return e;
}

}  // namespace

double objective(const Network& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                 std::span<const double> b, const TrainConfig& config, ParamSet* gradient) {
  return evaluate(net, X, Y, b, config, gradient).objective;
}

Network glorot_init(std::span<const std::size_t> dims, Activation activation, bool periodic, Rng& rng) {
  Network net = Network::zeros(dims, activation, periodic);
  for (auto& w : net.W) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    // Row-major fill order keeps the draw sequence independent of storage layout.
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-bound, bound);
    }
  }
  return net;
}

TrainResult train(const TrainConfig& config, const Network& initial, const Eigen::MatrixXd& X,
                  const Eigen::MatrixXd& Y, std::span<const double> b,
                  const std::function<void(std::size_t, double, double)>& log) {
  config.validate();
  if (config.lambda1 > 0) check_decay(initial, b);
  TrainResult r;
  r.net = initial;
  Network& net = r.net;
  ParamSet m1 = ParamSet::zeros_like(net), m2 = ParamSet::zeros_like(net), grad;
  double bias1 = 1.0, bias2 = 1.0;
  if (config.max_epochs == 0) {
    r.final_error = std::sqrt(loss_J(net, X, Y));
    r.stop = StopReason::MaxEpochs;
    return r;
  }
  for (std::size_t epoch = 1;; ++epoch) {
    Evaluation e = evaluate(net, X, Y, b, config, &grad);
    if (!std::isfinite(e.objective)) {
      throw TrainingError("training diverged: non-finite objective at epoch " + std::to_string(epoch), epoch);
    }
    const double et = std::sqrt(e.J);
    r.trace.push_back(et);
    r.objective.push_back(e.objective);
    if (log) log(epoch, et, e.objective);
    r.epochs = epoch;
    r.final_error = et;
    if (et <= config.tol) {
      r.stop = StopReason::Tolerance;
      return r;
    }
    if (epoch >= config.max_epochs) {
      r.stop = StopReason::MaxEpochs;
      return r;
    }
    bias1 *= config.beta1;
    bias2 *= config.beta2;
    const double step = config.learning_rate / (1.0 - bias1);
    const double c2 = 1.0 / (1.0 - bias2);
    auto update = [&](auto& param, auto& g, auto& a, auto& v) {
      a = config.beta1 * a + (1.0 - config.beta1) * g;
      v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
      param.array() -= step * a.array() / ((v.array() * c2).sqrt() + config.epsilon);
    };
    for (std::size_t l = 0; l < net.W.size(); ++l) {
      update(net.W[l], grad.W[l], m1.W[l], m2.W[l]);
      update(net.v[l], grad.v[l], m1.v[l], m2.v[l]);
    }
  }
}

Eigen::MatrixXd evaluate_targets(const VectorTarget& target, const PointSet& points, std::size_t n_obs) {
  Eigen::MatrixXd Y(n_obs, points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    Eigen::VectorXd y = target(points.row(k));
    if (static_cast<std::size_t>(y.size()) != n_obs) throw std::invalid_argument("target returned wrong length");
    Y.col(k) = y;
  }
  return Y;
}

ErrorEstimate estimate_generalization(const Network& net, const VectorTarget& target,
                                      const PointSet& evaluation_points, double E_T, std::uint64_t seed) {
  const Eigen::MatrixXd X = to_matrix(evaluation_points);
  const Eigen::MatrixXd Y = evaluate_targets(target, evaluation_points, net.output_dim());
  ErrorEstimate e;
  e.E_T = E_T;
  e.M = evaluation_points.size();
  e.E_G = std::sqrt(loss_J(net, X, Y));
  e.gap = std::fabs(e.E_G - e.E_T);
  e.seed = seed;
  return e;
}

}  // namespace latnet

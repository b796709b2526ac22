#include "latnet/network.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "latnet/lattice.hpp"
#include "latnet/special.hpp"

namespace latnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::ArrayXXd sigmoid_array(const Eigen::ArrayXXd& x) { return 1.0 / (1.0 + (-x).exp()); }

Eigen::MatrixXd apply(const Activation& a, const Eigen::MatrixXd& z) {
  const double c = a.c();
  switch (a.type()) {
    case ActivationType::Sigmoid: return sigmoid_array(c * z.array()).matrix();
    case ActivationType::Tanh: return (c * z.array()).tanh().matrix();
    case ActivationType::Swish: return (z.array() * sigmoid_array(c * z.array())).matrix();
    case ActivationType::ReLU: return z.array().max(0.0).matrix();
  }
  return z;
}

Eigen::MatrixXd apply_derivative(const Activation& a, const Eigen::MatrixXd& z) {
  const double c = a.c();
  switch (a.type()) {
    case ActivationType::Sigmoid: {
      Eigen::ArrayXXd s = sigmoid_array(c * z.array());
      return (c * s * (1.0 - s)).matrix();
    }
    case ActivationType::Tanh: {
      Eigen::ArrayXXd t = (c * z.array()).tanh();
      return (c * (1.0 - t * t)).matrix();
    }
    case ActivationType::Swish: {
      Eigen::ArrayXXd s = sigmoid_array(c * z.array());
      return (s + c * z.array() * s * (1.0 - s)).matrix();
    }
    case ActivationType::ReLU: return (z.array() > 0.0).cast<double>().matrix();
  }
  return z;
}

Eigen::MatrixXd input_map(const Network& net, const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.rows()) != net.input_dim()) {
    throw std::invalid_argument("network input has " + std::to_string(X.rows()) +
                                " rows, expected " + std::to_string(net.input_dim()));
  }
  if (!net.periodic) return X;
  return (kTwoPi * X.array()).sin().matrix();
}

}  // namespace

Network Network::zeros(std::span<const std::size_t> dims, Activation activation, bool periodic) {
  if (dims.size() < 2) throw std::invalid_argument("network needs at least input and output widths");
  Network net;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] == 0 || dims[l + 1] == 0) throw std::invalid_argument("network widths must be positive");
    net.W.push_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
    net.v.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  net.activation = activation;
  net.periodic = periodic;
  return net;
}

std::vector<std::size_t> Network::dims() const {
  std::vector<std::size_t> d{input_dim()};
  for (const auto& w : W) d.push_back(static_cast<std::size_t>(w.rows()));
  return d;
}

std::size_t Network::parameter_count() const {
  auto d = dims();
  return latnet::parameter_count(d);
}

std::vector<std::size_t> uniform_dims(std::size_t s, std::size_t depth, std::size_t width,
                                      std::size_t n_obs) {
  std::vector<std::size_t> d{s};
  for (std::size_t l = 0; l < depth; ++l) d.push_back(width);
  d.push_back(n_obs);
  return d;
}

std::size_t parameter_count(std::span<const std::size_t> dims) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) n += dims[l + 1] * dims[l] + dims[l + 1];
  return n;
}

ParamSet ParamSet::zeros_like(const Network& net) {
  ParamSet p;
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    p.W.push_back(Eigen::MatrixXd::Zero(net.W[l].rows(), net.W[l].cols()));
    p.v.push_back(Eigen::VectorXd::Zero(net.v[l].size()));
  }
  return p;
}

double ParamSet::squared_norm() const {
  double acc = 0.0;
  for (const auto& w : W) acc += w.squaredNorm();
  for (const auto& b : v) acc += b.squaredNorm();
  return acc;
}

Eigen::VectorXd forward(const Network& net, std::span<const double> y) {
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return forward_batch(net, x).col(0);
}

Eigen::MatrixXd forward_batch(const Network& net, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd h = input_map(net, X);
  const std::size_t L = net.depth();
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd z = net.W[l] * h;
    z.colwise() += net.v[l];
    h = apply(net.activation, z);
  }
  Eigen::MatrixXd out = net.W[L] * h;
  out.colwise() += net.v[L];
  return out;
}

BatchPass forward_pass(const Network& net, const Eigen::MatrixXd& X) {
  BatchPass pass;
  pass.input = input_map(net, X);
  const std::size_t L = net.depth();
  const Eigen::MatrixXd* h = &pass.input;
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd z = net.W[l] * *h;
    z.colwise() += net.v[l];
    pass.post.push_back(apply(net.activation, z));
    pass.pre.push_back(std::move(z));
    h = &pass.post.back();
  }
  pass.output = net.W[L] * *h;
  pass.output.colwise() += net.v[L];
  return pass;
}

ParamSet backpropagate(const Network& net, const BatchPass& pass, const Eigen::MatrixXd& seed) {
  const std::size_t L = net.depth();
  if (seed.rows() != pass.output.rows() || seed.cols() != pass.output.cols()) {
    throw std::invalid_argument("backpropagate: seed shape does not match the output");
  }
  ParamSet g = ParamSet::zeros_like(net);
  Eigen::MatrixXd delta = seed;
  for (std::size_t l = L + 1; l-- > 0;) {
    const Eigen::MatrixXd& h = l == 0 ? pass.input : pass.post[l - 1];
    g.W[l].noalias() = delta * h.transpose();
    g.v[l] = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = net.W[l].transpose() * delta;
    delta = back.cwiseProduct(apply_derivative(net.activation, pass.pre[l - 1]));
  }
  return g;
}

ParamSet backward(const Network& net, const Eigen::MatrixXd& X, const Eigen::MatrixXd& residuals) {
  BatchPass pass = forward_pass(net, X);
  if (residuals.rows() != pass.output.rows() || residuals.cols() != pass.output.cols()) {
    throw std::invalid_argument("backward: residual shape does not match the output");
  }
  const double n = static_cast<double>(X.cols());
  return backpropagate(net, pass, (2.0 / n) * residuals);
}

double sup_norm_estimate(const Network& net, unsigned log2_points) {
  const std::uint64_t n = std::uint64_t{1} << log2_points;
  const std::size_t s = net.input_dim();
  // Korobov-form generating vector (1, a, a^2, ...) mod N; any odd a lies in Z_N.
  constexpr std::uint64_t a = 1571;
  std::vector<std::uint64_t> z(s);
  std::uint64_t p = 1;
  for (std::size_t j = 0; j < s; ++j) {
    z[j] = n == 1 ? 0 : p % n;
    p = (p * a) % n;
  }
  PointSet pts = lattice_points(GeneratingVector(n, z));
  Eigen::MatrixXd X(s, static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < s; ++j) X(j, k) = pts(k, j);
  }
  return forward_batch(net, X).cwiseAbs().maxCoeff();
}

RegularityProfile regularity_profile(const Network& net, std::span<const double> b, double sup_norm) {
  const std::size_t s = net.input_dim();
  const std::size_t L = net.depth();
  if (b.size() < s) throw std::invalid_argument("regularity_profile: b shorter than the input dimension");
  RegularityProfile p;
  p.xi = net.activation.xi();
  p.tau = net.activation.tau();
  p.beta.resize(s);
  for (std::size_t j = 0; j < s; ++j) p.beta[j] = net.W[0].col(j).cwiseAbs().maxCoeff();
  for (std::size_t l = 1; l <= L; ++l) p.R.push_back(net.W[l].cwiseAbs().rowwise().sum().maxCoeff());
  p.P.push_back(1.0);
  for (std::size_t l = 1; l <= L; ++l) p.P.push_back(p.P.back() * p.xi * p.tau * p.R[l - 1]);
  double acc = 0.0;
  for (std::size_t l = 0; l < L; ++l) acc += p.P[l];
  p.S_L = p.tau * acc;
  p.sup_norm = sup_norm;
  p.C_L = std::max(sup_norm, p.P[L] / p.S_L);
  p.kappa = 1.0 / p.S_L;
  for (std::size_t j = 0; j < s; ++j) p.kappa = std::max(p.kappa, p.beta[j] / b[j]);
  return p;
}

double regularity_bound(const RegularityProfile& profile, std::span<const int> nu, bool periodic) {
  if (nu.size() > profile.beta.size()) throw std::invalid_argument("regularity_bound: multi-index too long");
  int order = 0;
  for (int n : nu) {
    if (n < 0) throw std::invalid_argument("regularity_bound: negative multi-index entry");
    order += n;
  }
  if (order > 8) throw std::invalid_argument("regularity_bound: order is capped at 8");
  std::vector<double> sb(nu.size());
  for (std::size_t j = 0; j < nu.size(); ++j) sb[j] = profile.S_L * profile.beta[j];
  if (!periodic) {
    double prod = factorial(order);
    for (std::size_t j = 0; j < nu.size(); ++j) prod *= std::pow(sb[j], nu[j]);
    return profile.C_L * prod;
  }
  // sum over m <= nu of |m|! prod_j (S_L beta_j)^{m_j} S(nu_j, m_j)
  double total = 0.0;
  std::function<void(std::size_t, int, double)> walk = [&](std::size_t j, int m_sum, double prod) {
    if (prod == 0.0) return;
    if (j == nu.size()) {
      total += factorial(m_sum) * prod;
      return;
    }
    for (int m = 0; m <= nu[j]; ++m) {
      walk(j + 1, m_sum + m, prod * std::pow(sb[j], m) * stirling2(nu[j], m));
    }
  };
  walk(0, 0, 1.0);
  return profile.C_L * std::pow(kTwoPi, order) * total;
}

RestrictionReport check_restrictions(const RegularityProfile& profile, std::span<const double> b,
                                     double rho, double c_bound) {
  RestrictionReport r;
  r.layers_ok = true;
  // R_L is not restricted by rho; it enters through C_L.
  for (std::size_t l = 0; l + 1 < profile.R.size(); ++l) {
    if (profile.R[l] > rho) r.layers_ok = false;
  }
  r.inputs_ok = true;
  for (std::size_t j = 0; j < profile.beta.size(); ++j) {
    if (profile.beta[j] > b[j] / profile.S_L) r.inputs_ok = false;
  }
  r.output_ok = profile.C_L <= c_bound;
  r.kappa = profile.kappa;
  r.kappa_s = profile.kappa * profile.S_L;
  return r;
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "latnet-network 1\n";
  out << "activation " << net.activation.name() << "\n";
  out << "periodic " << (net.periodic ? 1 : 0) << "\n";
  out << "dims";
  for (auto d : net.dims()) out << ' ' << d;
  out << "\n" << std::setprecision(17);
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    for (Eigen::Index i = 0; i < net.W[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < net.W[l].cols(); ++j) out << (j ? " " : "") << net.W[l](i, j);
      out << "\n";
    }
    for (Eigen::Index i = 0; i < net.v[l].size(); ++i) out << (i ? " " : "") << net.v[l](i);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  auto fail = [&](const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
  };
  std::string tag, line;
  int version = 0;
  if (!(in >> tag >> version) || tag != "latnet-network" || version != 1) fail("not a version-1 network file");
  std::string act_name;
  if (!(in >> tag >> act_name) || tag != "activation") fail("missing activation line");
  int periodic = 0;
  if (!(in >> tag >> periodic) || tag != "periodic") fail("missing periodic line");
  if (!(in >> tag) || tag != "dims") fail("missing dims line");
  std::getline(in, line);
  std::istringstream ds(line);
  std::vector<std::size_t> dims;
  for (std::size_t d; ds >> d;) dims.push_back(d);
  Network net = Network::zeros(dims, parse_activation(act_name), periodic != 0);
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    for (Eigen::Index i = 0; i < net.W[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < net.W[l].cols(); ++j) {
        if (!(in >> net.W[l](i, j))) fail("truncated weights in layer " + std::to_string(l));
      }
    }
    for (Eigen::Index i = 0; i < net.v[l].size(); ++i) {
      if (!(in >> net.v[l](i))) fail("truncated bias in layer " + std::to_string(l));
    }
  }
  return net;
}

}  // namespace latnet

#include "latnet/activation.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "latnet/special.hpp"

namespace latnet {

namespace {

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string format_c(double c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

}  // namespace

Activation::Activation(ActivationType type, double c) : type_(type), c_(c) {
  if (!(c > 0) || !std::isfinite(c)) throw std::invalid_argument("activation parameter c must be positive");
  if (type == ActivationType::ReLU) c_ = 1.0;
}

double Activation::xi() const {
  switch (type_) {
    case ActivationType::Sigmoid:
    case ActivationType::Tanh: return 1.0;
    case ActivationType::Swish: return 1.1 / c_;
    case ActivationType::ReLU: break;
  }
  throw std::domain_error("relu has no derivative bound constants (unbounded/nonsmooth)");
}

double Activation::tau() const {
  switch (type_) {
    case ActivationType::Sigmoid:
    case ActivationType::Swish: return c_;
    case ActivationType::Tanh: return 2.0 * c_;
    case ActivationType::ReLU: break;
  }
  throw std::domain_error("relu has no derivative bound constants (unbounded/nonsmooth)");
}

double Activation::value(double x) const {
  switch (type_) {
    case ActivationType::Sigmoid: return logistic(c_ * x);
    case ActivationType::Tanh: return std::tanh(c_ * x);
    case ActivationType::Swish: return x * logistic(c_ * x);
    case ActivationType::ReLU: return x > 0 ? x : 0.0;
  }
  return 0.0;
}

double Activation::derivative(double x) const {
  switch (type_) {
    case ActivationType::Sigmoid: {
      double s = logistic(c_ * x);
      return c_ * s * (1.0 - s);
    }
    case ActivationType::Tanh: {
      double t = std::tanh(c_ * x);
      return c_ * (1.0 - t * t);
    }
    case ActivationType::Swish: {
      double s = logistic(c_ * x);
      return s + c_ * x * s * (1.0 - s);
    }
    case ActivationType::ReLU: return x > 0 ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string Activation::name() const {
  std::string base;
  switch (type_) {
    case ActivationType::Sigmoid: base = "sigmoid"; break;
    case ActivationType::Tanh: base = "tanh"; break;
    case ActivationType::Swish: base = "swish"; break;
    case ActivationType::ReLU: return "relu";
  }
  return base + "_" + format_c(c_);
}

Activation parse_activation(const std::string& text) {
  std::string kind = text;
  double c = 1.0;
  auto cut = text.find_first_of("_:");
  if (cut != std::string::npos) {
    kind = text.substr(0, cut);
    const std::string tail = text.substr(cut + 1);
    char* end = nullptr;
    c = std::strtod(tail.c_str(), &end);
    if (tail.empty() || *end != '\0') throw std::invalid_argument("bad activation parameter in '" + text + "'");
  }
  if (kind == "sigmoid") return Activation::sigmoid(c);
  if (kind == "tanh") return Activation::tanh(c);
  if (kind == "swish") return Activation::swish(c);
  if (kind == "relu") return Activation::relu();
  throw std::invalid_argument("unknown activation '" + text + "'");
}

double activation_value(const Activation& a, double x, int order) {
  if (order == 0) return a.value(x);
  if (order == 1) return a.derivative(x);
  throw std::invalid_argument("activation_value: order must be 0 or 1");
}

double derivative_bound_A(const Activation& a, int n) {
  if (n < 1 || n > 20) throw std::invalid_argument("derivative_bound_A: n must lie in 1..20");
  return a.xi() * std::pow(a.tau(), n) * factorial(n);
}

double sigmoid_exact_derivative(int n, double x) {
  if (n < 1 || n > 15) throw std::invalid_argument("sigmoid_exact_derivative: n must lie in 1..15");
  const double s = logistic(x);
  double acc = 0.0;
  for (int k = 1; k <= n; ++k) {
    double term = static_cast<double>(eulerian(n, k - 1)) * std::pow(s, k) * std::pow(1.0 - s, n + 1 - k);
    acc += (k % 2 == 1) ? term : -term;
  }
  return acc;
}

}  // namespace latnet

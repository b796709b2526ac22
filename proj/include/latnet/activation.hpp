#pragma once

#include <string>

namespace latnet {

enum class ActivationType { Sigmoid, Tanh, Swish, ReLU };

// sigmoid_c(x) = 1/(1+e^{-cx}), tanh_c(x) = tanh(cx), swish_c(x) = x/(1+e^{-cx}),
// relu(x) = max(x, 0). Derivatives of order n of the smooth kinds are bounded
// by A_n = xi tau^n n!.
class Activation {
 public:
  Activation() = default;
  Activation(ActivationType type, double c);

  static Activation sigmoid(double c = 1.0) { return {ActivationType::Sigmoid, c}; }
  static Activation tanh(double c = 1.0) { return {ActivationType::Tanh, c}; }
  static Activation swish(double c = 1.0) { return {ActivationType::Swish, c}; }
  static Activation relu() { return {ActivationType::ReLU, 1.0}; }

  ActivationType type() const { return type_; }
  double c() const { return c_; }
  bool smooth() const { return type_ != ActivationType::ReLU; }

  double xi() const;
  double tau() const;

  double value(double x) const;
  // First derivative; relu'(0) is taken as 0.
  double derivative(double x) const;

  // "sigmoid", "sigmoid_5", "tanh_2", "swish_25", "relu".
  std::string name() const;

  bool operator==(const Activation&) const = default;

 private:
  ActivationType type_ = ActivationType::Sigmoid;
  double c_ = 1.0;
};

Activation parse_activation(const std::string& text);

// order 0: value, order 1: first derivative.
double activation_value(const Activation& a, double x, int order = 0);

// A_n = xi tau^n n!; throws for relu and for n outside 1..20.
double derivative_bound_A(const Activation& a, int n);

// n-th derivative of the standard sigmoid through the Eulerian-number identity
//   sigma^{(n)} = sum_{k=1}^{n} (-1)^{k-1} E(n,k-1) sigma^k (1-sigma)^{n+1-k}.
double sigmoid_exact_derivative(int n, double x);

}  // namespace latnet

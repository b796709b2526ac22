#include "latnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "latnet/wce.hpp"

namespace latnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Lattice-order index i (point i+1) to cyclic index (i+1) mod N.
std::size_t cyclic(std::size_t i, std::size_t n) { return (i + 1) % n; }

std::size_t residue(const Frequency& h, const GeneratingVector& gv) {
  const auto n = static_cast<long long>(gv.modulus());
  long long r = 0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    r = (r + static_cast<long long>(h[j] % n) * static_cast<long long>(gv[j] % gv.modulus())) % n;
  }
  if (r < 0) r += n;
  return static_cast<std::size_t>(r);
}

void check_samples(std::span<const double> samples, const GeneratingVector& gv) {
  if (samples.size() != gv.modulus()) {
    throw std::invalid_argument("expected " + std::to_string(gv.modulus()) + " samples, got " +
                                std::to_string(samples.size()));
  }
}

void check_spec(const KernelSpec& spec, std::size_t s) {
  if (spec.alpha < 1) throw std::invalid_argument("kernel smoothness must be >= 1");
  if (spec.gamma.size() < s) throw std::invalid_argument("kernel weights shorter than the dimension");
  for (std::size_t j = 0; j < s; ++j) {
    if (!(spec.gamma[j] > 0)) throw std::invalid_argument("kernel weights must be positive");
  }
}

}  // namespace

IndexSet hyperbolic_cross(std::span<const double> w, double threshold) {
  if (!(threshold >= 1.0)) throw std::invalid_argument("hyperbolic cross threshold must be >= 1");
  IndexSet A;
  A.dimension = w.size();
  Frequency h(w.size(), 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t j, double prod) {
    if (j == w.size()) {
      A.freqs.push_back(h);
      return;
    }
    h[j] = 0;
    rec(j + 1, prod);
    for (int k = 1;; ++k) {
      double f = std::max(1.0, k / w[j]);
      if (prod * f > threshold) break;
      h[j] = k;
      rec(j + 1, prod * f);
      h[j] = -k;
      rec(j + 1, prod * f);
    }
    h[j] = 0;
  };
  rec(0, 1.0);
  return A;
}

IndexSet hyperbolic_cross_with_budget(std::span<const double> w, std::size_t budget) {
  if (budget == 0) throw std::invalid_argument("hyperbolic cross budget must be positive");
  double lo = 1.0, hi = 2.0;
  IndexSet best = hyperbolic_cross(w, lo);
  if (best.size() > budget) {
    // Only the frequencies with |h_j| <= w_j remain; fall back to {0}.
    best.freqs.assign(1, Frequency(w.size(), 0));
    return best;
  }
  while (hyperbolic_cross(w, hi).size() <= budget && hi < 1e12) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (hyperbolic_cross(w, mid).size() <= budget) lo = mid;
    else hi = mid;
  }
  return hyperbolic_cross(w, lo);
}

std::vector<Complex> trig_coefficients(std::span<const double> samples, const GeneratingVector& gv,
                                       const IndexSet& A) {
  check_samples(samples, gv);
  const std::size_t n = gv.modulus();
  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i) x[cyclic(i, n)] = samples[i];
  fft_inplace(x, false);
  std::vector<Complex> out(A.size());
  for (std::size_t a = 0; a < A.size(); ++a) out[a] = x[residue(A.freqs[a], gv)] / static_cast<double>(n);
  return out;
}

std::vector<Complex> trig_coefficients_direct(std::span<const double> samples, const GeneratingVector& gv,
                                              const IndexSet& A) {
  check_samples(samples, gv);
  const std::size_t n = gv.modulus();
  std::vector<Complex> out(A.size());
  for (std::size_t a = 0; a < A.size(); ++a) {
    const std::size_t r = residue(A.freqs[a], gv);
    Complex acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t k = cyclic(i, n);
      double ang = -kTwoPi * static_cast<double>((k * r) % n) / static_cast<double>(n);
      acc += samples[i] * Complex(std::cos(ang), std::sin(ang));
    }
    out[a] = acc / static_cast<double>(n);
  }
  return out;
}

double trig_evaluate(std::span<const Complex> coeffs, const IndexSet& A, std::span<const double> y) {
  if (coeffs.size() != A.size()) throw std::invalid_argument("trig_evaluate: coefficient count mismatch");
  if (y.size() != A.dimension) throw std::invalid_argument("trig_evaluate: point dimension mismatch");
  std::map<Frequency, std::size_t> where;
  double scale = 0.0;
  for (std::size_t a = 0; a < A.size(); ++a) {
    where[A.freqs[a]] = a;
    scale = std::max(scale, std::abs(coeffs[a]));
  }
  for (std::size_t a = 0; a < A.size(); ++a) {
    Frequency neg = A.freqs[a];
    for (int& v : neg) v = -v;
    auto it = where.find(neg);
    if (it == where.end() || std::abs(coeffs[it->second] - std::conj(coeffs[a])) > 1e-12 * std::max(scale, 1e-300)) {
      throw std::invalid_argument("trig_evaluate: coefficients are not conjugate-symmetric");
    }
  }
  double acc = 0.0;
  for (std::size_t a = 0; a < A.size(); ++a) {
    double phase = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) phase += A.freqs[a][j] * y[j];
    phase = kTwoPi * (phase - std::floor(phase));
    acc += coeffs[a].real() * std::cos(phase) - coeffs[a].imag() * std::sin(phase);
  }
  return acc;
}

double kernel_value(const KernelSpec& spec, std::span<const double> y, std::span<const double> yp) {
  check_spec(spec, y.size());
  const SpaceSetting setting = SpaceSetting::korobov_hilbert(spec.alpha);
  double prod = 1.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    double d = y[j] - yp[j];
    d -= std::floor(d);
    prod *= 1.0 + spec.gamma[j] * kernel_omega(setting, d);
  }
  return prod;
}

std::vector<double> kernel_circulant_column(const GeneratingVector& gv, const KernelSpec& spec) {
  const std::size_t n = gv.modulus();
  const std::size_t s = gv.dimension();
  check_spec(spec, s);
  const auto table = kernel_table(SpaceSetting::korobov_hilbert(spec.alpha), n);
  std::vector<double> c(n, 1.0);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t j = 0; j < s; ++j) {
      c[d] *= 1.0 + spec.gamma[j] * table[static_cast<std::size_t>((static_cast<unsigned __int128>(d) * gv[j]) % n)];
    }
  }
  return c;
}

std::vector<Complex> circulant_eigenvalues(const GeneratingVector& gv, const KernelSpec& spec) {
  auto c = kernel_circulant_column(gv, spec);
  return fft_pow2(std::vector<Complex>(c.begin(), c.end()));
}

std::vector<double> kernel_matrix_apply(std::span<const double> a, const GeneratingVector& gv,
                                        const KernelSpec& spec) {
  check_samples(a, gv);
  const std::size_t n = gv.modulus();
  auto eig = circulant_eigenvalues(gv, spec);
  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i) x[cyclic(i, n)] = a[i];
  fft_inplace(x, false);
  for (std::size_t r = 0; r < n; ++r) x[r] *= eig[r];
  fft_inplace(x, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[cyclic(i, n)].real();
  return out;
}

std::vector<double> kernel_fit(std::span<const double> samples, const GeneratingVector& gv,
                               const KernelSpec& spec) {
  check_samples(samples, gv);
  const std::size_t n = gv.modulus();
  auto eig = circulant_eigenvalues(gv, spec);
  double largest = 0.0;
  for (const auto& e : eig) largest = std::max(largest, std::abs(e));
  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i) x[cyclic(i, n)] = samples[i];
  fft_inplace(x, false);
  for (std::size_t r = 0; r < n; ++r) {
    if (std::abs(eig[r]) <= 1e-14 * largest) {
      throw std::domain_error("kernel matrix is singular (eigenvalue " + std::to_string(r) +
                              " vanishes); increase the kernel weights");
    }
    x[r] /= eig[r];
  }
  fft_inplace(x, true);
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = x[cyclic(i, n)].real();
  return a;
}

double kernel_predict(std::span<const double> a, const GeneratingVector& gv, const KernelSpec& spec,
                      std::span<const double> y) {
  check_samples(a, gv);
  const std::size_t s = gv.dimension();
  if (y.size() != s) throw std::invalid_argument("kernel_predict: point dimension mismatch");
  check_spec(spec, s);
  const SpaceSetting setting = SpaceSetting::korobov_hilbert(spec.alpha);
  const std::size_t n = gv.modulus();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t k = (i + 1) % n;
    double prod = 1.0;
    for (std::size_t j = 0; j < s; ++j) {
      double t = static_cast<double>(static_cast<std::uint64_t>((static_cast<unsigned __int128>(k) * gv[j]) % n)) / n;
      double d = y[j] - t;
      d -= std::floor(d);
      prod *= 1.0 + spec.gamma[j] * kernel_omega(setting, d);
    }
    acc += a[i] * prod;
  }
  return acc;
}

}  // namespace latnet

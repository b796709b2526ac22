#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "latnet/fft.hpp"
#include "latnet/lattice.hpp"

namespace latnet {

using Frequency = std::vector<int>;

// Finite set of integer frequencies; contains 0 and is closed under negation.
struct IndexSet {
  std::size_t dimension = 0;
  std::vector<Frequency> freqs;

  std::size_t size() const { return freqs.size(); }
};

// Weighted hyperbolic cross {h : prod_j max(1, |h_j| / w_j) <= T}.
IndexSet hyperbolic_cross(std::span<const double> w, double threshold);

// Largest hyperbolic cross (over a bisection in T) with at most `budget` elements.
IndexSet hyperbolic_cross_with_budget(std::span<const double> w, std::size_t budget);

// F^_h = (1/N) sum_k F(t_k) e^{-2 pi i h.t_k} for the unshifted lattice; samples
// are in lattice order (sample i belongs to point i+1). N must be a power of two.
std::vector<Complex> trig_coefficients(std::span<const double> samples, const GeneratingVector& gv,
                                       const IndexSet& A);
// Same values by direct summation, any N.
std::vector<Complex> trig_coefficients_direct(std::span<const double> samples, const GeneratingVector& gv,
                                              const IndexSet& A);

// Real part of sum_h c_h e^{2 pi i h.y}; rejects coefficient sets that are not
// conjugate-symmetric to within 1e-12 relative.
double trig_evaluate(std::span<const Complex> coeffs, const IndexSet& A, std::span<const double> y);

// K(y, y') = prod_j (1 + gamma_j omega_alpha({y_j - y'_j})) with the periodic
// Korobov kernel omega_alpha of smoothness alpha.
struct KernelSpec {
  int alpha = 1;
  std::vector<double> gamma;
};

double kernel_value(const KernelSpec& spec, std::span<const double> y, std::span<const double> yp);

// First column of the circulant kernel matrix, c_d = K(t_d, 0), d = 0..N-1.
std::vector<double> kernel_circulant_column(const GeneratingVector& gv, const KernelSpec& spec);

// Eigenvalues of the circulant kernel matrix (FFT of its first column).
std::vector<Complex> circulant_eigenvalues(const GeneratingVector& gv, const KernelSpec& spec);

// K a, with a and the result in lattice order.
std::vector<double> kernel_matrix_apply(std::span<const double> a, const GeneratingVector& gv,
                                        const KernelSpec& spec);

// Solves K a = F through the FFT diagonalisation of the circulant system.
std::vector<double> kernel_fit(std::span<const double> samples, const GeneratingVector& gv,
                               const KernelSpec& spec);

double kernel_predict(std::span<const double> a, const GeneratingVector& gv, const KernelSpec& spec,
                      std::span<const double> y);

}  // namespace latnet

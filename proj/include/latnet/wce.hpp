#pragma once

#include <cstddef>
#include <vector>

#include "latnet/lattice.hpp"
#include "latnet/setting.hpp"
#include "latnet/weights.hpp"

namespace latnet {

// One-dimensional shift-invariant kernel of the setting, x in [0,1):
//   a: B_2(x)
//   b: (-1)^{alpha+1} B_{2 alpha}(x) / (2 alpha)!
//   c: sum_{h != 0} e^{2 pi i h x} / (2 pi |h|)^alpha, through B_alpha for even
//      alpha and a truncated cosine series (tail < 1e-12) for odd alpha.
double kernel_omega(const SpaceSetting& setting, double x);

// kernel_omega at k/N for k = 0..N-1.
std::vector<double> kernel_table(const SpaceSetting& setting, std::size_t n);

// sum_{u != empty} gamma_u (1/N) sum_k prod_{j in u} omega(t_{k,j}).
// This is e^2 for settings a and b and e itself for setting c.
double wce_criterion(const GeneratingVector& gv, const WeightScheme& w,
                     const SpaceSetting& setting);

// The worst-case error e_N itself (square root for settings a and b).
double worst_case_error(const GeneratingVector& gv, const WeightScheme& w,
                        const SpaceSetting& setting);

// Right-hand side of the CBC error bound at lambda, with the exponent
// 1/(2 lambda) for settings a, b and 1/lambda for c. Throws std::domain_error
// outside the admissible interval. For SPOD weights the sum over u uses the
// same upper majorant as weighted_power_sum.
double theoretical_bound(std::size_t n, const WeightScheme& w, double lambda,
                         const SpaceSetting& setting);

// `count` log-spaced points in [lambda_lower + offset, 1].
std::vector<double> lambda_grid(const SpaceSetting& setting, std::size_t count = 20,
                                double offset = 1e-3);

struct CbcOptions {
  unsigned threads = 1;
};

struct CbcResult {
  GeneratingVector gv{1, {}};
  // trace[j] = criterion after fixing z_1..z_{j+1}
  std::vector<double> trace;
};

// Greedy component-by-component minimisation of wce_criterion. Ties within a
// relative 1e-14 go to the smallest z.
CbcResult cbc_construct(std::size_t n, std::size_t s, const WeightScheme& w,
                        const SpaceSetting& setting, const CbcOptions& options = {});

// Criterion value for every candidate z, indexed by z = 0..N-1, given the
// fixed prefix; entries with gcd(z,N) != 1 (z = 0 included) are NaN. The next
// component index is prefix.dimension().
std::vector<double> cbc_candidates(const GeneratingVector& prefix, const WeightScheme& w,
                                   const SpaceSetting& setting);

struct WorstCaseReport {
  double error = 0;
  std::vector<double> lambdas;
  std::vector<double> bounds;
  bool dominated = true;  // error <= every bound
};

WorstCaseReport bound_report(const GeneratingVector& gv, const WeightScheme& w,
                             const SpaceSetting& setting, std::size_t grid_points = 20);

}  // namespace latnet

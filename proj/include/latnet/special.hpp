#pragma once

#include <cstdint>

namespace latnet {

using u128 = unsigned __int128;

// Bernoulli number B_n (B_1 = -1/2) for 0 <= n <= 30.
double bernoulli_number(int n);

// Bernoulli polynomial B_n(x), 0 <= n <= 12, x in [0,1].
double bernoulli_poly(int n, double x);

// Riemann zeta for real x >= 1.001, absolute accuracy better than 1e-12.
// Euler-Maclaurin: direct sum of the first 19 terms plus the integral tail and
// six Bernoulli corrections.
double riemann_zeta(double x);

// Stirling numbers of the second kind, exact, 0 <= n, k <= 30.
u128 stirling2_exact(int n, int k);
double stirling2(int n, int k);

// Eulerian numbers E(n, k), exact, 0 <= n <= 15.
std::uint64_t eulerian(int n, int k);

// n! as a double for 0 <= n <= 170.
double factorial(int n);

// log(n!) for any n >= 0.
long double log_factorial(int n);

}  // namespace latnet

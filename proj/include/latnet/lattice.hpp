#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "latnet/rng.hpp"

namespace latnet {

// Modulus N and integer components z_1..z_s of a rank-1 lattice.
// Every component satisfies 1 <= z_j <= N-1 and gcd(z_j, N) = 1; N = 1 is
// accepted only with an empty z or with all components equal to 0, since
// Z_1 is empty but the single point is still well defined.
class GeneratingVector {
 public:
  GeneratingVector(std::uint64_t modulus, std::vector<std::uint64_t> components);

  std::uint64_t modulus() const { return n_; }
  std::size_t dimension() const { return z_.size(); }
  const std::vector<std::uint64_t>& components() const { return z_; }
  std::uint64_t operator[](std::size_t j) const { return z_[j]; }

  // Copy restricted to the first `s` components.
  GeneratingVector prefix(std::size_t s) const;

  bool operator==(const GeneratingVector&) const = default;

 private:
  std::uint64_t n_;
  std::vector<std::uint64_t> z_;
};

// True when 1 <= z <= N-1 and gcd(z, N) = 1.
bool in_unit_group(std::uint64_t z, std::uint64_t modulus);

// Row-major N x s matrix of points in [0,1)^s.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t rows, std::size_t dim);

  std::size_t size() const { return rows_; }
  std::size_t dimension() const { return dim_; }

  std::span<const double> row(std::size_t k) const {
    return {data_.data() + k * dim_, dim_};
  }
  std::span<double> row(std::size_t k) { return {data_.data() + k * dim_, dim_}; }
  double operator()(std::size_t k, std::size_t j) const { return data_[k * dim_ + j]; }
  double& operator()(std::size_t k, std::size_t j) { return data_[k * dim_ + j]; }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

using Shift = std::vector<double>;

// Points t_k = {k z / N} for k = 1..N, stored in that order; the last row is
// the origin (k = N). Residues k z_j mod N are formed in exact integer
// arithmetic before the division by N.
PointSet lattice_points(const GeneratingVector& gv);

// Entry (k, j) becomes frac(p(k, j) + shift_j).
PointSet shift_points(const PointSet& points, std::span<const double> shift);

// Equal-weight rule (1/N) sum_k f(t_k).
double qmc_integrate(const std::function<double(std::span<const double>)>& f,
                     const PointSet& points);

// s independent uniforms in [0,1) drawn from `rng`.
Shift random_shift(Rng& rng, std::size_t s);

// Generating-vector file: first non-comment line is N, then one component
// per line. Blank lines and text after '#' are ignored.
GeneratingVector load_generating_vector(const std::filesystem::path& path);
void save_generating_vector(const GeneratingVector& gv, const std::filesystem::path& path);

}  // namespace latnet

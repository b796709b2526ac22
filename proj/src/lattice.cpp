#include "latnet/lattice.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace latnet {

bool in_unit_group(std::uint64_t z, std::uint64_t modulus) {
  return z >= 1 && z < modulus && std::gcd(z, modulus) == 1;
}

GeneratingVector::GeneratingVector(std::uint64_t modulus, std::vector<std::uint64_t> components)
    : n_(modulus), z_(std::move(components)) {
  if (n_ == 0) throw std::invalid_argument("generating vector: modulus must be positive");
  for (std::size_t j = 0; j < z_.size(); ++j) {
    if (n_ == 1) {
      if (z_[j] != 0) {
        throw std::invalid_argument("generating vector: N = 1 requires z_j = 0");
      }
      continue;
    }
    if (!in_unit_group(z_[j], n_)) {
      throw std::invalid_argument("generating vector: component z_" + std::to_string(j + 1) +
                                  " = " + std::to_string(z_[j]) + " is not coprime to N = " +
                                  std::to_string(n_) + " or outside [1, N-1]");
    }
  }
}

GeneratingVector GeneratingVector::prefix(std::size_t s) const {
  if (s > z_.size()) throw std::out_of_range("generating vector: prefix longer than dimension");
  return {n_, std::vector<std::uint64_t>(z_.begin(), z_.begin() + static_cast<std::ptrdiff_t>(s))};
}

PointSet::PointSet(std::size_t rows, std::size_t dim)
    : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}

PointSet lattice_points(const GeneratingVector& gv) {
  const std::uint64_t n = gv.modulus();
  const std::size_t s = gv.dimension();
  PointSet p(n, s);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < s; ++j) {
    // Residue of k z_j mod N, advanced incrementally for k = 1..N.
    std::uint64_t r = 0;
    for (std::uint64_t k = 1; k <= n; ++k) {
      r += gv[j];
      if (r >= n) r -= n;
      p(k - 1, j) = static_cast<double>(r) * inv_n;
    }
  }
  return p;
}

PointSet shift_points(const PointSet& points, std::span<const double> shift) {
  if (shift.size() != points.dimension()) {
    throw std::invalid_argument("shift_points: shift has dimension " +
                                std::to_string(shift.size()) + ", points have " +
                                std::to_string(points.dimension()));
  }
  PointSet out = points;
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto r = out.row(k);
    for (std::size_t j = 0; j < r.size(); ++j) {
      double x = r[j] + shift[j];
      x -= std::floor(x);
      // floor can leave exactly 1.0 after rounding of tiny negatives.
      r[j] = x >= 1.0 ? 0.0 : x;
    }
  }
  return out;
}

double qmc_integrate(const std::function<double(std::span<const double>)>& f,
                     const PointSet& points) {
  if (points.size() == 0) throw std::invalid_argument("qmc_integrate: empty point set");
  double sum = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) sum += f(points.row(k));
  return sum / static_cast<double>(points.size());
}

Shift random_shift(Rng& rng, std::size_t s) {
  Shift d(s);
  for (auto& x : d) x = rng.uniform();
  return d;
}

namespace {

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  std::string body = pos == std::string::npos ? line : line.substr(0, pos);
  auto first = body.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  auto last = body.find_last_not_of(" \t\r");
  return body.substr(first, last - first + 1);
}

std::uint64_t parse_u64(const std::string& text, const std::filesystem::path& path, int line_no) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                             ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

}  // namespace

GeneratingVector load_generating_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open generating vector file " + path.string());
  std::string line;
  int line_no = 0;
  bool have_n = false;
  std::uint64_t n = 0;
  std::vector<std::uint64_t> z;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = strip_comment(line);
    if (body.empty()) continue;
    std::uint64_t v = parse_u64(body, path, line_no);
    if (!have_n) {
      n = v;
      have_n = true;
    } else {
      z.push_back(v);
    }
  }
  if (!have_n) throw std::runtime_error(path.string() + ": missing modulus line");
  return {n, std::move(z)};
}

void save_generating_vector(const GeneratingVector& gv, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write generating vector file " + path.string());
  out << "# rank-1 lattice generating vector: N, then z_1..z_s\n";
  out << gv.modulus() << '\n';
  for (auto zj : gv.components()) out << zj << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace latnet

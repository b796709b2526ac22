#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latnet/lattice.hpp"
#include "latnet/network.hpp"
#include "latnet/training.hpp"
#include "latnet/weights.hpp"

namespace latnet {

// G(y) = 1 / (1 + sum_j sin(2 pi y_j) psi_j), psi_j = eta / j^q.
class PeriodicAlgebraicTarget {
 public:
  PeriodicAlgebraicTarget(double eta, double q, std::size_t s);

  double eta() const { return eta_; }
  double q() const { return q_; }
  std::size_t dimension() const { return s_; }
  double psi(std::size_t j) const;  // 1-based
  double a_min() const { return a_min_; }
  double C() const { return 1.0 / a_min_; }
  // b_j = psi_j / a_min with summability exponent 1/q.
  DecaySequence decay() const;

  double operator()(std::span<const double> y) const;
  VectorTarget as_vector_target() const;

 private:
  double eta_, q_;
  std::size_t s_;
  double a_min_;
};

enum class RegMode { Tailored, Standard };
std::string to_string(RegMode m);
RegMode parse_reg_mode(const std::string& text);

struct ExperimentSpec {
  std::size_t s = 10;
  std::size_t depth = 3;
  std::size_t width = 32;
  std::size_t n_obs = 1;
  std::vector<Activation> activations{Activation::sigmoid(1.0)};
  std::vector<RegMode> modes{RegMode::Tailored, RegMode::Standard};
  std::vector<std::size_t> n_grid{64, 128, 256, 512, 1024};
  std::size_t repetitions = 5;
  std::uint64_t seed = 1;
  double lambda = 1e-8;
  double lambda1 = 1e-8;
  int m = 6;
  double learning_rate = 1e-4;
  std::size_t max_epochs = 40000;
  double tol = 1e-3;
  double eta = 0.5;
  double q = 2.5;
  std::size_t eval_points = kDefaultEvaluationPoints;
  std::optional<std::filesystem::path> gv_file;
  unsigned threads = 1;

  // Hyperparameter set 1: L = 3, width 32; set 2: L = 12, width 30.
  void use_hyperparameter_set(int id);
  std::vector<std::size_t> dims() const { return uniform_dims(s, depth, width, n_obs); }
  void validate() const;
};

// Line-oriented key=value file; '#' starts a comment. Unknown keys are
// rejected. Lists are comma-separated.
ExperimentSpec parse_experiment_config(std::istream& in, const std::string& origin = "<config>");
ExperimentSpec load_experiment_config(const std::filesystem::path& path);
void write_experiment_config(const ExperimentSpec& spec, std::ostream& out);

struct ExperimentRecord {
  std::string activation;
  RegMode mode = RegMode::Tailored;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  double E_T = 0;
  double E_G = 0;
  double gap = 0;
  std::size_t epochs = 0;
  double wall_seconds = 0;
  std::string error;                // non-empty when the cell aborted
  std::vector<double> beta;         // first-layer column norms after training
};

// Seeds of repetition i: base seed + i, split into independent streams.
struct RunSeeds {
  std::uint64_t run = 0;
  std::uint64_t training_shift = 0;
  std::uint64_t init = 0;
  std::uint64_t evaluation_shift = 0;
};
RunSeeds run_seeds(std::uint64_t base, std::size_t repetition);

// Training lattice for N points: the loaded generating vector reduced mod N
// (an embedded rule) or a CBC vector built with the Korobov SPOD weights of
// the target's decay sequence.
GeneratingVector training_vector(const ExperimentSpec& spec, std::size_t n);
GeneratingVector evaluation_vector(const ExperimentSpec& spec);

using ProgressFn = std::function<void(const ExperimentRecord&)>;

std::vector<ExperimentRecord> run_experiment(const ExperimentSpec& spec, const ProgressFn& progress = {});

struct AggregateRow {
  std::string activation;
  RegMode mode = RegMode::Tailored;
  std::size_t N = 0;
  std::size_t runs = 0;
  double E_T = 0;
  double E_G = 0;
  double gap = 0;
  double epochs = 0;
};

// Arithmetic means over seeds, in (activation, mode, N) order of first appearance.
std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records);

struct RateFit {
  double slope = 0;
  double intercept = 0;
  std::size_t used = 0;
  std::size_t dropped = 0;
};

// Least squares on (log2 N, log2 value); nonpositive values are dropped.
RateFit rate_fit(std::span<const double> n, std::span<const double> values);

// Slope of log beta_j against log j for j = 1..s.
double log_log_slope(std::span<const double> values);

// 17 significant digits.
std::string format_double(double x);

void write_records_csv(const std::vector<ExperimentRecord>& records, std::ostream& out);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
// Columns panel,series,x,y with one panel per (activation, mode) and the
// series E_T, E_G_est and gap against N.
void write_plot_data(const std::vector<AggregateRow>& rows, std::ostream& out);

struct Dataset {
  PointSet points;
  Eigen::MatrixXd targets;  // n_obs x N
};

// CSV with a header row and s + n_obs numeric columns per line.
Dataset ingest_dataset(const std::filesystem::path& path, std::size_t n_obs = 1);
void export_dataset(const Dataset& data, const std::filesystem::path& path);

}  // namespace latnet

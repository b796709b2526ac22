#include "latnet/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "latnet/special.hpp"
#include "latnet/wce.hpp"

namespace latnet {

// ---------------------------------------------------------------------------
// Target

PeriodicAlgebraicTarget::PeriodicAlgebraicTarget(double eta, double q, std::size_t s)
    : eta_(eta), q_(q), s_(s) {
  if (!(eta > 0) || !(q > 1)) throw std::invalid_argument("target: need eta > 0 and q > 1");
  const double z = eta * riemann_zeta(q);
  if (!(z < 1.0)) throw std::invalid_argument("target: eta * zeta(q) must be < 1");
  a_min_ = 1.0 - z;
}

double PeriodicAlgebraicTarget::psi(std::size_t j) const { return eta_ / std::pow(static_cast<double>(j), q_); }

DecaySequence PeriodicAlgebraicTarget::decay() const {
  return DecaySequence::algebraic(eta_, q_, a_min_, 1.0 / q_);
}

double PeriodicAlgebraicTarget::operator()(std::span<const double> y) const {
  double a = 1.0;
  for (std::size_t j = 0; j < y.size(); ++j) a += std::sin(2.0 * std::numbers::pi * y[j]) * psi(j + 1);
  return 1.0 / a;
}

VectorTarget PeriodicAlgebraicTarget::as_vector_target() const {
  return [t = *this](std::span<const double> y) {
    Eigen::VectorXd out(1);
    out(0) = t(y);
    return out;
  };
}

std::string to_string(RegMode m) { return m == RegMode::Tailored ? "tailored" : "standard"; }

RegMode parse_reg_mode(const std::string& text) {
  if (text == "tailored") return RegMode::Tailored;
  if (text == "standard" || text == "l2") return RegMode::Standard;
  throw std::invalid_argument("unknown regularization mode '" + text + "'");
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentSpec::use_hyperparameter_set(int id) {
  if (id == 1) {
    depth = 3;
    width = 32;
  } else if (id == 2) {
    depth = 12;
    width = 30;
  } else {
    throw std::invalid_argument("hyperparameter set must be 1 or 2");
  }
  n_obs = 1;
}

void ExperimentSpec::validate() const {
  if (s == 0 || depth == 0 || width == 0 || n_obs == 0) throw std::invalid_argument("experiment: sizes must be positive");
  if (n_obs != 1) throw std::invalid_argument("experiment: the built-in target has one observable");
  if (repetitions == 0) throw std::invalid_argument("experiment: repetitions must be >= 1");
  if (activations.empty() || modes.empty() || n_grid.empty()) throw std::invalid_argument("experiment: empty grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2 || (n_grid[i] & (n_grid[i] - 1)) != 0) {
      throw std::invalid_argument("experiment: N grid must contain powers of two >= 2");
    }
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw std::invalid_argument("experiment: N grid must be ascending");
  }
  if (eval_points < 2 || (eval_points & (eval_points - 1)) != 0) {
    throw std::invalid_argument("experiment: eval_points must be a power of two");
  }
  TrainConfig c;
  c.learning_rate = learning_rate;
  c.tol = tol;
  c.m = m;
  c.lambda = lambda;
  c.lambda1 = lambda1;
  c.validate();
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  double x = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("not a number: '" + v + "'");
  return x;
}

std::uint64_t to_uint(const std::string& v) {
  std::size_t pos = 0;
  if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative value: '" + v + "'");
  unsigned long long x = std::stoull(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
  return x;
}

}  // namespace

ExperimentSpec parse_experiment_config(std::istream& in, const std::string& origin) {
  ExperimentSpec spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    auto where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "hyperparameter_set") spec.use_hyperparameter_set(static_cast<int>(to_uint(val)));
      else if (key == "s") spec.s = to_uint(val);
      else if (key == "depth") spec.depth = to_uint(val);
      else if (key == "width") spec.width = to_uint(val);
      else if (key == "n_obs") spec.n_obs = to_uint(val);
      else if (key == "activations") {
        spec.activations.clear();
        for (auto& a : split_list(val)) spec.activations.push_back(parse_activation(a));
      } else if (key == "modes") {
        spec.modes.clear();
        for (auto& m : split_list(val)) spec.modes.push_back(parse_reg_mode(m));
      } else if (key == "n_grid") {
        spec.n_grid.clear();
        for (auto& n : split_list(val)) spec.n_grid.push_back(to_uint(n));
      } else if (key == "repetitions") spec.repetitions = to_uint(val);
      else if (key == "seed") spec.seed = to_uint(val);
      else if (key == "lambda") spec.lambda = to_double(val);
      else if (key == "lambda1") spec.lambda1 = to_double(val);
      else if (key == "m") spec.m = static_cast<int>(to_uint(val));
      else if (key == "learning_rate") spec.learning_rate = to_double(val);
      else if (key == "max_epochs") spec.max_epochs = to_uint(val);
      else if (key == "tol") spec.tol = to_double(val);
      else if (key == "eta") spec.eta = to_double(val);
      else if (key == "q") spec.q = to_double(val);
      else if (key == "eval_points") spec.eval_points = to_uint(val);
      else if (key == "gv_file") spec.gv_file = val;
      else if (key == "threads") spec.threads = static_cast<unsigned>(to_uint(val));
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + ": " + e.what());
    } catch (const std::out_of_range&) {
      throw std::invalid_argument(where + ": value out of range for '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_experiment_config(in, path.string());
}

void write_experiment_config(const ExperimentSpec& spec, std::ostream& out) {
  auto join = [](const auto& items, auto fmt) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + fmt(items[i]);
    return s;
  };
  out << "s=" << spec.s << "\n"
      << "depth=" << spec.depth << "\n"
      << "width=" << spec.width << "\n"
      << "n_obs=" << spec.n_obs << "\n"
      << "activations=" << join(spec.activations, [](const Activation& a) { return a.name(); }) << "\n"
      << "modes=" << join(spec.modes, [](RegMode m) { return to_string(m); }) << "\n"
      << "n_grid=" << join(spec.n_grid, [](std::size_t n) { return std::to_string(n); }) << "\n"
      << "repetitions=" << spec.repetitions << "\n"
      << "seed=" << spec.seed << "\n"
      << "lambda=" << format_double(spec.lambda) << "\n"
      << "lambda1=" << format_double(spec.lambda1) << "\n"
      << "m=" << spec.m << "\n"
      << "learning_rate=" << format_double(spec.learning_rate) << "\n"
      << "max_epochs=" << spec.max_epochs << "\n"
      << "tol=" << format_double(spec.tol) << "\n"
      << "eta=" << format_double(spec.eta) << "\n"
      << "q=" << format_double(spec.q) << "\n"
      << "eval_points=" << spec.eval_points << "\n";
  if (spec.gv_file) out << "gv_file=" << spec.gv_file->string() << "\n";
}

// ---------------------------------------------------------------------------
// Experiment

RunSeeds run_seeds(std::uint64_t base, std::size_t repetition) {
  RunSeeds r;
  r.run = base + repetition;
  r.training_shift = derive_seed(r.run, 1);
  r.init = derive_seed(r.run, 2);
  r.evaluation_shift = derive_seed(r.run, 3);
  return r;
}

namespace {

GeneratingVector reduce(const GeneratingVector& gv, std::size_t n, std::size_t s) {
  if (gv.modulus() % n != 0) {
    throw std::invalid_argument("generating vector modulus " + std::to_string(gv.modulus()) +
                                " is not a multiple of " + std::to_string(n));
  }
  if (gv.dimension() < s) throw std::invalid_argument("generating vector has too few components");
  std::vector<std::uint64_t> z(s);
  for (std::size_t j = 0; j < s; ++j) z[j] = gv[j] % n;
  return GeneratingVector(n, std::move(z));
}

GeneratingVector constructed_vector(const ExperimentSpec& spec, std::size_t n, unsigned threads) {
  const PeriodicAlgebraicTarget target(spec.eta, spec.q, spec.s);
  const DecaySequence b = target.decay();
  const RatePlan plan = select_rate_plan(b.p_star(), SpaceKind::KorobovHilbert);
  const WeightScheme w = build_weights(plan.setting, b, plan, spec.s);
  CbcOptions opt;
  opt.threads = threads;
  return cbc_construct(n, spec.s, w, plan.setting, opt).gv;
}

}  // namespace

GeneratingVector training_vector(const ExperimentSpec& spec, std::size_t n) {
  if (spec.gv_file) return reduce(load_generating_vector(*spec.gv_file), n, spec.s);
  return constructed_vector(spec, n, spec.threads);
}

GeneratingVector evaluation_vector(const ExperimentSpec& spec) {
  if (spec.gv_file) {
    GeneratingVector gv = load_generating_vector(*spec.gv_file);
    if (gv.modulus() >= spec.eval_points) return reduce(gv, spec.eval_points, spec.s);
  }
  return constructed_vector(spec, spec.eval_points, spec.threads);
}

std::vector<ExperimentRecord> run_experiment(const ExperimentSpec& spec, const ProgressFn& progress) {
  spec.validate();
  const PeriodicAlgebraicTarget target(spec.eta, spec.q, spec.s);
  const std::vector<double> b = target.decay().values(spec.s);
  const VectorTarget fn = target.as_vector_target();

  std::map<std::size_t, PointSet> base_points;
  for (std::size_t n : spec.n_grid) base_points.emplace(n, lattice_points(training_vector(spec, n)));
  const PointSet eval_base = lattice_points(evaluation_vector(spec));

  struct Cell {
    std::size_t activation, mode, n, rep;
  };
  std::vector<Cell> cells;
  for (std::size_t a = 0; a < spec.activations.size(); ++a)
    for (std::size_t m = 0; m < spec.modes.size(); ++m)
      for (std::size_t i = 0; i < spec.n_grid.size(); ++i)
        for (std::size_t r = 0; r < spec.repetitions; ++r) cells.push_back({a, m, i, r});

  std::vector<ExperimentRecord> records(cells.size());
  const auto dims = spec.dims();

  auto run_cell = [&](std::size_t idx) {
    const Cell& c = cells[idx];
    const RunSeeds seeds = run_seeds(spec.seed, c.rep);
    const std::size_t n = spec.n_grid[c.n];
    ExperimentRecord rec;
    rec.activation = spec.activations[c.activation].name();
    rec.mode = spec.modes[c.mode];
    rec.N = n;
    rec.seed = seeds.run;
    const auto start = std::chrono::steady_clock::now();
    try {
      Rng shift_rng(seeds.training_shift);
      const PointSet pts = shift_points(base_points.at(n), random_shift(shift_rng, spec.s));
      const Eigen::MatrixXd X = to_matrix(pts);
      const Eigen::MatrixXd Y = evaluate_targets(fn, pts, 1);
      Rng init_rng(seeds.init);
      const Network net0 = glorot_init(dims, spec.activations[c.activation], true, init_rng);
      TrainConfig cfg;
      cfg.learning_rate = spec.learning_rate;
      cfg.max_epochs = spec.max_epochs;
      cfg.tol = spec.tol;
      cfg.lambda = spec.lambda;
      cfg.lambda1 = rec.mode == RegMode::Tailored ? spec.lambda1 : 0.0;
      cfg.m = spec.m;
      cfg.seed = seeds.run;
      const TrainResult tr = train(cfg, net0, X, Y, b);
      Rng eval_rng(seeds.evaluation_shift);
      const PointSet eval_pts = shift_points(eval_base, random_shift(eval_rng, spec.s));
      const ErrorEstimate est = estimate_generalization(tr.net, fn, eval_pts, tr.final_error, seeds.evaluation_shift);
      rec.E_T = est.E_T;
      rec.E_G = est.E_G;
      rec.gap = est.gap;
      rec.epochs = tr.epochs;
      rec.beta.resize(spec.s);
      for (std::size_t j = 0; j < spec.s; ++j) rec.beta[j] = tr.net.W[0].col(j).cwiseAbs().maxCoeff();
    } catch (const std::exception& e) {
      rec.error = e.what();
      rec.E_T = rec.E_G = rec.gap = std::nan("");
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records[idx] = std::move(rec);
  };

  std::mutex report_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx; (idx = next.fetch_add(1)) < cells.size();) {
      run_cell(idx);
      if (progress) {
        std::lock_guard lock(report_mutex);
        progress(records[idx]);
      }
    }
  };
  const unsigned t = std::max(1u, spec.threads);
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records) {
  std::vector<AggregateRow> rows;
  std::map<std::tuple<std::string, int, std::size_t>, std::size_t> where;
  for (const auto& r : records) {
    if (!r.error.empty()) continue;
    auto key = std::make_tuple(r.activation, static_cast<int>(r.mode), r.N);
    auto it = where.find(key);
    if (it == where.end()) {
      it = where.emplace(key, rows.size()).first;
      AggregateRow row;
      row.activation = r.activation;
      row.mode = r.mode;
      row.N = r.N;
      rows.push_back(row);
    }
    AggregateRow& row = rows[it->second];
    row.runs += 1;
    row.E_T += r.E_T;
    row.E_G += r.E_G;
    row.gap += r.gap;
    row.epochs += static_cast<double>(r.epochs);
  }
  for (auto& row : rows) {
    const double k = static_cast<double>(row.runs);
    row.E_T /= k;
    row.E_G /= k;
    row.gap /= k;
    row.epochs /= k;
  }
  return rows;
}

RateFit rate_fit(std::span<const double> n, std::span<const double> values) {
  if (n.size() != values.size()) throw std::invalid_argument("rate_fit: length mismatch");
  std::vector<double> x, y;
  RateFit fit;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(values[i] > 0) || !(n[i] > 0)) {
      std::cerr << "warning: rate_fit drops the point N=" << n[i] << " with value " << values[i] << "\n";
      ++fit.dropped;
      continue;
    }
    x.push_back(std::log2(n[i]));
    y.push_back(std::log2(values[i]));
  }
  fit.used = x.size();
  if (fit.used < 3) throw std::invalid_argument("rate_fit: need at least 3 positive points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("rate_fit: all N are equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double log_log_slope(std::span<const double> values) {
  std::vector<double> j(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) j[i] = static_cast<double>(i + 1);
  // log2/log2 slope equals the natural-log slope.
  return rate_fit(j, values).slope;
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void write_records_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  out << "activation,mode,N,seed,E_T,E_G_est,gap,epochs,wall_s\n";
  for (const auto& r : records) {
    out << r.activation << ',' << to_string(r.mode) << ',' << r.N << ',' << r.seed << ','
        << format_double(r.E_T) << ',' << format_double(r.E_G) << ',' << format_double(r.gap) << ','
        << r.epochs << ',' << format_double(r.wall_seconds) << '\n';
  }
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
  out << "activation,mode,N,runs,E_T,E_G_est,gap,epochs\n";
  for (const auto& r : rows) {
    out << r.activation << ',' << to_string(r.mode) << ',' << r.N << ',' << r.runs << ','
        << format_double(r.E_T) << ',' << format_double(r.E_G) << ',' << format_double(r.gap) << ','
        << format_double(r.epochs) << '\n';
  }
}

void write_plot_data(const std::vector<AggregateRow>& rows, std::ostream& out) {
  out << "panel,series,x,y\n";
  for (const char* series : {"E_T", "E_G_est", "gap"}) {
    for (const auto& r : rows) {
      const std::string panel = r.activation + "/" + to_string(r.mode);
      const double y = std::string(series) == "E_T" ? r.E_T : std::string(series) == "gap" ? r.gap : r.E_G;
      out << panel << ',' << series << ',' << r.N << ',' << format_double(y) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Datasets

Dataset ingest_dataset(const std::filesystem::path& path, std::size_t n_obs) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header row");
  std::vector<std::vector<double>> rows;
  std::size_t cols = 0;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty()) continue;
    auto where = path.string() + ":" + std::to_string(lineno);
    std::vector<double> row;
    try {
      for (auto& cell : split_list(line)) row.push_back(to_double(cell));
    } catch (const std::exception&) {
      throw std::runtime_error(where + ": malformed row");
    }
    if (cols == 0) cols = row.size();
    if (row.size() != cols || cols <= n_obs) throw std::runtime_error(where + ": malformed row");
    for (std::size_t j = 0; j + n_obs < cols; ++j) {
      if (!(row[j] >= 0.0 && row[j] <= 1.0)) throw std::runtime_error(where + ": point outside [0,1]^s");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": empty dataset");
  const std::size_t s = cols - n_obs;
  Dataset d;
  d.points = PointSet(rows.size(), s);
  d.targets.resize(static_cast<Eigen::Index>(n_obs), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t j = 0; j < s; ++j) d.points(k, j) = rows[k][j];
    for (std::size_t p = 0; p < n_obs; ++p) d.targets(p, k) = rows[k][s + p];
  }
  return d;
}

void export_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::size_t s = data.points.dimension();
  for (std::size_t j = 0; j < s; ++j) out << (j ? "," : "") << "y" << j + 1;
  for (Eigen::Index p = 0; p < data.targets.rows(); ++p) out << ",G" << p + 1;
  out << "\n";
  for (std::size_t k = 0; k < data.points.size(); ++k) {
    for (std::size_t j = 0; j < s; ++j) out << (j ? "," : "") << format_double(data.points(k, j));
    for (Eigen::Index p = 0; p < data.targets.rows(); ++p) out << ',' << format_double(data.targets(p, k));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace latnet

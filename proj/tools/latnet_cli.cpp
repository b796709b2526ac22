// Command-line front end: lattice construction, bound evaluation, network
// audits, training runs, experiments and baselines.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <string>

#include "latnet/baselines.hpp"
#include "latnet/harness.hpp"
#include "latnet/lattice.hpp"
#include "latnet/network.hpp"
#include "latnet/training.hpp"
#include "latnet/wce.hpp"
#include "latnet/weights.hpp"

using namespace latnet;

namespace {

struct Common {
  std::string config;
  std::string gv;
  std::string out;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// Writes to --out when given, otherwise stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& operator*() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct TargetOpts {
  double eta = 0.5;
  double q = 2.5;
};

void add_target(CLI::App* app, TargetOpts& t) {
  app->add_option("--eta", t.eta, "target amplitude eta")->capture_default_str();
  app->add_option("--q", t.q, "target decay exponent q")->capture_default_str();
}

WeightScheme target_weights(const SpaceSetting& setting, const TargetOpts& t, std::size_t s, RatePlan* plan_out = nullptr) {
  PeriodicAlgebraicTarget target(t.eta, t.q, s);
  DecaySequence b = target.decay();
  RatePlan plan = select_rate_plan(b.p_star(), setting.kind());
  if (plan_out) *plan_out = plan;
  return build_weights(plan.setting, b, plan, s);
}

SpaceSetting plan_setting(const std::string& letter, double q) {
  return select_rate_plan(1.0 / q, parse_space_kind(letter)).setting;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice rules and lattice-trained networks"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config, "key=value experiment configuration");
  app.add_option("--gv", common.gv, "generating vector file");
  app.add_option("--out", common.out, "output file (or directory for 'experiment')");
  app.add_option("--seed", common.seed, "base seed")->capture_default_str();
  app.add_option("--threads", common.threads, "worker threads")->capture_default_str();

  // points
  auto* points = app.add_subcommand("points", "write lattice points as CSV");
  std::size_t pts_n = 64, pts_s = 2;
  bool pts_shift = false;
  points->add_option("-N", pts_n, "number of points (ignored with --gv)");
  points->add_option("-s", pts_s, "dimension (ignored with --gv)");
  points->add_flag("--shift", pts_shift, "apply a random shift drawn from --seed");

  // cbc
  auto* cbc = app.add_subcommand("cbc", "component-by-component construction");
  std::size_t cbc_n = 1024, cbc_s = 10;
  std::string cbc_setting = "b";
  TargetOpts cbc_t;
  cbc->add_option("-N", cbc_n, "number of points")->capture_default_str();
  cbc->add_option("-s", cbc_s, "dimension")->capture_default_str();
  cbc->add_option("--setting", cbc_setting, "a, b or c")->capture_default_str();
  add_target(cbc, cbc_t);

  // wce
  auto* wce = app.add_subcommand("wce", "worst-case error and bound report for --gv");
  std::string wce_setting = "b";
  TargetOpts wce_t;
  wce->add_option("--setting", wce_setting, "a, b or c")->capture_default_str();
  add_target(wce, wce_t);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "rate plans, weight tables and constants");
  std::size_t bnd_s = 10;
  double bnd_kappa = 1.0;
  std::size_t bnd_order = 3;
  TargetOpts bnd_t;
  bounds->add_option("-s", bnd_s, "dimension")->capture_default_str();
  bounds->add_option("--kappa-s", bnd_kappa, "kappa * S_L (>= 1)")->capture_default_str();
  bounds->add_option("--max-order", bnd_order, "largest |u| in the weight table")->capture_default_str();
  add_target(bounds, bnd_t);

  // audit
  auto* audit = app.add_subcommand("audit", "regularity profile of a network checkpoint");
  std::string audit_net;
  double audit_rho = 1.0;
  TargetOpts audit_t;
  audit->add_option("network", audit_net, "checkpoint file")->required();
  audit->add_option("--rho", audit_rho, "layer-norm restriction")->capture_default_str();
  add_target(audit, audit_t);

  // train
  auto* trainc = app.add_subcommand("train", "train one network on lattice or external data");
  std::size_t tr_n = 256;
  std::string tr_act = "sigmoid", tr_mode = "tailored", tr_data, tr_log, tr_net;
  trainc->add_option("-N", tr_n, "training points")->capture_default_str();
  trainc->add_option("--activation", tr_act, "sigmoid_c, tanh_c, swish_c or relu")->capture_default_str();
  trainc->add_option("--mode", tr_mode, "tailored or standard")->capture_default_str();
  trainc->add_option("--data", tr_data, "CSV dataset instead of lattice data");
  trainc->add_option("--log", tr_log, "per-epoch CSV log");
  trainc->add_option("--network", tr_net, "checkpoint output");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run an experiment grid from --config");

  // baseline
  auto* baseline = app.add_subcommand("baseline", "trigonometric and kernel baselines");
  std::vector<std::size_t> bl_n{32, 64, 128, 256, 512, 1024};
  std::size_t bl_s = 10;
  int bl_alpha = 1;
  TargetOpts bl_t;
  baseline->add_option("-N", bl_n, "point counts")->capture_default_str();
  baseline->add_option("-s", bl_s, "dimension")->capture_default_str();
  baseline->add_option("--alpha", bl_alpha, "kernel smoothness")->capture_default_str();
  add_target(baseline, bl_t);

  // rates
  auto* rates = app.add_subcommand("rates", "predicted convergence rates");
  double rt_p = 0.4, rt_delta = kDefaultDelta;
  rates->add_option("--p-star", rt_p, "summability exponent")->capture_default_str();
  rates->add_option("--delta", rt_delta, "delta for the Sobolev setting")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    Output out(app.got_subcommand(experiment) || app.got_subcommand(cbc) ? std::string() : common.out);

    if (app.got_subcommand(points)) {
      GeneratingVector gv = common.gv.empty() ? cbc_construct(pts_n, pts_s, WeightScheme::product(std::vector<double>(pts_s, 1.0)),
                                                              SpaceSetting::korobov_hilbert(1)).gv
                                              : load_generating_vector(common.gv);
      PointSet p = lattice_points(gv);
      if (pts_shift) {
        Rng rng(common.seed);
        p = shift_points(p, random_shift(rng, gv.dimension()));
      }
      for (std::size_t j = 0; j < p.dimension(); ++j) *out << (j ? "," : "") << "y" << j + 1;
      *out << "\n";
      for (std::size_t k = 0; k < p.size(); ++k) {
        for (std::size_t j = 0; j < p.dimension(); ++j) *out << (j ? "," : "") << format_double(p(k, j));
        *out << "\n";
      }
    } else if (app.got_subcommand(cbc)) {
      SpaceSetting setting = plan_setting(cbc_setting, cbc_t.q);
      WeightScheme w = target_weights(setting, cbc_t, cbc_s);
      CbcOptions opt;
      opt.threads = common.threads;
      CbcResult r = cbc_construct(cbc_n, cbc_s, w, setting, opt);
      std::cerr << "setting " << setting.name() << ", N=" << cbc_n << "\n";
      for (std::size_t j = 0; j < r.trace.size(); ++j) {
        std::cerr << "  z_" << j + 1 << " = " << r.gv[j] << "  criterion " << format_double(r.trace[j]) << "\n";
      }
      if (common.out.empty()) {
        *out << r.gv.modulus() << "\n";
        for (auto z : r.gv.components()) *out << z << "\n";
      } else {
        save_generating_vector(r.gv, common.out);
      }
    } else if (app.got_subcommand(wce)) {
      if (common.gv.empty()) throw std::invalid_argument("wce needs --gv");
      GeneratingVector gv = load_generating_vector(common.gv);
      SpaceSetting setting = plan_setting(wce_setting, wce_t.q);
      WeightScheme w = target_weights(setting, wce_t, gv.dimension());
      WorstCaseReport rep = bound_report(gv, w, setting);
      *out << "# setting " << setting.name() << ", N=" << gv.modulus() << ", s=" << gv.dimension()
           << ", error=" << format_double(rep.error) << ", dominated=" << (rep.dominated ? 1 : 0) << "\n";
      *out << "lambda,bound\n";
      for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
        *out << format_double(rep.lambdas[i]) << ',' << format_double(rep.bounds[i]) << "\n";
      }
    } else if (app.got_subcommand(bounds)) {
      PeriodicAlgebraicTarget target(bnd_t.eta, bnd_t.q, bnd_s);
      DecaySequence b = target.decay();
      *out << "section,setting,key,value\n";
      for (char letter : {'a', 'b', 'c'}) {
        RatePlan plan = select_rate_plan(b.p_star(), parse_space_kind(std::string(1, letter)));
        const std::string tag = std::string(1, letter);
        *out << "plan," << tag << ",alpha," << plan.alpha << "\n";
        *out << "plan," << tag << ",lambda," << format_double(plan.lambda) << "\n";
        *out << "plan," << tag << ",rate_half," << format_double(plan.rate / 2) << "\n";
        try {
          AppendixConstant c = appendix_constant(b, plan, bnd_kappa, bnd_s);
          *out << "constant," << tag << ",C," << format_double(static_cast<double>(c.value)) << "\n";
          *out << "constant," << tag << ",exact," << (c.exact ? 1 : 0) << "\n";
        } catch (const std::exception& e) {
          *out << "constant," << tag << ",error,\"" << e.what() << "\"\n";
        }
        WeightScheme w = build_weights(plan.setting, b, plan, bnd_s);
        std::vector<std::size_t> u;
        // gamma_u for every u with |u| <= max-order
        std::function<void(std::size_t)> rec = [&](std::size_t first) {
          if (!u.empty()) {
            std::string name = "gamma{";
            for (std::size_t i = 0; i < u.size(); ++i) name += (i ? " " : "") + std::to_string(u[i] + 1);
            *out << "weight," << tag << "," << name << "}," << format_double(static_cast<double>(w.gamma(u))) << "\n";
          }
          if (u.size() == bnd_order) return;
          for (std::size_t j = first; j < bnd_s; ++j) {
            u.push_back(j);
            rec(j + 1);
            u.pop_back();
          }
        };
        rec(0);
      }
    } else if (app.got_subcommand(audit)) {
      Network net = load_network(audit_net);
      PeriodicAlgebraicTarget target(audit_t.eta, audit_t.q, net.input_dim());
      auto b = target.decay().values(net.input_dim());
      RegularityProfile p = regularity_profile(net, b, sup_norm_estimate(net));
      RestrictionReport r = check_restrictions(p, b, audit_rho, target.C());
      *out << "quantity,index,value\n";
      for (std::size_t j = 0; j < p.beta.size(); ++j) *out << "beta," << j + 1 << ',' << format_double(p.beta[j]) << "\n";
      for (std::size_t l = 0; l < p.R.size(); ++l) *out << "R," << l + 1 << ',' << format_double(p.R[l]) << "\n";
      for (std::size_t l = 0; l < p.P.size(); ++l) *out << "P," << l << ',' << format_double(p.P[l]) << "\n";
      *out << "S_L,," << format_double(p.S_L) << "\n";
      *out << "C_L,," << format_double(p.C_L) << "\n";
      *out << "sup_norm_estimate,," << format_double(p.sup_norm) << "\n";
      *out << "kappa,," << format_double(p.kappa) << "\n";
      *out << "kappa_S_L,," << format_double(r.kappa_s) << "\n";
      *out << "restriction_layers,," << r.layers_ok << "\n";
      *out << "restriction_inputs,," << r.inputs_ok << "\n";
      *out << "restriction_output,," << r.output_ok << "\n";
    } else if (app.got_subcommand(trainc)) {
      ExperimentSpec spec = common.config.empty() ? ExperimentSpec{} : load_experiment_config(common.config);
      spec.seed = common.seed;
      PeriodicAlgebraicTarget target(spec.eta, spec.q, spec.s);
      auto b = target.decay().values(spec.s);
      Eigen::MatrixXd X, Y;
      if (!tr_data.empty()) {
        Dataset d = ingest_dataset(tr_data);
        if (d.points.dimension() != spec.s) throw std::invalid_argument("dataset dimension differs from s");
        X = to_matrix(d.points);
        Y = d.targets;
      } else {
        if (!common.gv.empty()) spec.gv_file = common.gv;
        RunSeeds seeds = run_seeds(spec.seed, 0);
        Rng rng(seeds.training_shift);
        PointSet p = shift_points(lattice_points(training_vector(spec, tr_n)), random_shift(rng, spec.s));
        X = to_matrix(p);
        Y = evaluate_targets(target.as_vector_target(), p, 1);
      }
      RunSeeds seeds = run_seeds(spec.seed, 0);
      Rng init(seeds.init);
      Network net0 = glorot_init(spec.dims(), parse_activation(tr_act), true, init);
      TrainConfig cfg;
      cfg.learning_rate = spec.learning_rate;
      cfg.max_epochs = spec.max_epochs;
      cfg.tol = spec.tol;
      cfg.lambda = spec.lambda;
      cfg.lambda1 = parse_reg_mode(tr_mode) == RegMode::Tailored ? spec.lambda1 : 0.0;
      cfg.m = spec.m;
      std::unique_ptr<std::ofstream> log;
      if (!tr_log.empty()) {
        log = std::make_unique<std::ofstream>(tr_log);
        *log << "epoch,E_T,objective\n";
      }
      TrainResult r = train(cfg, net0, X, Y, b, [&](std::size_t e, double et, double obj) {
        if (log) *log << e << ',' << format_double(et) << ',' << format_double(obj) << "\n";
      });
      *out << "# adam beta1=" << cfg.beta1 << " beta2=" << cfg.beta2 << " eps=" << cfg.epsilon
           << "; l2 term covers weights and biases\n";
      *out << "epochs,stop,E_T\n" << r.epochs << ',' << to_string(r.stop) << ',' << format_double(r.final_error) << "\n";
      if (!tr_net.empty()) save_network(r.net, tr_net);
    } else if (app.got_subcommand(experiment)) {
      if (common.config.empty()) throw std::invalid_argument("experiment needs --config");
      ExperimentSpec spec = load_experiment_config(common.config);
      if (app.get_option("--seed")->count() > 0) spec.seed = common.seed;
      if (app.get_option("--threads")->count() > 0) spec.threads = common.threads;
      if (!common.gv.empty()) spec.gv_file = common.gv;
      std::filesystem::path dir = common.out.empty() ? std::filesystem::path("experiment_out") : std::filesystem::path(common.out);
      std::filesystem::create_directories(dir);
      auto records = run_experiment(spec, [](const ExperimentRecord& r) {
        std::cerr << r.activation << ' ' << to_string(r.mode) << " N=" << r.N << " seed=" << r.seed
                  << " E_T=" << r.E_T << " E_G=" << r.E_G << " epochs=" << r.epochs
                  << (r.error.empty() ? "" : " error: " + r.error) << "\n";
      });
      auto rows = aggregate(records);
      {
        std::ofstream f(dir / "records.csv");
        write_records_csv(records, f);
      }
      {
        std::ofstream f(dir / "aggregate.csv");
        write_aggregate_csv(rows, f);
      }
      {
        std::ofstream f(dir / "plot_data.csv");
        write_plot_data(rows, f);
      }
      {
        std::ofstream f(dir / "config_used.txt");
        f << "# aggregation: arithmetic mean over seeds; adam beta1=0.9 beta2=0.999 eps=1e-8\n";
        write_experiment_config(spec, f);
      }
      std::cerr << "wrote " << dir.string() << "\n";
    } else if (app.got_subcommand(baseline)) {
      PeriodicAlgebraicTarget target(bl_t.eta, bl_t.q, bl_s);
      auto b = target.decay().values(bl_s);
      RatePlan plan = select_rate_plan(1.0 / bl_t.q, SpaceKind::KorobovHilbert);
      WeightScheme w = build_weights(plan.setting, target.decay(), plan, bl_s);
      // Fourier coefficient of frequency h is gamma_j / (2 pi |h|)^{2 alpha}; match b_j there
      KernelSpec spec{bl_alpha, {}};
      for (double bj : b) spec.gamma.push_back(std::pow(2 * std::numbers::pi, 2 * bl_alpha) * bj);
      // Test set: shifted rank-1 lattice with 2^12 points.
      PointSet test = lattice_points(cbc_construct(4096, bl_s, w, plan.setting).gv);
      Rng rng(common.seed);
      test = shift_points(test, random_shift(rng, bl_s));
      *out << "method,N,L2_error\n";
      for (std::size_t n : bl_n) {
        GeneratingVector gv = cbc_construct(n, bl_s, w, plan.setting).gv;
        PointSet p = lattice_points(gv);
        std::vector<double> f(n);
        for (std::size_t k = 0; k < n; ++k) f[k] = target(p.row(k));
        IndexSet A = hyperbolic_cross_with_budget(b, n);
        auto coef = trig_coefficients(f, gv, A);
        auto a = kernel_fit(f, gv, spec);
        double et = 0, ek = 0;
        for (std::size_t k = 0; k < test.size(); ++k) {
          double g = target(test.row(k));
          et += std::pow(g - trig_evaluate(coef, A, test.row(k)), 2);
          ek += std::pow(g - kernel_predict(a, gv, spec, test.row(k)), 2);
        }
        *out << "trig," << n << ',' << format_double(std::sqrt(et / test.size())) << "\n";
        *out << "kernel," << n << ',' << format_double(std::sqrt(ek / test.size())) << "\n";
      }
    } else if (app.got_subcommand(rates)) {
      *out << "setting,alpha,lambda,r,r_half\n";
      for (char letter : {'a', 'b', 'c'}) {
        RatePlan plan = select_rate_plan(rt_p, parse_space_kind(std::string(1, letter)), rt_delta);
        *out << letter << ',' << plan.alpha << ',' << format_double(plan.lambda) << ',' << format_double(plan.rate)
             << ',' << format_double(plan.rate / 2) << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

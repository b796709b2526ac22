#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "latnet/baselines.hpp"
#include "latnet/harness.hpp"
#include "latnet/network.hpp"
#include "latnet/training.hpp"
#include "latnet/wce.hpp"

using namespace latnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path dir = fs::temp_directory_path() / "latnet_integration";
  fs::create_directories(dir);
  return dir;
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + LATNET_CLI_PATH + "\" " + args + " 2>" +
                          (scratch() / "stderr.txt").string();
  return std::system(cmd.c_str());
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(f, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  return out;
}

fs::path tiny_config(const std::string& name, std::size_t epochs) {
  fs::path p = scratch() / name;
  std::ofstream f(p);
  f << "s=3\ndepth=2\nwidth=4\nactivations=sigmoid_1,swish_1\nmodes=tailored,standard\n"
    << "n_grid=32,64\nrepetitions=2\nmax_epochs=" << epochs << "\neval_points=1024\n";
  return p;
}

}  // namespace

TEST_CASE("cli rates") {
  auto out = scratch() / "rates.csv";
  REQUIRE(cli("rates --p-star 0.4 --out " + out.string()) == 0);
  auto l = lines(out);
  REQUIRE(l.size() == 4);
  CHECK(l[0] == "setting,alpha,lambda,r,r_half");
  const double want[] = {0.475, 1.0, 1.25};
  for (int i = 0; i < 3; ++i) {
    auto c = split(l[i + 1]);
    CHECK(c[0] == std::string(1, char('a' + i)));
    CHECK(std::stod(c[4]) == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("cli lattice workflow") {
  auto gv_path = scratch() / "z.gv";
  REQUIRE(cli("cbc -N 64 -s 3 --setting b --out " + gv_path.string()) == 0);
  auto gv = load_generating_vector(gv_path);
  CHECK(gv.modulus() == 64);
  CHECK(gv.dimension() == 3);

  // same vector as the library construction
  PeriodicAlgebraicTarget target(0.5, 2.5, 3);
  auto plan = select_rate_plan(target.decay().p_star(), SpaceKind::KorobovHilbert);
  auto w = build_weights(plan.setting, target.decay(), plan, 3);
  CHECK(cbc_construct(64, 3, w, plan.setting).gv == gv);

  auto pts = scratch() / "points.csv";
  REQUIRE(cli("--gv " + gv_path.string() + " points --out " + pts.string()) == 0);
  auto l = lines(pts);
  REQUIRE(l.size() == 65);
  CHECK(l[0] == "y1,y2,y3");
  auto lp = lattice_points(gv);
  auto row = split(l[6]);
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::stod(row[j]) == lp(5, j));

  auto shifted = scratch() / "shifted.csv";
  REQUIRE(cli("--gv " + gv_path.string() + " --seed 4 points --shift --out " + shifted.string()) == 0);
  CHECK(lines(shifted).size() == 65);
  CHECK(lines(shifted)[1] != l[1]);

  auto wce = scratch() / "wce.csv";
  REQUIRE(cli("--gv " + gv_path.string() + " wce --setting b --out " + wce.string()) == 0);
  auto wl = lines(wce);
  REQUIRE(wl.size() == 22);
  CHECK(wl[0].find("dominated=1") != std::string::npos);
  CHECK(wl[1] == "lambda,bound");

  auto bnd = scratch() / "bounds.csv";
  REQUIRE(cli("bounds -s 4 --max-order 2 --out " + bnd.string()) == 0);
  auto bl = lines(bnd);
  CHECK(bl[0] == "section,setting,key,value");
  int weights = 0;
  for (const auto& s : bl) weights += s.rfind("weight,a,", 0) == 0;
  CHECK(weights == 4 + 6);

  CHECK(cli("wce --setting b") != 0);
  CHECK(cli("cbc -N 16 -s 2 --setting x >/dev/null") != 0);
  CHECK(cli("nonsense") != 0);
}

TEST_CASE("cli training, audit and external data") {
  auto cfg = tiny_config("train.cfg", 40);
  auto net_path = scratch() / "net.txt";
  auto log_path = scratch() / "log.csv";
  auto out = scratch() / "train.csv";
  REQUIRE(cli("--config " + cfg.string() + " --seed 3 train -N 64 --activation swish_1 --network " +
              net_path.string() + " --log " + log_path.string() + " --out " + out.string()) == 0);
  auto l = lines(out);
  REQUIRE(l.size() == 3);
  CHECK(l[1] == "epochs,stop,E_T");
  auto row = split(l[2]);
  const auto epochs = std::stoul(row[0]);
  CHECK(epochs <= 40);
  auto log = lines(log_path);
  CHECK(log[0] == "epoch,E_T,objective");
  CHECK(log.size() == epochs + 1);
  CHECK(split(log.back())[1] == row[2]);

  auto net = load_network(net_path);
  CHECK(net.input_dim() == 3);
  CHECK(net.activation == Activation::swish(1));

  auto audit = scratch() / "audit.csv";
  REQUIRE(cli("audit " + net_path.string() + " --out " + audit.string()) == 0);
  auto al = lines(audit);
  CHECK(al[0] == "quantity,index,value");
  CHECK(split(al[1])[0] == "beta");
  double beta1 = 0;
  for (Eigen::Index p = 0; p < net.W[0].rows(); ++p) beta1 = std::max(beta1, std::abs(net.W[0](p, 0)));
  CHECK(std::stod(split(al[1])[2]) == doctest::Approx(beta1).epsilon(1e-15));

  // training on an exported copy of the lattice data matches the lattice run
  ExperimentSpec spec = load_experiment_config(cfg);
  auto seeds = run_seeds(3, 0);
  Rng rng(seeds.training_shift);
  Dataset d;
  d.points = shift_points(lattice_points(training_vector(spec, 64)), random_shift(rng, 3));
  d.targets = evaluate_targets(PeriodicAlgebraicTarget(spec.eta, spec.q, 3).as_vector_target(), d.points, 1);
  auto data = scratch() / "data.csv";
  export_dataset(d, data);
  auto out2 = scratch() / "train2.csv";
  REQUIRE(cli("--config " + cfg.string() + " --seed 3 train --activation swish_1 --data " + data.string() +
              " --out " + out2.string()) == 0);
  CHECK(lines(out2)[2] == l[2]);
}

TEST_CASE("cli experiment and baseline") {
  auto cfg = tiny_config("exp.cfg", 15);
  auto dir = scratch() / "exp";
  fs::remove_all(dir);
  REQUIRE(cli("--config " + cfg.string() + " --out " + dir.string() + " experiment") == 0);
  auto rec = lines(dir / "records.csv");
  CHECK(rec[0] == "activation,mode,N,seed,E_T,E_G_est,gap,epochs,wall_s");
  CHECK(rec.size() == 1 + 2 * 2 * 2 * 2);
  auto agg = lines(dir / "aggregate.csv");
  CHECK(agg.size() == 1 + 2 * 2 * 2);
  CHECK(lines(dir / "plot_data.csv")[0] == "panel,series,x,y");
  auto back = load_experiment_config(dir / "config_used.txt");
  CHECK(back.n_grid == std::vector<std::size_t>{32, 64});
  CHECK(back.max_epochs == 15);

  // rerun is byte-identical apart from wall time
  auto dir2 = scratch() / "exp2";
  fs::remove_all(dir2);
  REQUIRE(cli("--config " + cfg.string() + " --threads 2 --out " + dir2.string() + " experiment") == 0);
  auto rec2 = lines(dir2 / "records.csv");
  REQUIRE(rec2.size() == rec.size());
  for (std::size_t i = 1; i < rec.size(); ++i) {
    auto a = split(rec[i]), b = split(rec2[i]);
    a.pop_back();
    b.pop_back();
    CHECK(a == b);
  }

  auto bl = scratch() / "baseline.csv";
  REQUIRE(cli("baseline -N 32 128 -s 3 --out " + bl.string()) == 0);
  auto l = lines(bl);
  REQUIRE(l.size() == 5);
  CHECK(l[0] == "method,N,L2_error");
  CHECK(std::stod(split(l[4])[2]) < std::stod(split(l[2])[2]));
}

TEST_CASE("library pipeline") {
  // construct, train, audit and estimate on one small problem
  ExperimentSpec spec;
  spec.s = 4;
  spec.depth = 2;
  spec.width = 6;
  spec.max_epochs = 300;
  spec.learning_rate = 1e-2;
  PeriodicAlgebraicTarget target(spec.eta, spec.q, spec.s);
  auto b = target.decay().values(spec.s);
  auto gv = training_vector(spec, 128);
  Rng shift(1), init(2);
  auto pts = shift_points(lattice_points(gv), random_shift(shift, spec.s));
  auto Y = evaluate_targets(target.as_vector_target(), pts, 1);
  TrainConfig cfg;
  cfg.max_epochs = spec.max_epochs;
  cfg.learning_rate = spec.learning_rate;
  cfg.lambda1 = 1e-8;
  auto net0 = glorot_init(spec.dims(), Activation::sigmoid(1), true, init);
  const double before = std::sqrt(loss_J(net0, to_matrix(pts), Y));
  auto r = train(cfg, net0, to_matrix(pts), Y, b);
  CHECK(r.final_error < before);

  Rng eval(3);
  auto test = shift_points(lattice_points(cbc_construct(2048, spec.s, WeightScheme::product(b),
                                                        SpaceSetting::korobov_hilbert(1)).gv),
                           random_shift(eval, spec.s));
  auto e = estimate_generalization(r.net, target.as_vector_target(), test, r.final_error);
  CHECK(std::isfinite(e.E_G));
  CHECK(e.E_G < 2 * before);

  auto prof = regularity_profile(r.net, b, sup_norm_estimate(r.net));
  CHECK(prof.beta.size() == spec.s);
  CHECK(prof.S_L > 0);
}

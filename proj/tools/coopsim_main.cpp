// Command line front end: scenario episodes, distance/threshold sweeps,
// price search, and a self-check of the scheduler against the reference
// solver on the augmented state space.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coopsim/config_io.hpp"
#include "coopsim/mdp.hpp"
#include "coopsim/pricing.hpp"
#include "coopsim/sim.hpp"

namespace {

using namespace coopsim;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string format = "csv";
  std::uint64_t seed = 0;
  int slots = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* slots_opt = nullptr;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "scenario JSON file")
      ->check(CLI::ExistingFile);
  sub->add_option("--out-dir", o.out_dir,
                  "write results here instead of stdout");
  sub->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  o.seed_opt = sub->add_option("--seed", o.seed, "override the scenario seed");
  o.slots_opt = sub->add_option("--slots", o.slots, "override the slot count")
                    ->check(CLI::PositiveNumber);
}

ScenarioConfig make_config(const CommonOpts& o) {
  ScenarioConfig cfg;
  if (!o.config_path.empty()) cfg = load_scenario(o.config_path);
  if (o.seed_opt->count() > 0) cfg.seed = o.seed;
  if (o.slots_opt->count() > 0) cfg.slots = o.slots;
  return cfg;
}

// Result text goes to stdout unless --out-dir is set; status chatter is
// kept on stderr so piped output stays machine readable.
void emit(const CommonOpts& o, const std::string& name,
          const std::string& text) {
  if (o.out_dir.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(o.out_dir);
  std::filesystem::path p =
      std::filesystem::path(o.out_dir) / (name + "." + o.format);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  std::cerr << "wrote " << p.string() << "\n";
}

int cmd_run(const CommonOpts& o) {
  ScenarioConfig cfg = make_config(o);
  SimResult r = run_episode(cfg);
  emit(o, "episode", o.format == "csv" ? episode_csv(r) : episode_json(r));
  std::cerr << "lambda* = " << r.lambda_star
            << (r.price_converged ? "" : " (not converged)") << "\n";
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::vector<double>& distances,
              const std::vector<double>& xis) {
  ScenarioConfig cfg = make_config(o);
  std::vector<SweepRow> rows = sweep_distance(cfg, distances, xis);
  emit(o, "sweep", o.format == "csv" ? sweep_csv(rows) : sweep_json(rows));
  return 0;
}

int cmd_price(const CommonOpts& o) {
  ScenarioConfig cfg = make_config(o);
  PriceResult r = price_scenario(cfg);
  emit(o, "price",
       o.format == "csv" ? price_history_csv(r) : price_history_json(r));
  std::cerr << "lambda* = " << r.lambda_star << " after "
            << r.history.size() << " iterations"
            << (r.converged ? "" : " (not converged)") << "\n";
  return 0;
}

// Two-frame group with one dependency, four (direct, two-hop) rate pairs.
// Small enough for the reference solver, rich enough that the relay switch
// matters in some states.
int cmd_oracle(double lambda, double alpha, double share, double tol) {
  GopSpec spec;
  spec.period = 2;
  spec.window = 1;
  spec.classes = {{2, 4.0, 0}, {2, 1.0, 1}};
  spec.deps = {{0, 0, 1}};
  CompiledGop cg = compile_gop(spec, 4);

  AugmentedInstance inst;
  inst.mdp = &cg.mdp;
  inst.pairs = {{1.0, 2.0, 0.3}, {2.0, 3.0, 0.3}, {0.0, 3.0, 0.2},
                {2.0, 2.0, 0.2}};
  inst.lambda = lambda;
  inst.alpha = alpha;
  inst.share = share;
  inst.slot_seconds = 1.0;
  inst.packet_bits = 1;
  std::vector<std::vector<double>> ref = augmented_brute_force(inst, 1e-13);

  RateModel rm = rate_model(1.0, 1, opportunistic_pmf(inst.pairs));
  ValueIterationResult vi =
      value_iteration(cg.mdp, rm, lambda, alpha, share, 1e-13);

  double worst = 0.0;
  for (std::size_t t = 0; t < ref.size(); ++t)
    for (std::size_t q = 0; q < inst.pairs.size(); ++q) {
      double r = std::max(inst.pairs[q].beta_direct, inst.pairs[q].beta_coop);
      int bin = rate_bin_floor(rm.rates, r);
      double d = std::fabs(ref[t][q] - vi.value[t][static_cast<std::size_t>(bin)]);
      worst = std::max(worst, d);
    }

  std::printf("states=%zu pairs=%zu lambda=%g alpha=%g share=%g\n",
              ref.size(), inst.pairs.size(), lambda, alpha, share);
  std::printf("max |V_augmented - V_opportunistic| = %.3e (tol %.1e)\n",
              worst, tol);
  bool ok = worst <= tol;
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative uplink video scheduling toolkit"};
  app.require_subcommand(1);

  CommonOpts run_o, sweep_o, price_o;
  std::vector<double> distances{25.0, 50.0, 75.0, 100.0};
  std::vector<double> xis{0.0, 0.1, 0.2, 0.4, 0.7, 1.0};
  double olambda = 0.4, oalpha = 0.9, oshare = 0.25, otol = 1e-8;

  CLI::App* run = app.add_subcommand("run", "simulate one scenario episode");
  add_common(run, run_o);
  CLI::App* sweep =
      app.add_subcommand("sweep", "distance / recruitment threshold sweep");
  add_common(sweep, sweep_o);
  sweep->add_option("--distances", distances, "source distances, meters")
      ->delimiter(',');
  sweep->add_option("--xi", xis, "recruitment thresholds (0 = direct only)")
      ->delimiter(',');
  CLI::App* price = app.add_subcommand("price", "resource price search only");
  add_common(price, price_o);
  CLI::App* oracle = app.add_subcommand(
      "oracle", "check the scheduler against the augmented-state reference");
  oracle->add_option("--lambda", olambda, "resource price");
  oracle->add_option("--alpha", oalpha, "discount factor")
      ->check(CLI::Range(0.0, 0.999999));
  oracle->add_option("--share", oshare, "per-slot airtime entitlement");
  oracle->add_option("--tol", otol, "acceptance tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_o);
    if (sweep->parsed()) return cmd_sweep(sweep_o, distances, xis);
    if (price->parsed()) return cmd_price(price_o);
    if (oracle->parsed()) return cmd_oracle(olambda, oalpha, oshare, otol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

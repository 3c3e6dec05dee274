// Command line front end: closed-form analysis, simulation runs and sweeps,
// brute-force validation, and the network-coding comparison.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtnlab/config.hpp"
#include "dtnlab/engine.hpp"
#include "dtnlab/netcod.hpp"
#include "dtnlab/oracle.hpp"

namespace {

using dtnlab::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << text;
}

dtnlab::SimConfig load_config(const std::string& config_path,
                              const std::string& preset_name) {
  if (!config_path.empty() && !preset_name.empty())
    throw std::invalid_argument("--config and --preset are mutually exclusive");
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw std::invalid_argument("cannot read config file: " + config_path);
    return dtnlab::parse_config(json::parse(f));
  }
  if (!preset_name.empty()) return dtnlab::preset(preset_name);
  throw std::invalid_argument("either --config or --preset is required");
}

struct BoundInputs {
  double alpha = 1.0;
  double gamma = 0.0;
};

BoundInputs bound_inputs(const dtnlab::MobilityModel& model) {
  BoundInputs b;
  b.gamma = model.gamma;
  b.alpha = dtnlab::estimate_alpha(model);
  return b;
}

int cmd_analyze(const dtnlab::SimConfig& cfg, const std::string& out_path,
                const std::string& format) {
  const auto topo = cfg.topology.build();
  const auto model = cfg.mobility.build(topo);
  const auto rep = dtnlab::capacity(topo, model.pi, cfg.nodes, cfg.radio);

  if (format == "csv") {
    // minimum-energy curve sampled on a grid, for plotting
    const auto curve = dtnlab::energy_curve(rep);
    std::ostringstream os;
    os << "lambda,phi\n";
    const int samples = 200;
    for (int i = 0; i < samples; ++i) {
      const double l = rep.mu * i / samples;
      os << format_double(l) << "," << format_double(curve(l)) << "\n";
    }
    emit(os.str(), out_path);
    return 0;
  }

  json j = dtnlab::report_to_json(rep);
  const auto bi = bound_inputs(model);
  j["gamma"] = model.gamma;
  j["alpha_hat"] = bi.alpha;
  j["b_constant"] = dtnlab::b_constant(cfg.radio, topo.max_degree());
  j["max_degree"] = topo.max_degree();
  if (dtnlab::rate_regime(cfg.radio) == dtnlab::RateRegime::SameCellDominant) {
    const auto curve = dtnlab::energy_curve(rep);
    j["energy_curve"] = {{"knots", curve.knots}, {"slopes", curve.slopes},
                         {"values", curve.values}};
  }
  if (cfg.lambda > 0.0 && cfg.lambda < rep.mu) {
    const auto db = dtnlab::delay_bound(rep, topo.max_degree(), cfg.lambda,
                                        bi.alpha, bi.gamma);
    j["delay_bound"] = {{"lambda", cfg.lambda}, {"slots", db.slots},
                        {"mixing_lag", db.mixing_lag}, {"rho", db.rho}};
  }
  emit(j.dump(2) + "\n", out_path);
  return 0;
}

std::string stats_csv_header() {
  return "lambda,seed,slots,warmup,delivered_rate,avg_delay,avg_backlog,"
         "avg_energy,mu,delay_bound,energy_bound,"
         "n_same_direct,n_same_relay_new,n_same_relay_deliver,"
         "n_adj_direct,n_adj_relay_new,n_adj_relay_deliver,n_idle\n";
}

std::string stats_csv_row(const dtnlab::SimConfig& cfg, double lambda,
                          std::uint64_t seed, const dtnlab::SimStats& st,
                          const dtnlab::CapacityReport& rep,
                          const BoundInputs& bi, int max_degree) {
  double delay_b = std::numeric_limits<double>::quiet_NaN();
  double energy_b = std::numeric_limits<double>::quiet_NaN();
  if (lambda > 0.0 && lambda < rep.mu &&
      dtnlab::rate_regime(cfg.radio) == dtnlab::RateRegime::SameCellDominant) {
    if (cfg.algorithm == "min_energy") {
      try {
        const double beta = st.effective_sched.beta;
        energy_b = dtnlab::energy_bounds(rep, max_degree, lambda, beta, bi.alpha,
                                         bi.gamma).avg_energy;
      } catch (const std::invalid_argument&) {
      }
    } else {
      delay_b = dtnlab::delay_bound(rep, max_degree, lambda, bi.alpha, bi.gamma).slots;
    }
  }
  const std::uint64_t measured = st.measured_slots();
  std::uint64_t idle_cells = 0;
  {
    std::uint64_t non_idle = 0;
    for (int k = 1; k < dtnlab::kDecisionKinds; ++k) non_idle += st.kind_counts[k];
    const std::uint64_t cell_slots =
        measured * static_cast<std::uint64_t>(rep.pi_adj.size());
    idle_cells = cell_slots - non_idle;
  }
  std::ostringstream os;
  os << format_double(lambda) << "," << seed << "," << st.slots << ","
     << st.warmup << "," << format_double(st.delivered_rate()) << ","
     << format_double(st.avg_delay()) << "," << format_double(st.avg_backlog())
     << "," << format_double(st.avg_energy()) << "," << format_double(rep.mu)
     << "," << format_double(delay_b) << "," << format_double(energy_b);
  for (int k = 1; k < dtnlab::kDecisionKinds; ++k) os << "," << st.kind_counts[k];
  os << "," << idle_cells << "\n";
  return os.str();
}

int cmd_simulate(dtnlab::SimConfig cfg, const std::string& out_path,
                 const std::string& format) {
  auto spec = cfg.make_run_spec();
  const auto rep = dtnlab::capacity(spec.topo, spec.mobility.pi, cfg.nodes, cfg.radio);
  if (cfg.lambda >= rep.mu)
    std::cerr << "warning: lambda " << cfg.lambda << " >= capacity " << rep.mu
              << "; queues will grow without bound\n";
  const auto st = dtnlab::run(spec);
  const auto bi = bound_inputs(spec.mobility);
  if (format == "json") {
    json j;
    j["schema"] = "dtnlab-run-1";
    j["config"] = dtnlab::config_to_json(cfg);
    j["delivered_rate"] = st.delivered_rate();
    j["avg_delay"] = st.avg_delay();
    j["avg_backlog"] = st.avg_backlog();
    j["avg_energy"] = st.avg_energy();
    j["mu"] = rep.mu;
    emit(j.dump(2) + "\n", out_path);
  } else {
    emit(stats_csv_header() +
             stats_csv_row(cfg, cfg.lambda, cfg.seed, st, rep, bi,
                           spec.topo.max_degree()),
         out_path);
  }
  return 0;
}

int cmd_sweep(dtnlab::SimConfig cfg, const std::vector<double>& lambdas,
              const std::vector<std::uint64_t>& seeds, const std::string& out_path) {
  auto base = cfg.make_run_spec();
  const auto rep = dtnlab::capacity(base.topo, base.mobility.pi, cfg.nodes, cfg.radio);
  const auto bi = bound_inputs(base.mobility);
  const int max_degree = base.topo.max_degree();
  const auto rows = dtnlab::sweep(base, lambdas, seeds);
  std::ostringstream os;
  os << stats_csv_header();
  for (const auto& row : rows)
    os << stats_csv_row(cfg, row.lambda, row.seed, row.stats, rep, bi, max_degree);
  emit(os.str(), out_path);
  return 0;
}

int cmd_oracle(const std::vector<std::string>& names, const std::string& out_path) {
  std::ostringstream os;
  bool all_ok = true;
  for (const auto& name : names) {
    const auto cfg = dtnlab::preset(name);
    const auto topo = cfg.topology.build();
    const auto model = cfg.mobility.build(topo);
    const auto rep = dtnlab::capacity(topo, model.pi, cfg.nodes, cfg.radio);
    const auto brute = dtnlab::oracle::enumerate_probabilities(topo, model.pi, cfg.nodes);
    const double z = dtnlab::oracle::expected_z(topo, model.pi, cfg.nodes, cfg.radio);

    const double tol = 1e-10;
    const bool probs_ok =
        std::abs(brute.pair_same - rep.probs.pair_same) < tol &&
        std::abs(brute.busy_same - rep.probs.busy_same) < tol &&
        std::abs(brute.dest_adj - rep.probs.dest_adj) < tol &&
        std::abs(brute.user_adj - rep.probs.user_adj) < tol;
    const bool mu_ok = std::abs(z - rep.mu) < tol;
    all_ok = all_ok && probs_ok && mu_ok;
    os << name << " probabilities " << (probs_ok ? "pass" : "FAIL")
       << " capacity " << (mu_ok ? "pass" : "FAIL")
       << " mu=" << format_double(rep.mu) << "\n";
  }
  emit(os.str(), out_path);
  return all_ok ? 0 : 2;
}

int cmd_netcod(double epsilon, std::uint64_t slots, std::uint64_t seed,
               double delta, const std::string& out_path) {
  const auto cmp = dtnlab::netcod::run_nc_experiment(epsilon, slots, seed, delta);
  std::ostringstream os;
  os << "epsilon " << format_double(cmp.epsilon) << " delta "
     << format_double(cmp.delta) << " slots " << slots << " seed " << seed << "\n";
  os << "nu " << format_double(cmp.nu) << "\n";
  os << "node baseline enhanced gain\n";
  for (int i = 0; i < 4; ++i)
    os << (i + 1) << " " << format_double(cmp.baseline_rate[i]) << " "
       << format_double(cmp.enhanced_rate[i]) << " "
       << format_double(cmp.enhanced_rate[i] - cmp.baseline_rate[i]) << "\n";
  os << "mean_gain " << format_double(cmp.mean_gain) << "\n";
  os << "analytic_gain " << format_double(cmp.analytic_gain_per_node) << "\n";
  os << "xor_broadcasts " << cmp.enhanced.xor_broadcasts << " coded_backlog "
     << cmp.enhanced.coded_final_backlog << "\n";
  emit(os.str(), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-partitioned DTN capacity and energy toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // shared options may follow the subcommand name

  std::string config_path, preset_name, out_path, format;
  double lambda = -1.0;
  std::uint64_t seed = 0, slots = 0;
  app.add_option("--config", config_path, "JSON config file")->capture_default_str();
  app.add_option("--preset", preset_name, "built-in instance name");
  app.add_option("--lambda", lambda, "arrival rate override");
  app.add_option("--seed", seed, "root RNG seed override");
  app.add_option("--slots", slots, "horizon override");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* analyze = app.add_subcommand("analyze", "closed-form capacity and energy curve");
  auto* simulate = app.add_subcommand("simulate", "one simulation run");
  auto* sweep = app.add_subcommand("sweep", "runs over a lambda and seed grid");
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force validation of the closed forms");
  auto* netcod = app.add_subcommand("netcod", "network-coding gain experiment");

  std::vector<double> sweep_lambdas;
  std::vector<std::uint64_t> sweep_seeds;
  sweep->add_option("--lambdas", sweep_lambdas, "arrival rates")->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "root seeds")->delimiter(',');

  bool all_small = false;
  oracle_cmd->add_flag("--all-small", all_small, "validate every enumerable preset");

  double nc_epsilon = 0.125, nc_delta = 0.0;
  netcod->add_option("--epsilon", nc_epsilon, "coding gate parameter");
  netcod->add_option("--delta", nc_delta, "baseline relay coin bias");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (netcod->parsed())
      return cmd_netcod(nc_epsilon, slots ? slots : 1000000, seed ? seed : 1,
                        nc_delta, out_path);
    if (oracle_cmd->parsed()) {
      std::vector<std::string> names;
      if (all_small || preset_name.empty())
        names = {"small-2x2-n4", "small-2x2-n6", "strip-1x3-n4"};
      else
        names.push_back(preset_name);
      return cmd_oracle(names, out_path);
    }

    auto cfg = load_config(config_path, preset_name);
    if (lambda >= 0.0) cfg.lambda = lambda;
    if (seed) cfg.seed = seed;
    if (slots) cfg.slots = slots;

    if (analyze->parsed())
      return cmd_analyze(cfg, out_path, format.empty() ? "json" : format);
    if (simulate->parsed())
      return cmd_simulate(cfg, out_path, format.empty() ? "csv" : format);
    if (sweep->parsed()) {
      if (sweep_lambdas.empty()) sweep_lambdas.push_back(cfg.lambda);
      if (sweep_seeds.empty()) sweep_seeds.push_back(cfg.seed);
      return cmd_sweep(cfg, sweep_lambdas, sweep_seeds, out_path);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

// Command line front end: synthetic and embedding experiments, gain tuning,
// trajectory export and the session server.
#include <algorithm>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "activepref/experiments.hpp"
#include "activepref/gain_tuning.hpp"
#include "activepref/http_server.hpp"
#include "activepref/service.hpp"

namespace ap = activepref;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct SamplerFlags {
  int chains = 4;
  int burn_in = 500;
  int samples = 250;
  double target_accept = 0.3;

  void add(CLI::App* cmd) {
    cmd->add_option("--chains", chains, "MCMC chains")->capture_default_str();
    cmd->add_option("--burn-in", burn_in, "Burn-in steps per chain")->capture_default_str();
    cmd->add_option("--samples", samples, "Kept samples per chain")->capture_default_str();
    cmd->add_option("--target-accept", target_accept, "Burn-in acceptance target")
        ->capture_default_str();
  }

  ap::SamplerConfig config() const {
    ap::SamplerConfig sc;
    sc.chains = chains;
    sc.burn_in = burn_in;
    sc.samples = samples;
    sc.target_accept = target_accept;
    return sc;
  }
};

struct StrategyFlags {
  std::string method = "info_synth";
  double alpha = 0.05;
  double beta = 0.3;
  double gamma = 0.2;
  int k = 10;
  double zeta = 0.1;
  std::size_t pair_cap = 200000;
  bool allow_repeat = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--method", method, "Query selection method")->capture_default_str();
    cmd->add_option("--alpha", alpha, "Pair M-dist kept fraction")->capture_default_str();
    cmd->add_option("--beta", beta, "k-NN evaluated fraction")->capture_default_str();
    cmd->add_option("--gamma", gamma, "Pair Opt-dist kept fraction")->capture_default_str();
    cmd->add_option("--k", k, "k-NN neighbour count")->capture_default_str();
    cmd->add_option("--zeta", zeta, "Opt-dist lambda scale")->capture_default_str();
    cmd->add_option("--pair-cap", pair_cap, "Max candidate pairs")->capture_default_str();
    cmd->add_flag("--allow-repeat", allow_repeat, "Allow re-asking pool pairs");
  }

  ap::StrategyConfig config() const {
    ap::StrategyConfig sc;
    sc.method = ap::parse_method(method);
    sc.alpha = alpha;
    sc.beta = beta;
    sc.gamma = gamma;
    sc.k = k;
    sc.zeta = zeta;
    sc.pair_cap = pair_cap;
    sc.no_repeat = !allow_repeat;
    sc.validate();
    return sc;
  }
};

struct RunFlags {
  double sigma0 = 0.1;
  int queries = 100;
  int trials = 5;
  std::uint64_t seed = 0;
  std::string out;
  std::string oracle = "model";
  double oracle_sigma0 = 0.0;
  int threads = 1;
  bool omit_timing = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--sigma0", sigma0, "Response model noise level")->capture_default_str();
    cmd->add_option("--queries", queries, "Queries per trial")->capture_default_str();
    cmd->add_option("--trials", trials, "Independent trials")->capture_default_str();
    cmd->add_option("--seed", seed, "Base seed")->capture_default_str();
    cmd->add_option("--out", out, "Results CSV (stdout when omitted)");
    cmd->add_option("--oracle", oracle, "Simulated respondent: model or deterministic")
        ->check(CLI::IsMember({"model", "deterministic"}))
        ->capture_default_str();
    cmd->add_option("--oracle-sigma0", oracle_sigma0, "Oracle noise (default: --sigma0)");
    cmd->add_option("--threads", threads, "Trial worker threads, 0 = all cores")
        ->capture_default_str();
    cmd->add_flag("--omit-timing", omit_timing, "Write 0 for selection_seconds");
  }
};

int finish_experiment(const ap::ExperimentConfig& cfg, const RunFlags& run) {
  const auto results = ap::run_active_loop(cfg);
  std::vector<ap::RunRecord> records;
  int failed = 0;
  std::vector<double> final_mse;
  for (const auto& r : results) {
    if (r.error) {
      std::cerr << "error: " << *r.error << '\n';
      ++failed;
      continue;
    }
    records.insert(records.end(), r.records.begin(), r.records.end());
    final_mse.push_back(r.records.back().mse);
  }
  if (run.out.empty()) {
    ap::write_records(std::cout, records, run.omit_timing);
  } else {
    std::ofstream out(run.out);
    if (!out) throw ap::Error("cannot write " + run.out);
    ap::write_records(out, records, run.omit_timing);
    if (!final_mse.empty()) {
      std::sort(final_mse.begin(), final_mse.end());
      std::cout << ap::method_name(cfg.strategy.method) << ": " << final_mse.size()
                << " trials, median final MSE " << final_mse[final_mse.size() / 2] << '\n';
    }
  }
  return failed == 0 ? 0 : kExitRuntime;
}

void apply_run_flags(ap::ExperimentConfig& cfg, const RunFlags& run, CLI::App* cmd) {
  cfg.spec.sigma0 = run.sigma0;
  cfg.spec.queries = run.queries;
  cfg.spec.trials = run.trials;
  cfg.spec.seed = run.seed;
  cfg.oracle_mode = run.oracle == "deterministic" ? ap::OracleConfig::Mode::kDeterministic
                                                  : ap::OracleConfig::Mode::kModelConsistent;
  if (cmd->count("--oracle-sigma0") > 0) {
    if (!(run.oracle_sigma0 > 0.0)) throw ap::ConfigError("must be positive", "oracle-sigma0");
    cfg.oracle_sigma0 = run.oracle_sigma0;
  }
  if (run.threads < 0) throw ap::ConfigError("must be >= 0", "threads");
  cfg.threads = run.threads;
}

std::vector<double> parse_gains(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ap::ConfigError("cannot parse gain '" + cell + "'", "gains");
    }
  }
  if (out.size() != 3 || !std::all_of(out.begin(), out.end(), [](double g) { return g > 0.0; })) {
    throw ap::ConfigError("expected three positive gains k_x,k_y,k_theta", "gains");
  }
  return out;
}

ap::HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int serve(ap::SessionService& service, const std::string& host, int port) {
  ap::HttpServer server(service);
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  if (!server.bind(host, port)) {
    std::cerr << "error: cannot bind " << host << ":" << port << '\n';
    return kExitRuntime;
  }
  std::cout << "listening on http://" << host << ":" << server.port() << std::endl;
  server.serve();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active preference learning with synthesized pairwise queries"};
  app.set_config("--config", "", "TOML/INI file with option values; flags override it");
  app.require_subcommand(1);

  // synth-exp
  auto* synth = app.add_subcommand("synth-exp", "Synthetic ideal-point experiment");
  long dim = 2;
  std::size_t n_items = 100;
  bool continuous = false;
  RunFlags synth_run;
  StrategyFlags synth_strategy;
  SamplerFlags synth_sampler;
  synth->add_option("--dim", dim, "Dimension")->capture_default_str();
  synth->add_option("--n-items", n_items, "Pool size")->capture_default_str();
  synth->add_flag("--continuous", continuous, "Continuous setting (synthesis methods only)");
  synth_run.add(synth);
  synth_strategy.add(synth);
  synth_sampler.add(synth);

  // constrained-exp
  auto* constrained = app.add_subcommand("constrained-exp", "Experiment on a fixed embedding pool");
  std::string embeddings;
  RunFlags con_run;
  StrategyFlags con_strategy;
  SamplerFlags con_sampler;
  constrained->add_option("--embeddings", embeddings, "Embedding CSV")->required();
  con_run.add(constrained);
  con_strategy.add(constrained);
  con_sampler.add(constrained);

  // gain-tune
  auto* gain = app.add_subcommand("gain-tune", "Tune unicycle controller gains");
  std::string trajectory = "1";
  std::string start = "perfect";
  std::string strategy = "info_synth";
  int gain_queries = 30;
  double kappa = 5.0;
  double gain_sigma0 = 0.1;
  double t_period = 10.0;
  double t_final = 12.0;
  std::size_t pool_size = 50;
  std::uint64_t gain_seed = 0;
  std::string gain_out;
  bool interactive = false;
  bool gain_omit_timing = false;
  int gain_port = -1;
  std::string gain_host = "127.0.0.1";
  std::string gain_data_dir;
  SamplerFlags gain_sampler;
  gain->add_option("--trajectory", trajectory, "1, 2, 3, 4 or all")
      ->check(CLI::IsMember({"1", "2", "3", "4", "all"}))
      ->capture_default_str();
  gain->add_option("--start", start, "perfect, lateral, heading or all")
      ->check(CLI::IsMember({"perfect", "lateral", "heading", "all"}))
      ->capture_default_str();
  gain->add_option("--strategy", strategy, "info_synth, active_discrete or random_synthesis")
      ->check(CLI::IsMember({"info_synth", "active_discrete", "random_synthesis"}))
      ->capture_default_str();
  gain->add_option("--queries", gain_queries, "Queries")->capture_default_str();
  gain->add_option("--kappa", kappa, "Oracle sharpness per error unit")->capture_default_str();
  gain->add_option("--sigma0", gain_sigma0, "Learner noise level")->capture_default_str();
  gain->add_option("--t-period", t_period, "Seconds to traverse the curve")->capture_default_str();
  gain->add_option("--t-final", t_final, "Simulated seconds")->capture_default_str();
  gain->add_option("--pool-size", pool_size, "Candidate gains for active_discrete")
      ->capture_default_str();
  gain->add_option("--seed", gain_seed, "Seed")->capture_default_str();
  gain->add_option("--out", gain_out, "Results CSV (stdout when omitted)");
  gain->add_flag("--interactive", interactive, "Serve the session over HTTP for a human");
  gain->add_option("--port", gain_port, "Port for --interactive (default ACTIVEPREF_PORT or 8080)");
  gain->add_option("--host", gain_host, "Bind address for --interactive")->capture_default_str();
  gain->add_option("--data-dir", gain_data_dir, "Session snapshot directory for --interactive");
  gain->add_flag("--omit-timing", gain_omit_timing, "Write 0 for selection_seconds");
  gain_sampler.add(gain);

  // export-trajectory
  auto* exporter = app.add_subcommand("export-trajectory", "Simulate one gain vector and write CSVs");
  std::string ex_trajectory = "1";
  std::string ex_start = "perfect";
  std::string ex_gains = "1,1,1";
  std::string ex_out;
  std::string ex_reference;
  exporter->add_option("--trajectory", ex_trajectory, "1, 2, 3 or 4")
      ->check(CLI::IsMember({"1", "2", "3", "4"}))
      ->capture_default_str();
  exporter->add_option("--start", ex_start, "perfect, lateral or heading")
      ->check(CLI::IsMember({"perfect", "lateral", "heading"}))
      ->capture_default_str();
  exporter->add_option("--gains", ex_gains, "k_x,k_y,k_theta")->capture_default_str();
  exporter->add_option("--t-period", t_period, "Seconds to traverse the curve")->capture_default_str();
  exporter->add_option("--t-final", t_final, "Simulated seconds")->capture_default_str();
  exporter->add_option("--out", ex_out, "Trajectory CSV t,x,y,theta")->required();
  exporter->add_option("--reference-out", ex_reference, "Reference path CSV x,y");

  // serve
  auto* server_cmd = app.add_subcommand("serve", "Run the session service");
  int port = -1;
  std::string host = "127.0.0.1";
  std::string data_dir;
  std::uint64_t server_seed = 0;
  server_cmd->add_option("--port", port, "Port (default ACTIVEPREF_PORT or 8080)");
  server_cmd->add_option("--host", host, "Bind address")->capture_default_str();
  server_cmd->add_option("--data-dir", data_dir, "Session snapshot directory");
  server_cmd->add_option("--seed", server_seed, "Server seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*synth) {
      ap::ExperimentConfig cfg;
      cfg.spec.d = dim;
      cfg.spec.n_items = n_items;
      apply_run_flags(cfg, synth_run, synth);
      cfg.strategy = synth_strategy.config();
      cfg.sampler = synth_sampler.config();
      if (continuous && ap::is_pool_method(cfg.strategy.method)) {
        throw ap::ConfigError("--continuous needs info_synth or random_synthesis", "method");
      }
      cfg.spec.validate();
      return finish_experiment(cfg, synth_run);
    }
    if (*constrained) {
      ap::ExperimentConfig cfg;
      cfg.embeddings = ap::load_embeddings(embeddings);
      cfg.spec.d = cfg.embeddings->dim();
      cfg.spec.n_items = cfg.embeddings->size();
      apply_run_flags(cfg, con_run, constrained);
      cfg.strategy = con_strategy.config();
      cfg.sampler = con_sampler.config();
      cfg.spec.validate();
      return finish_experiment(cfg, con_run);
    }
    if (*gain) {
      ap::GainTuningConfig cfg;
      cfg.scenarios = ap::make_scenarios(trajectory, start, t_period, t_final);
      cfg.strategy = ap::parse_method(strategy);
      cfg.queries = gain_queries;
      cfg.kappa = kappa;
      cfg.sigma0 = gain_sigma0;
      cfg.pool_size = pool_size;
      cfg.sampler = gain_sampler.config();
      cfg.seed = gain_seed;
      cfg.validate();
      if (interactive) {
        ap::SessionService::Options opts;
        opts.seed = gain_seed;
        if (!gain_data_dir.empty()) opts.data_dir = gain_data_dir;
        ap::SessionService service(opts);
        const ap::json request = {
            {"mode", "gain_tuning"},
            {"config",
             {{"trajectory", trajectory}, {"start", start}, {"strategy", strategy},
              {"sigma0", gain_sigma0}, {"kappa", kappa}, {"pool_size", pool_size},
              {"max_queries", gain_queries}, {"seed", gain_seed}, {"t_period", t_period},
              {"t_final", t_final},
              {"sampler",
               {{"chains", cfg.sampler.chains}, {"burn_in", cfg.sampler.burn_in},
                {"samples", cfg.sampler.samples}, {"target_accept", cfg.sampler.target_accept}}}}}};
        const ap::ServiceReply created = service.create_session(request);
        if (created.status != 201) {
          std::cerr << "error: " << created.body.dump() << '\n';
          return kExitConfig;
        }
        std::cout << "session " << created.body["session_id"].get<std::string>() << '\n';
        return serve(service, gain_host, gain_port >= 0 ? gain_port : ap::port_from_env(8080));
      }
      const auto steps = ap::tune_gains(cfg);
      if (gain_out.empty()) {
        ap::write_tuning_steps(std::cout, steps, gain_omit_timing);
      } else {
        std::ofstream out(gain_out);
        if (!out) throw ap::Error("cannot write " + gain_out);
        ap::write_tuning_steps(out, steps, gain_omit_timing);
        std::cout << "final mean tracking error " << steps.back().mean_error << '\n';
      }
      return 0;
    }
    if (*exporter) {
      const auto g = parse_gains(ex_gains);
      const auto scenarios = ap::make_scenarios(ex_trajectory, ex_start, t_period, t_final);
      const ap::SimulationOutcome sim =
          ap::simulate_until_divergence({g[0], g[1], g[2]}, scenarios.front());
      std::ofstream out(ex_out);
      if (!out) throw ap::Error("cannot write " + ex_out);
      out << "t,x,y,theta\n" << std::setprecision(17);
      for (const auto& s : sim.trajectory.samples) {
        out << s.t << ',' << s.state.x << ',' << s.state.y << ',' << s.state.theta << '\n';
      }
      if (!ex_reference.empty()) {
        std::ofstream ref(ex_reference);
        if (!ref) throw ap::Error("cannot write " + ex_reference);
        ref << "x,y\n" << std::setprecision(17);
        for (const auto& p : ap::discretize_path(scenarios.front().path, 200)) {
          ref << p.x() << ',' << p.y() << '\n';
        }
      }
      if (sim.diverged) {
        std::cerr << "error: simulation diverged; wrote the finite prefix\n";
        return kExitRuntime;
      }
      return 0;
    }
    if (*server_cmd) {
      ap::SessionService::Options opts;
      opts.seed = server_seed;
      if (!data_dir.empty()) opts.data_dir = data_dir;
      ap::SessionService service(opts);
      return serve(service, host, port >= 0 ? port : ap::port_from_env(8080));
    }
  } catch (const ap::ConfigError& e) {
    std::cerr << "config error";
    if (!e.field().empty()) std::cerr << " (" << e.field() << ")";
    std::cerr << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const ap::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

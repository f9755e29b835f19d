#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "irsnoma/config_file.hpp"
#include "irsnoma/errors.hpp"
#include "irsnoma/orchestration.hpp"
#include "irsnoma/scenario.hpp"
#include "irsnoma/solution_file.hpp"

using namespace irsnoma;

namespace {

void print_solution(const SystemConfig& config, const FullSolution& s) {
  std::printf("algorithm     %s\n", to_string(s.algorithm));
  std::printf("power         %.9g W (%.4f dBm)\n", s.power_watts,
              10.0 * std::log10(s.power_watts * 1000.0));
  std::printf("feasible      %s (min rate margin %.3e bit/s/Hz)\n",
              s.rates.feasible ? "yes" : "no", s.rates.margin);
  if (s.alpha_shared) std::printf("alpha shared  %.6g\n", *s.alpha_shared);
  for (int k = 0; k < config.clusters; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    std::printf("cluster %d     ", k);
    if (!s.alpha.empty()) std::printf("alpha %.6f  ", s.alpha[ku]);
    std::printf("R_center %.6f (target %.3g)  R_edge %.6f (target %.3g)\n", s.rates.rate_c[ku],
                config.rate_center[ku], s.rates.rate_e[ku], config.rate_edge[ku]);
  }
  std::printf("iterations    outer %d, init %d, beamforming %d, solver calls %d\n",
              s.outer_iters, s.init_iters, s.beam_iters, s.solver_calls);
  if (s.degraded) std::printf("degraded      %s\n", s.degraded_reason.c_str());
}

int cmd_solve(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& algorithm, const std::string& out) {
  SystemConfig config = load_config(config_path);
  if (seed) config.seed = *seed;
  const Algorithm a = parse_algorithm(algorithm);
  const ChannelSet ch = generate_channels(config, config.seed);
  const auto [sol, trace] = run_algorithm(a, ch, config);
  print_solution(config, sol);
  const ComplexityReport cx = complexity_estimate(config, trace);
  std::printf("complexity    ~%.3g flop units (n^4.5 log(1/eps) model)\n", cx.total);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write '" + out + "'");
    write_solution(f, config, sol);
    std::printf("solution      written to %s\n", out.c_str());
  }
  return 0;
}

int cmd_sweep(int figure, const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& algorithm, std::optional<int> trials, const std::string& out,
              std::string trace_out) {
  const SystemConfig base = config_path.empty() ? SystemConfig{} : load_config(config_path);
  ScenarioSpec spec = figure_spec(figure, base);
  if (seed) spec.master_seed = *seed;
  if (trials) spec.trials = *trials;
  if (!algorithm.empty()) spec.algorithms = {parse_algorithm(algorithm)};
  spec.validate();

  std::ofstream csv(out);
  if (!csv) throw ConfigError("cannot write '" + out + "'");
  csv << kCsvHeader << '\n';
  std::ofstream traces;
  if (spec.record_traces) {
    if (trace_out.empty()) trace_out = out + ".trace.csv";
    traces.open(trace_out);
    if (!traces) throw ConfigError("cannot write '" + trace_out + "'");
    traces << kTraceCsvHeader << '\n';
  }
  const std::size_t total =
      spec.values.size() * static_cast<std::size_t>(spec.trials) * spec.algorithms.size();
  std::size_t done = 0, infeasible = 0;
  run_scenario(spec, [&](const ResultRow& r) {
    write_csv_row(csv, r);
    csv.flush();
    if (traces.is_open()) write_trace_rows(traces, r);
    ++done;
    if (!r.feasible) ++infeasible;
    std::fprintf(stderr, "[%zu/%zu] %s %s=%g seed %llu: %s\n", done, total,
                 to_string(r.algorithm), to_string(r.param), r.value,
                 static_cast<unsigned long long>(r.seed),
                 r.feasible ? (std::to_string(r.power_dbm) + " dBm").c_str()
                            : ("infeasible: " + r.error).c_str());
  });
  std::fprintf(stderr, "%zu rows written to %s (%zu infeasible)\n", done, out.c_str(), infeasible);
  return 0;
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open solution file '" + path + "'");
  const StoredSolution stored = read_solution(in, path);
  const ReplayReport r = replay(stored);
  std::printf("stored power    %.17g W\n", r.stored_power);
  std::printf("replayed power  %.17g W\n", r.replayed_power);
  std::printf("feasible        %s (min rate margin %.3e)\n", r.rates.feasible ? "yes" : "no",
              r.rates.margin);
  std::printf("identical       %s\n", r.identical ? "yes" : "no");
  return r.identical ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmit-power minimization for IRS-assisted multi-cluster NOMA downlinks"};
  app.require_subcommand(1);

  std::string config_path, algorithm = "alternating", out, trace_out, solution_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int figure = 1;

  auto* solve = app.add_subcommand("solve", "solve one instance from a config file");
  solve->add_option("--config", config_path, "key = value config file")->required();
  solve->add_option("--seed", seed, "override the config seed");
  solve->add_option("--algorithm", algorithm, "alternating | exhaustive | random-phase | oma");
  solve->add_option("--out", out, "write the solution file here");

  std::string sweep_algorithm;
  auto* sweep = app.add_subcommand("sweep", "run a figure scenario and write CSV rows");
  sweep->add_option("--figure", figure, "figure scenario 1..6")->required()->check(CLI::Range(1, 6));
  sweep->add_option("--config", config_path, "base parameters (K is forced to 2)");
  sweep->add_option("--seed", seed, "master seed; trial t uses seed + t");
  sweep->add_option("--algorithm", sweep_algorithm, "run only this algorithm");
  sweep->add_option("--trials", trials, "seeds per swept value")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "CSV output path")->required();
  sweep->add_option("--trace-out", trace_out, "trace CSV for figures 5 and 6");

  auto* rep = app.add_subcommand("replay", "re-evaluate a stored solution");
  rep->add_option("solution", solution_path, "solution file written by solve --out")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(config_path, seed, algorithm, out);
    if (*sweep)
      return cmd_sweep(figure, config_path, seed, sweep_algorithm, trials, out, trace_out);
    if (*rep) return cmd_replay(solution_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

#include "irsnoma/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "irsnoma/errors.hpp"

namespace irsnoma {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<Algorithm> kAllAlgorithms{Algorithm::Alternating, Algorithm::PartialExhaustive,
                                            Algorithm::RandomPhase, Algorithm::Oma};

void append_trace(ResultRow& row, const char* name, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    row.traces.push_back({name, static_cast<int>(i) + 1, values[i]});
}

}  // namespace

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::N: return "N";
    case SweepParam::M: return "M";
    case SweepParam::Rc: return "Rc";
    case SweepParam::d0: return "d0";
  }
  return "?";
}

SweepParam parse_sweep_param(const std::string& name) {
  for (SweepParam p : {SweepParam::N, SweepParam::M, SweepParam::Rc, SweepParam::d0})
    if (name == to_string(p)) return p;
  throw ConfigError("unknown sweep parameter '" + name + "' (expected N, M, Rc or d0)");
}

SystemConfig apply_sweep(const SystemConfig& base, SweepParam param, double value) {
  SystemConfig c = base.normalized();
  auto as_int = [&] {
    if (value != std::round(value) || value < 1.0)
      throw ConfigError("sweep value " + num(value) + " must be a positive integer");
    return static_cast<int>(value);
  };
  switch (param) {
    case SweepParam::N: c.irs_elements = as_int(); break;
    case SweepParam::M: c.bs_antennas = as_int(); break;
    case SweepParam::Rc: c.rate_center.assign(static_cast<std::size_t>(c.clusters), value); break;
    case SweepParam::d0: c.dist_irs_edge = value; break;
  }
  return c;
}

void ScenarioSpec::validate() const {
  if (values.empty()) throw ConfigError("scenario '" + id + "': no swept values");
  if (!std::is_sorted(values.begin(), values.end()) ||
      std::adjacent_find(values.begin(), values.end()) != values.end())
    throw ConfigError("scenario '" + id + "': swept values must be strictly increasing");
  if (trials < 1) throw ConfigError("scenario '" + id + "': trials must be >= 1");
  if (algorithms.empty()) throw ConfigError("scenario '" + id + "': no algorithms");
  for (double v : values) apply_sweep(base, param, v).validate();
}

ScenarioSpec figure_spec(int figure, const SystemConfig& base) {
  ScenarioSpec s;
  s.base = base;
  s.base.clusters = 2;
  s.base.rate_center.assign(2, base.rate_center.front());
  s.base.rate_edge.assign(2, base.rate_edge.front());
  s.id = "fig" + std::to_string(figure);
  s.algorithms = kAllAlgorithms;
  switch (figure) {
    case 1:
      s.base.bs_antennas = 8;
      s.param = SweepParam::N;
      s.values = {8, 16, 32};
      break;
    case 2:
      s.base.bs_antennas = 8;
      s.base.irs_elements = 32;
      s.param = SweepParam::Rc;
      s.values = {0.5, 1.0, 1.5};
      break;
    case 3:
      s.base.irs_elements = 32;
      s.param = SweepParam::M;
      s.values = {4, 6, 8};
      break;
    case 4:
      s.base.bs_antennas = 8;
      s.base.irs_elements = 32;
      s.param = SweepParam::d0;
      s.values = {5, 10, 20};
      break;
    case 5:
      s.base.bs_antennas = 8;
      s.base.irs_elements = 16;
      s.param = SweepParam::Rc;
      s.values = {1.0, 1.2};
      s.algorithms = {Algorithm::Alternating};
      s.record_traces = true;
      break;
    case 6:
      s.base.irs_elements = 16;
      s.param = SweepParam::M;
      s.values = {4, 6, 8};
      s.algorithms = {Algorithm::Alternating};
      s.record_traces = true;
      break;
    default:
      throw ConfigError("figure must be 1..6, got " + std::to_string(figure));
  }
  return s;
}

ResultRow run_row(const ScenarioSpec& spec, Algorithm a, double value, std::uint64_t seed) {
  ResultRow row;
  row.scenario = spec.id;
  row.algorithm = a;
  row.param = spec.param;
  row.value = value;
  row.seed = seed;
  row.power_watts = std::numeric_limits<double>::quiet_NaN();
  row.power_dbm = std::numeric_limits<double>::quiet_NaN();
  SystemConfig config = apply_sweep(spec.base, spec.param, value);
  config.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const ChannelSet ch = generate_channels(config, seed);
    const auto [sol, trace] = run_algorithm(a, ch, config);
    row.power_watts = sol.power_watts;
    row.feasible = sol.rates.feasible;
    row.outer_iters = sol.outer_iters;
    row.solver_calls = sol.solver_calls;
    if (row.feasible)
      row.power_dbm = 10.0 * std::log10(row.power_watts * 1000.0);
    else
      row.error = "returned solution misses a QoS target";
    if (spec.record_traces) {
      if (!trace.q_traces.empty()) append_trace(row, "q", trace.q_traces.front());
      if (!trace.beam_traces.empty()) append_trace(row, "beam_objective", trace.beam_traces.front());
      append_trace(row, "outer_power", trace.outer_objective);
    }
  } catch (const Error& e) {
    row.feasible = false;
    row.error = e.what();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

std::vector<ResultRow> run_scenario(const ScenarioSpec& spec,
                                    const std::function<void(const ResultRow&)>& on_row) {
  spec.validate();
  std::vector<ResultRow> rows;
  for (double v : spec.values)
    for (int t = 0; t < spec.trials; ++t)
      for (Algorithm a : spec.algorithms) {
        rows.push_back(run_row(spec, a, v, spec.master_seed + static_cast<std::uint64_t>(t)));
        if (on_row) on_row(rows.back());
      }
  return rows;
}

void write_csv_row(std::ostream& os, const ResultRow& r) {
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", r.wall_ms);
  os << r.scenario << ',' << to_string(r.algorithm) << ',' << to_string(r.param) << ','
     << num(r.value) << ',' << r.seed << ',' << num(r.power_watts) << ',' << num(r.power_dbm)
     << ',' << (r.feasible ? 1 : 0) << ',' << r.outer_iters << ',' << r.solver_calls << ',' << ms
     << '\n';
}

void write_trace_rows(std::ostream& os, const ResultRow& r) {
  for (const auto& t : r.traces)
    os << r.scenario << ',' << to_string(r.algorithm) << ',' << to_string(r.param) << ','
       << num(r.value) << ',' << r.seed << ',' << t.trace << ',' << t.iteration << ','
       << num(t.value) << '\n';
}

}  // namespace irsnoma

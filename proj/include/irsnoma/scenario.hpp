#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "irsnoma/model.hpp"
#include "irsnoma/orchestration.hpp"

namespace irsnoma {

enum class SweepParam { N, M, Rc, d0 };

const char* to_string(SweepParam p);
SweepParam parse_sweep_param(const std::string& name);

/// Batch experiment: every algorithm at every swept value for `trials` seeds.
/// Trial t runs with seed master_seed + t for all values and algorithms, so
/// rows are paired across the sweep.
struct ScenarioSpec {
  std::string id = "custom";
  SweepParam param = SweepParam::N;
  std::vector<double> values;
  SystemConfig base;
  int trials = 50;
  std::vector<Algorithm> algorithms;
  std::uint64_t master_seed = 1;
  bool record_traces = false;

  /// Throws ConfigError unless values are non-empty and sorted, trials >= 1,
  /// at least one algorithm is listed and every swept config is valid.
  void validate() const;
};

/// Desk-scale defaults for figures 1-6, K = 2 and 50 trials:
///   1: M = 8, sweep N over {8, 16, 32}, all algorithms
///   2: M = 8, N = 32, sweep Rc over {0.5, 1, 1.5}, all algorithms
///   3: N = 32, sweep M over {4, 6, 8}, all algorithms
///   4: M = 8, N = 32, sweep d0 over {5, 10, 20}, all algorithms
///   5: M = 8, N = 16, sweep Rc over {1, 1.2}, alternating, q traces
///   6: N = 16, sweep M over {4, 6, 8}, alternating, objective traces
/// Parameters other than K, M, N and the swept one come from `base`.
ScenarioSpec figure_spec(int figure, const SystemConfig& base = {});

/// `base` with the swept parameter set to `value` (rates apply to all clusters).
SystemConfig apply_sweep(const SystemConfig& base, SweepParam param, double value);

struct TracePoint {
  std::string trace;  // q, beam_objective or outer_power
  int iteration = 0;
  double value = 0.0;
};

struct ResultRow {
  std::string scenario;
  Algorithm algorithm = Algorithm::Alternating;
  SweepParam param = SweepParam::N;
  double value = 0.0;
  std::uint64_t seed = 0;
  double power_watts = 0.0;
  double power_dbm = 0.0;  // NaN unless feasible
  bool feasible = false;
  int outer_iters = 0;
  int solver_calls = 0;
  double wall_ms = 0.0;
  std::string error;  // why the row is infeasible, if it is
  std::vector<TracePoint> traces;
};

/// Runs one (algorithm, value, seed) cell. Library errors become an
/// infeasible row carrying the message; nothing is thrown for them.
ResultRow run_row(const ScenarioSpec& spec, Algorithm a, double value, std::uint64_t seed);

/// All rows, ordered by value, then seed, then algorithm in spec order.
/// `on_row` sees each row as soon as it is finished.
std::vector<ResultRow> run_scenario(const ScenarioSpec& spec,
                                    const std::function<void(const ResultRow&)>& on_row = {});

inline constexpr const char* kCsvHeader =
    "scenario,algorithm,sweep_param,sweep_value,seed,power_watts,power_dbm,feasible,outer_iters,"
    "solver_calls,wall_ms";
inline constexpr const char* kTraceCsvHeader =
    "scenario,algorithm,sweep_param,sweep_value,seed,trace,iteration,value";

void write_csv_row(std::ostream& os, const ResultRow& row);
void write_trace_rows(std::ostream& os, const ResultRow& row);

}  // namespace irsnoma

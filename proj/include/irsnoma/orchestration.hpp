#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "irsnoma/beamforming.hpp"
#include "irsnoma/conic.hpp"
#include "irsnoma/model.hpp"
#include "irsnoma/random.hpp"

namespace irsnoma {

enum class Algorithm { Alternating, PartialExhaustive, RandomPhase, Oma };

const char* to_string(Algorithm a);
/// Accepts alternating, exhaustive, random-phase, oma.
Algorithm parse_algorithm(const std::string& name);

struct FullSolution {
  Algorithm algorithm = Algorithm::Alternating;
  std::vector<cvec> w;       // NOMA beams, or the center-user slot for OMA
  std::vector<cvec> w_edge;  // OMA edge-user slot only
  std::vector<double> alpha;
  std::vector<cvec> e;
  std::optional<double> alpha_shared;  // grid point chosen by the exhaustive search

  double power_watts = 0.0;
  RateReport rates;
  int outer_iters = 0;
  int init_iters = 0;
  int beam_iters = 0;
  int solver_calls = 0;
  bool degraded = false;  // a stage failed after the first outer iteration
  std::string degraded_reason;
};

/// Re-evaluates power and QoS of a solution from its stored fields. OMA
/// solutions are evaluated as two equal time slots at half the rate each.
RateReport evaluate_full_solution(const ChannelSet& ch, const SystemConfig& config,
                                  const FullSolution& s);
double full_solution_power(const FullSolution& s);

struct StageTimes {
  double init_ms = 0.0;
  double beamforming_ms = 0.0;
  double randomization_ms = 0.0;
  double phase_ms = 0.0;
};

struct AlgorithmTrace {
  std::vector<double> outer_objective;  // incumbent power after each outer iteration
  std::vector<std::vector<double>> q_traces;
  std::vector<std::vector<double>> beam_traces;
  StageTimes times;
  int init_solves = 0;
  int beam_solves = 0;
  int phase_solves = 0;
};

inline constexpr int kOuterCap = 20;

/// Alternating beamforming / phase optimization with feasible-point search.
/// Initial phases are uniform random, drawn from a stream derived from config.seed.
std::pair<FullSolution, AlgorithmTrace> run_alternating(const ChannelSet& ch,
                                                        const SystemConfig& config);

/// Fixed shared power coefficient: every QoS constraint is linear in W.
conic::ConeProgram build_p6(const ChannelSet& ch, std::span<const cvec> e, double alpha_shared,
                            const SystemConfig& config);
/// Phase feasibility with a shared power coefficient.
conic::ConeProgram build_p7(const ChannelSet& ch, std::span<const cvec> w, double alpha_shared,
                            const SystemConfig& config);

std::pair<FullSolution, AlgorithmTrace> run_partial_exhaustive(const ChannelSet& ch,
                                                               const SystemConfig& config);

/// Shared-coefficient grid search with phases drawn once and never updated.
FullSolution random_phase_baseline(const ChannelSet& ch, const SystemConfig& config, Rng& rng);

/// Two equal orthogonal slots: all center users in one, all edge users in the
/// other, each at rate 2R; power is the time average.
FullSolution oma_baseline(const ChannelSet& ch, const SystemConfig& config);

/// Dispatches on the algorithm; the random-phase baseline draws from a stream
/// derived from config.seed.
std::pair<FullSolution, AlgorithmTrace> run_algorithm(Algorithm a, const ChannelSet& ch,
                                                      const SystemConfig& config);

struct ComplexityRow {
  std::string stage;
  int size = 0;       // problem size n
  int solves = 0;     // measured solve count
  double cost = 0.0;  // solves * n^4.5 * log2(1/eps)
};

struct ComplexityReport {
  std::vector<ComplexityRow> rows;
  double total = 0.0;
};

/// Asymptotic cost model n^4.5 log2(1/eps) per SDR solve, with measured solve
/// counts substituted. n1 = K M for the beamforming programs and n2 = K N for
/// the phase programs. A modeling aid, not a timing prediction.
ComplexityReport complexity_estimate(const SystemConfig& config, const AlgorithmTrace& trace,
                                     double solver_accuracy = 1e-7);
double sdr_cost(int n, double accuracy);

}  // namespace irsnoma

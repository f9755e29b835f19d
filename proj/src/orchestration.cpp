#include "irsnoma/orchestration.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "irsnoma/errors.hpp"
#include "irsnoma/phase.hpp"
#include "irsnoma/randomization.hpp"

namespace irsnoma {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Stream ids for the per-algorithm random sources.
constexpr std::uint64_t kAlternatingStream = 1;
constexpr std::uint64_t kExhaustiveStream = 2;
constexpr std::uint64_t kRandomPhaseStream = 3;
constexpr std::uint64_t kOmaStream = 4;

std::vector<cmat> matrices(const conic::SolverResult& r, int count) {
  std::vector<cmat> W;
  for (int k = 0; k < count; ++k) {
    const cmat& X = r.matrix(k);
    W.push_back(0.5 * (X + X.adjoint()));
  }
  return W;
}

bool improved_enough(double prev, double cur, double eps) {
  return std::isfinite(prev) && prev - cur >= eps * cur;
}

void finish(FullSolution& s, const ChannelSet& ch, const SystemConfig& config) {
  s.power_watts = full_solution_power(s);
  s.rates = evaluate_full_solution(ch, config, s);
}

// Shared-coefficient inner loop: P6 -> randomize -> P7 -> randomize, starting
// from phases e. Updates `best` whenever a cheaper feasible point appears.
// Returns false if the first P6 solve is infeasible.
bool shared_alpha_loop(const ChannelSet& ch, const SystemConfig& config, double alpha,
                       std::vector<cvec> e, bool update_phases, Rng& rng,
                       std::optional<FullSolution>& best, AlgorithmTrace& trace, int& iters) {
  const int K = config.clusters;
  const std::vector<double> alphas(static_cast<std::size_t>(K), alpha);
  double prev = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int it = 0; it < kOuterCap; ++it) {
    auto t0 = Clock::now();
    const conic::SolverResult r = conic::solve(build_p6(ch, e, alpha, config));
    ++trace.beam_solves;
    trace.times.beamforming_ms += ms_since(t0);
    if (!r.optimal()) break;

    t0 = Clock::now();
    std::vector<cvec> w;
    try {
      w = randomize_beamformers(matrices(r, K), alphas, ch, e, config, rng, config.rand_trials)
              .first;
    } catch (const RandomizationError&) {
      trace.times.randomization_ms += ms_since(t0);
      break;
    }
    trace.times.randomization_ms += ms_since(t0);
    ++iters;
    any = true;

    FullSolution cand;
    cand.w = w;
    cand.alpha = alphas;
    cand.e = e;
    cand.alpha_shared = alpha;
    cand.power_watts = total_power(w);
    if (!best || cand.power_watts < best->power_watts) best = std::move(cand);

    const double p = total_power(w);
    if (!update_phases || (std::isfinite(prev) && !improved_enough(prev, p, config.eps_alt)))
      break;
    prev = std::min(prev, p);

    t0 = Clock::now();
    const conic::SolverResult pr = conic::solve(build_p7(ch, w, alpha, config));
    ++trace.phase_solves;
    if (!pr.optimal()) {
      trace.times.phase_ms += ms_since(t0);
      break;
    }
    try {
      e = randomize_phases(matrices(pr, K), ch, w, alphas, config, rng, config.rand_trials).first;
    } catch (const RandomizationError&) {
      trace.times.phase_ms += ms_since(t0);
      break;
    }
    trace.times.phase_ms += ms_since(t0);
  }
  return any;
}

}  // namespace

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Alternating: return "alternating";
    case Algorithm::PartialExhaustive: return "exhaustive";
    case Algorithm::RandomPhase: return "random-phase";
    case Algorithm::Oma: return "oma";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::Alternating, Algorithm::PartialExhaustive,
                      Algorithm::RandomPhase, Algorithm::Oma})
    if (name == to_string(a)) return a;
  throw ConfigError("unknown algorithm '" + name +
                    "' (expected alternating, exhaustive, random-phase or oma)");
}

double full_solution_power(const FullSolution& s) {
  if (s.algorithm == Algorithm::Oma) return 0.5 * (total_power(s.w) + total_power(s.w_edge));
  return total_power(s.w);
}

RateReport evaluate_full_solution(const ChannelSet& ch, const SystemConfig& config,
                                  const FullSolution& s) {
  if (s.algorithm != Algorithm::Oma) return evaluate_solution(ch, config, s.w, s.alpha, s.e);
  const int K = ch.clusters();
  if (static_cast<int>(s.w.size()) != K || static_cast<int>(s.w_edge.size()) != K ||
      static_cast<int>(s.e.size()) != K)
    throw ModelingError("OMA solution does not have one entry per cluster");
  RateReport report;
  report.margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    report.sinr_c.push_back(sinr_center(ch, s.w, 1.0, k));
    report.sinr_e.push_back(sinr_edge(ch, s.w_edge, 0.0, s.e[ku], k));
    report.sinr_c_to_e.push_back(std::numeric_limits<double>::infinity());
    report.rate_c.push_back(0.5 * std::log2(1.0 + report.sinr_c.back()));
    report.rate_e.push_back(0.5 * std::log2(1.0 + report.sinr_e.back()));
    report.margin = std::min({report.margin, report.rate_c.back() - config.rate_center[ku],
                              report.rate_e.back() - config.rate_edge[ku]});
  }
  report.feasible = report.margin >= 0.0;
  return report;
}

std::pair<FullSolution, AlgorithmTrace> run_alternating(const ChannelSet& ch,
                                                        const SystemConfig& config) {
  const int K = config.clusters;
  Rng rng(Rng::derive_seed(config.seed, kAlternatingStream));
  std::vector<cvec> e = random_phases(K, config.irs_elements, rng);

  AlgorithmTrace trace;
  std::optional<FullSolution> best;
  std::optional<FixedPoints> start;
  int outer = 0, init_iters = 0, beam_iters = 0;
  bool degraded = false;
  std::string reason;

  for (int j = 0; j < kOuterCap; ++j) {
    try {
      auto t0 = Clock::now();
      auto [fp, qt] = find_initial_points(ch, e, config, rng, start);
      trace.times.init_ms += ms_since(t0);
      trace.init_solves += qt.solver_calls;
      init_iters += qt.solver_calls;
      trace.q_traces.push_back(qt.q_history);

      t0 = Clock::now();
      BeamformingSolution bs = optimize_beamforming(ch, e, fp, config);
      trace.beam_solves += bs.solver_calls;
      beam_iters += bs.solver_calls;
      trace.beam_traces.push_back(bs.objective_trace);

      // Re-solve the exact SDR at the SCA power split so that the lifted
      // optimum is a true lower bound for the randomized beams.
      std::vector<cmat> W = bs.W;
      bool interior = true;
      for (double a : bs.alpha) interior = interior && a > 0.0 && a < 1.0;
      if (interior) {
        const conic::SolverResult r = conic::solve(build_fixed_alpha_sdr(ch, e, bs.alpha, config));
        ++trace.beam_solves;
        if (r.optimal()) W = matrices(r, K);
      }
      trace.times.beamforming_ms += ms_since(t0);

      t0 = Clock::now();
      std::vector<cvec> w =
          randomize_beamformers(W, bs.alpha, ch, e, config, rng, config.rand_trials).first;
      trace.times.randomization_ms += ms_since(t0);
      ++outer;

      const double prev = best ? best->power_watts : std::numeric_limits<double>::infinity();
      const double p = total_power(w);
      if (!best || p < best->power_watts) {
        FullSolution s;
        s.algorithm = Algorithm::Alternating;
        s.w = w;
        s.alpha = bs.alpha;
        s.e = e;
        s.power_watts = p;
        best = std::move(s);
      }
      trace.outer_objective.push_back(best->power_watts);
      if (j > 0 && !improved_enough(prev, best->power_watts, config.eps_alt)) break;

      t0 = Clock::now();
      const PhaseFeasibility pf = solve_phase_feasibility(ch, w, bs.alpha, config);
      ++trace.phase_solves;
      if (!pf.feasible()) {
        trace.times.phase_ms += ms_since(t0);
        break;
      }
      std::vector<cvec> e_next;
      try {
        e_next = randomize_phases(pf.lifted.V, ch, w, bs.alpha, config, rng, config.rand_trials)
                     .first;
      } catch (const RandomizationError&) {
        trace.times.phase_ms += ms_since(t0);
        break;
      }
      trace.times.phase_ms += ms_since(t0);
      start = fixed_points_from_beamformers(ch, e_next, w, bs.alpha);
      e = std::move(e_next);
    } catch (const Error& ex) {
      if (!best) throw;
      degraded = true;
      reason = ex.what();
      break;
    }
  }

  FullSolution s = std::move(*best);
  s.outer_iters = outer;
  s.init_iters = init_iters;
  s.beam_iters = beam_iters;
  s.solver_calls = trace.init_solves + trace.beam_solves + trace.phase_solves;
  s.degraded = degraded;
  s.degraded_reason = reason;
  finish(s, ch, config);
  return {std::move(s), std::move(trace)};
}

conic::ConeProgram build_p6(const ChannelSet& ch, std::span<const cvec> e, double alpha_shared,
                            const SystemConfig& config) {
  const std::vector<double> alphas(static_cast<std::size_t>(config.clusters), alpha_shared);
  return build_fixed_alpha_sdr(ch, e, alphas, config);
}

conic::ConeProgram build_p7(const ChannelSet& ch, std::span<const cvec> w, double alpha_shared,
                            const SystemConfig& config) {
  if (!(alpha_shared > 0.0 && alpha_shared < 1.0))
    throw DomainError("shared power coefficient must lie in (0, 1)");
  const std::vector<double> alphas(static_cast<std::size_t>(config.clusters), alpha_shared);
  return build_p5(ch, w, alphas, config);
}

std::pair<FullSolution, AlgorithmTrace> run_partial_exhaustive(const ChannelSet& ch,
                                                               const SystemConfig& config) {
  Rng rng(Rng::derive_seed(config.seed, kExhaustiveStream));
  const std::vector<cvec> e0 = random_phases(config.clusters, config.irs_elements, rng);
  AlgorithmTrace trace;
  std::optional<FullSolution> best;
  int iters = 0;
  for (double alpha : config.alpha_grid) {
    shared_alpha_loop(ch, config, alpha, e0, true, rng, best, trace, iters);
    trace.outer_objective.push_back(best ? best->power_watts
                                         : std::numeric_limits<double>::infinity());
  }
  if (!best) throw InfeasibleError("partial exhaustive search: no grid point is feasible");
  FullSolution s = std::move(*best);
  s.algorithm = Algorithm::PartialExhaustive;
  s.outer_iters = iters;
  s.beam_iters = trace.beam_solves;
  s.solver_calls = trace.beam_solves + trace.phase_solves;
  finish(s, ch, config);
  return {std::move(s), std::move(trace)};
}

FullSolution random_phase_baseline(const ChannelSet& ch, const SystemConfig& config, Rng& rng) {
  const std::vector<cvec> e = random_phases(config.clusters, config.irs_elements, rng);
  AlgorithmTrace trace;
  std::optional<FullSolution> best;
  int iters = 0;
  for (double alpha : config.alpha_grid)
    shared_alpha_loop(ch, config, alpha, e, false, rng, best, trace, iters);
  if (!best) throw InfeasibleError("random-phase baseline: no grid point is feasible");
  FullSolution s = std::move(*best);
  s.algorithm = Algorithm::RandomPhase;
  s.outer_iters = iters;
  s.beam_iters = trace.beam_solves;
  s.solver_calls = trace.beam_solves;
  finish(s, ch, config);
  return s;
}

FullSolution oma_baseline(const ChannelSet& ch, const SystemConfig& config) {
  ch.validate(config);
  const int K = config.clusters;
  const int M = config.bs_antennas;
  const double s2 = ch.noise_power;
  Rng rng(Rng::derive_seed(config.seed, kOmaStream));
  SystemConfig slot = config;
  for (double& r : slot.rate_center) r *= 2.0;
  for (double& r : slot.rate_edge) r *= 2.0;
  std::vector<double> rc, re;
  for (int k = 0; k < K; ++k) {
    rc.push_back(sinr_threshold(slot.rate_center[static_cast<std::size_t>(k)]));
    re.push_back(sinr_threshold(slot.rate_edge[static_cast<std::size_t>(k)]));
  }
  int calls = 0;

  // min sum Tr(W_k) s.t. Tr(G_k W_k) - r_k sum_{i!=k} Tr(G_k W_i) >= r_k, G_k = g g^H / sigma^2
  auto slot_program = [&](const std::vector<cvec>& g, const std::vector<double>& r) {
    conic::ConeProgram p;
    for (int k = 0; k < K; ++k) p.add_matrix("W" + std::to_string(k), M);
    for (int k = 0; k < K; ++k) {
      p.objective += conic::AffineExpr::trace(k, cmat::Identity(M, M));
      const auto ku = static_cast<std::size_t>(k);
      const cmat Gk = g[ku] * g[ku].adjoint() / s2;
      conic::AffineExpr expr = conic::AffineExpr::trace(k, Gk) - r[ku];
      for (int i = 0; i < K; ++i)
        if (i != k) expr -= r[ku] * conic::AffineExpr::trace(i, Gk);
      p.add_linear(std::move(expr), conic::Sense::GreaterEqual, "sinr_" + std::to_string(k));
    }
    return p;
  };
  auto solve_slot = [&](const std::vector<cvec>& g, const std::vector<double>& r) {
    const conic::SolverResult res = conic::solve(slot_program(g, r));
    ++calls;
    if (!res.optimal())
      throw InfeasibleError(std::string("OMA slot program ended ") + conic::to_string(res.status));
    return randomize_single_user_beamformers(matrices(res, K), g, r, s2, rng, config.rand_trials)
        .first;
  };

  FullSolution s;
  s.algorithm = Algorithm::Oma;
  s.w = solve_slot(ch.h_center, rc);

  std::vector<cvec> e = random_phases(K, config.irs_elements, rng);
  auto edge_gains = [&](const std::vector<cvec>& phases) {
    std::vector<cvec> z;
    for (int k = 0; k < K; ++k)
      z.push_back(effective_edge_channel(ch, phases[static_cast<std::size_t>(k)], k));
    return z;
  };
  const std::vector<double> no_split(static_cast<std::size_t>(K), 0.0);
  double prev = std::numeric_limits<double>::infinity();
  int iters = 0;
  for (int it = 0; it < kOuterCap; ++it) {
    std::vector<cvec> w = solve_slot(edge_gains(e), re);
    ++iters;
    const double p = total_power(w);
    if (s.w_edge.empty() || p < total_power(s.w_edge)) {
      s.w_edge = w;
      s.e = e;
    }
    if (std::isfinite(prev) && !improved_enough(prev, p, config.eps_alt)) break;
    prev = std::min(prev, p);
    const PhaseFeasibility pf = solve_phase_feasibility(ch, w, no_split, slot);
    ++calls;
    if (!pf.feasible()) break;
    try {
      e = randomize_phases(pf.lifted.V, ch, w, no_split, slot, rng, config.rand_trials).first;
    } catch (const RandomizationError&) {
      break;
    }
  }
  s.outer_iters = iters;
  s.solver_calls = calls;
  finish(s, ch, config);
  return s;
}

std::pair<FullSolution, AlgorithmTrace> run_algorithm(Algorithm a, const ChannelSet& ch,
                                                      const SystemConfig& config) {
  switch (a) {
    case Algorithm::Alternating: return run_alternating(ch, config);
    case Algorithm::PartialExhaustive: return run_partial_exhaustive(ch, config);
    case Algorithm::RandomPhase: {
      Rng rng(Rng::derive_seed(config.seed, kRandomPhaseStream));
      FullSolution s = random_phase_baseline(ch, config, rng);
      AlgorithmTrace t;
      t.beam_solves = s.solver_calls;
      t.outer_objective.push_back(s.power_watts);
      return {std::move(s), std::move(t)};
    }
    case Algorithm::Oma: {
      FullSolution s = oma_baseline(ch, config);
      AlgorithmTrace t;
      t.beam_solves = s.solver_calls;
      t.outer_objective.push_back(s.power_watts);
      return {std::move(s), std::move(t)};
    }
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace irsnoma

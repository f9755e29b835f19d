#include <cmath>

#include "irsnoma/errors.hpp"
#include "irsnoma/orchestration.hpp"

namespace irsnoma {

double sdr_cost(int n, double accuracy) {
  if (n < 1 || !(accuracy > 0.0 && accuracy < 1.0))
    throw DomainError("complexity model needs n >= 1 and accuracy in (0, 1)");
  return std::pow(static_cast<double>(n), 4.5) * std::log2(1.0 / accuracy);
}

ComplexityReport complexity_estimate(const SystemConfig& config, const AlgorithmTrace& trace,
                                     double solver_accuracy) {
  const int n1 = config.clusters * config.bs_antennas;
  const int n2 = config.clusters * config.irs_elements;
  ComplexityReport rep;
  auto add = [&](const char* stage, int n, int solves) {
    ComplexityRow row{stage, n, solves, solves * sdr_cost(n, solver_accuracy)};
    rep.total += row.cost;
    rep.rows.push_back(std::move(row));
  };
  add("initial point search", n1, trace.init_solves);
  add("beamforming", n1, trace.beam_solves);
  add("phase feasibility", n2, trace.phase_solves);
  return rep;
}

}  // namespace irsnoma

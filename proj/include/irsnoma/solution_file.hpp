#pragma once

#include <iosfwd>
#include <string>

#include "irsnoma/model.hpp"
#include "irsnoma/orchestration.hpp"

namespace irsnoma {

/// A solution together with the configuration that produced it. The channels
/// are not stored: they are regenerated from config.seed on replay.
struct StoredSolution {
  SystemConfig config;
  FullSolution solution;
};

/// Sectioned text: `[config]` holds write_config output, `[solution]` holds
/// the decision variables and counters. Numbers use %.17g and round-trip.
void write_solution(std::ostream& os, const SystemConfig& config, const FullSolution& s);
StoredSolution read_solution(std::istream& is, const std::string& source = "solution");

struct ReplayReport {
  double stored_power = 0.0;
  double replayed_power = 0.0;
  RateReport rates;
  bool identical = false;  // bit-for-bit equal power
};

/// Regenerates the channels and re-evaluates the stored decision variables.
ReplayReport replay(const StoredSolution& stored);

}  // namespace irsnoma

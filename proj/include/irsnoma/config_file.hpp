#pragma once

#include <iosfwd>
#include <string>

#include "irsnoma/model.hpp"

namespace irsnoma {

/// Flat `key = value` text, one pair per line, `#` starts a comment.
///
/// Required keys: K, M, N, Rc, Re. Optional: d0, d1, d2, a0, a1, a2, B,
/// N0_dBm, eps_init, eps_beam, eps_alt, rand_trials, alpha_grid, seed.
/// List values (Rc, Re, alpha_grid) are comma-separated; a single rate is
/// broadcast to every cluster. Errors are ConfigError naming the source line
/// or the missing key.
SystemConfig parse_config(std::istream& is, const std::string& source = "config");
SystemConfig load_config(const std::string& path);

/// Writes every key, so that parse_config reproduces `config` exactly.
void write_config(std::ostream& os, const SystemConfig& config);

}  // namespace irsnoma

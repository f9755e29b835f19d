#include "irsnoma/solution_file.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "irsnoma/config_file.hpp"
#include "irsnoma/errors.hpp"

namespace irsnoma {

namespace {

constexpr const char* kHeader = "irsnoma_solution 1";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cvec_text(const cvec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out += (i ? " " : "") + num(v(i).real()) + ' ' + num(v(i).imag());
  return out;
}

void write_vectors(std::ostream& os, const char* name, const std::vector<cvec>& vs) {
  for (std::size_t k = 0; k < vs.size(); ++k)
    os << name << ' ' << k << " = " << cvec_text(vs[k]) << '\n';
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

class Fields {
 public:
  explicit Fields(std::string source) : source_(std::move(source)) {}

  void add(const std::string& key, const std::string& value, int line) {
    if (values_.count(key)) fail(line, "duplicate entry '" + key + "'");
    values_[key] = {value, line};
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const std::string& text(const std::string& key) const { return get(key).first; }

  std::vector<double> numbers(const std::string& key) const {
    const auto& [value, line] = get(key);
    std::vector<double> out;
    std::istringstream is(value);
    std::string w;
    while (is >> w) {
      double v = 0.0;
      const auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
      if (ec != std::errc() || p != w.data() + w.size())
        fail(line, "malformed number '" + w + "' in '" + key + "'");
      out.push_back(v);
    }
    return out;
  }

  double number(const std::string& key) const {
    const auto v = numbers(key);
    if (v.size() != 1) fail(get(key).second, "expected one number for '" + key + "'");
    return v[0];
  }

  int integer(const std::string& key) const {
    const double v = number(key);
    if (v != static_cast<int>(v)) fail(get(key).second, "expected an integer for '" + key + "'");
    return static_cast<int>(v);
  }

  cvec vector(const std::string& key, Eigen::Index size) const {
    const auto v = numbers(key);
    if (static_cast<Eigen::Index>(v.size()) != 2 * size)
      fail(get(key).second, "'" + key + "' needs " + std::to_string(size) + " complex entries");
    cvec out(size);
    for (Eigen::Index i = 0; i < size; ++i)
      out(i) = {v[static_cast<std::size_t>(2 * i)], v[static_cast<std::size_t>(2 * i + 1)]};
    return out;
  }

  std::vector<cvec> vectors(const std::string& name, int count, Eigen::Index size) const {
    std::vector<cvec> out;
    for (int k = 0; k < count; ++k) out.push_back(vector(name + ' ' + std::to_string(k), size));
    return out;
  }

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw ConfigError(source_ + ", line " + std::to_string(line) + ": " + what);
  }

 private:
  const std::pair<std::string, int>& get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(source_ + ": missing entry '" + key + "'");
    return it->second;
  }

  std::string source_;
  std::map<std::string, std::pair<std::string, int>> values_;
};

}  // namespace

void write_solution(std::ostream& os, const SystemConfig& config, const FullSolution& s) {
  os << kHeader << "\n[config]\n";
  write_config(os, config);
  os << "[solution]\n";
  os << "algorithm = " << to_string(s.algorithm) << '\n';
  os << "alpha =";
  for (double a : s.alpha) os << ' ' << num(a);
  os << '\n';
  if (s.alpha_shared) os << "alpha_shared = " << num(*s.alpha_shared) << '\n';
  write_vectors(os, "w", s.w);
  write_vectors(os, "w_edge", s.w_edge);
  write_vectors(os, "e", s.e);
  os << "power_watts = " << num(s.power_watts) << '\n'
     << "outer_iters = " << s.outer_iters << '\n'
     << "init_iters = " << s.init_iters << '\n'
     << "beam_iters = " << s.beam_iters << '\n'
     << "solver_calls = " << s.solver_calls << '\n'
     << "degraded = " << (s.degraded ? 1 : 0) << '\n';
  if (s.degraded) os << "degraded_reason = " << s.degraded_reason << '\n';
  os << "end\n";
}

StoredSolution read_solution(std::istream& is, const std::string& source) {
  std::string line;
  int lineno = 0;
  enum { Header, Config, Solution, End } state = Header;
  std::stringstream config_text;
  int config_first_line = 0;
  Fields fields(source);
  auto where = [&] { return source + ", line " + std::to_string(lineno); };
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') {
      if (state == Config) config_text << '\n';
      continue;
    }
    switch (state) {
      case Header:
        if (t != kHeader) throw ConfigError(where() + ": expected '" + kHeader + "'");
        state = Config;
        if (!std::getline(is, line) || trim(line) != "[config]")
          throw ConfigError(source + ", line " + std::to_string(lineno + 1) +
                            ": expected '[config]'");
        ++lineno;
        config_first_line = lineno + 1;
        break;
      case Config:
        if (t == "[solution]") {
          state = Solution;
        } else {
          config_text << line << '\n';
        }
        break;
      case Solution: {
        if (t == "end") {
          state = End;
          break;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where() + ": expected 'key = value'");
        fields.add(trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno);
        break;
      }
      case End:
        throw ConfigError(where() + ": content after 'end'");
    }
  }
  if (state != End) throw ConfigError(source + ": truncated solution file (missing 'end')");

  StoredSolution out;
  // line numbers in config errors are relative to the embedded block
  out.config = parse_config(config_text,
                            source + " [config block starting at line " +
                                std::to_string(config_first_line) + "]");
  const SystemConfig& c = out.config;
  FullSolution& s = out.solution;
  try {
    s.algorithm = parse_algorithm(fields.text("algorithm"));
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  s.alpha = fields.numbers("alpha");
  if (!s.alpha.empty() && static_cast<int>(s.alpha.size()) != c.clusters)
    throw ConfigError(source + ": 'alpha' needs one entry per cluster or none");
  if (fields.has("alpha_shared")) s.alpha_shared = fields.number("alpha_shared");
  s.w = fields.vectors("w", c.clusters, c.bs_antennas);
  if (s.algorithm == Algorithm::Oma) s.w_edge = fields.vectors("w_edge", c.clusters, c.bs_antennas);
  s.e = fields.vectors("e", c.clusters, c.irs_elements);
  s.power_watts = fields.number("power_watts");
  s.outer_iters = fields.integer("outer_iters");
  s.init_iters = fields.integer("init_iters");
  s.beam_iters = fields.integer("beam_iters");
  s.solver_calls = fields.integer("solver_calls");
  s.degraded = fields.integer("degraded") != 0;
  if (fields.has("degraded_reason")) s.degraded_reason = fields.text("degraded_reason");
  return out;
}

ReplayReport replay(const StoredSolution& stored) {
  const ChannelSet ch = generate_channels(stored.config, stored.config.seed);
  ReplayReport r;
  r.stored_power = stored.solution.power_watts;
  r.replayed_power = full_solution_power(stored.solution);
  r.rates = evaluate_full_solution(ch, stored.config, stored.solution);
  r.identical = r.replayed_power == r.stored_power;
  return r;
}

}  // namespace irsnoma

#include "irsnoma/config_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "irsnoma/errors.hpp"

namespace irsnoma {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Parser {
 public:
  Parser(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError(source_ + ": missing required key '" + key + "'");
  }

  double real(const std::string& key) const { return parse_real(at(key).value, key); }

  int integer(const std::string& key) const {
    const Entry& e = at(key);
    int v = 0;
    const std::string s = e.value;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(key, "expected an integer");
    return v;
  }

  std::uint64_t unsigned64(const std::string& key) const {
    const std::string s = at(key).value;
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(key, "expected a non-negative integer");
    return v;
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(at(key).value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(trim(item), key));
    if (out.empty()) fail(key, "expected a comma-separated list");
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(source_ + ", line " + std::to_string(at(key).line) + ": key '" + key +
                      "': " + what);
  }

 private:
  const Entry& at(const std::string& key) const { return entries_.at(key); }

  double parse_real(const std::string& s, const std::string& key) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
      fail(key, "malformed number '" + s + "'");
    return v;
  }

  std::map<std::string, Entry> entries_;
  std::string source_;
};

const std::set<std::string> kKnownKeys{
    "K",  "M",  "N",  "Rc", "Re", "d0",     "d1",       "d2",       "a0",      "a1",
    "a2", "B",  "N0_dBm", "eps_init", "eps_beam", "eps_alt", "rand_trials", "alpha_grid", "seed"};

}  // namespace

SystemConfig parse_config(std::istream& is, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ", line " + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKnownKeys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");
    if (entries.count(key))
      throw ConfigError(where + ": duplicate key '" + key + "' (first on line " +
                        std::to_string(entries[key].line) + ")");
    entries[key] = {value, lineno};
  }

  const Parser p(std::move(entries), source);
  for (const char* key : {"K", "M", "N", "Rc", "Re"}) p.require(key);
  SystemConfig c;
  c.clusters = p.integer("K");
  c.bs_antennas = p.integer("M");
  c.irs_elements = p.integer("N");
  c.rate_center = p.reals("Rc");
  c.rate_edge = p.reals("Re");
  if (p.has("d0")) c.dist_irs_edge = p.real("d0");
  if (p.has("d1")) c.dist_bs_irs = p.real("d1");
  if (p.has("d2")) c.dist_bs_center = p.real("d2");
  if (p.has("a0")) c.exp_irs_edge = p.real("a0");
  if (p.has("a1")) c.exp_bs_irs = p.real("a1");
  if (p.has("a2")) c.exp_bs_center = p.real("a2");
  if (p.has("B")) c.bandwidth_hz = p.real("B");
  if (p.has("N0_dBm")) c.noise_dbm_per_hz = p.real("N0_dBm");
  if (p.has("eps_init")) c.eps_init = p.real("eps_init");
  if (p.has("eps_beam")) c.eps_beam = p.real("eps_beam");
  if (p.has("eps_alt")) c.eps_alt = p.real("eps_alt");
  if (p.has("rand_trials")) c.rand_trials = p.integer("rand_trials");
  if (p.has("alpha_grid")) c.alpha_grid = p.reals("alpha_grid");
  if (p.has("seed")) c.seed = p.unsigned64("seed");
  if (c.clusters >= 1) {
    if (c.rate_center.size() != 1 && static_cast<int>(c.rate_center.size()) != c.clusters)
      p.fail("Rc", "expected 1 or K entries");
    if (c.rate_edge.size() != 1 && static_cast<int>(c.rate_edge.size()) != c.clusters)
      p.fail("Re", "expected 1 or K entries");
  }
  c = c.normalized();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

void write_config(std::ostream& os, const SystemConfig& c) {
  os << "K = " << c.clusters << '\n'
     << "M = " << c.bs_antennas << '\n'
     << "N = " << c.irs_elements << '\n'
     << "Rc = " << list(c.rate_center) << '\n'
     << "Re = " << list(c.rate_edge) << '\n'
     << "d0 = " << num(c.dist_irs_edge) << '\n'
     << "d1 = " << num(c.dist_bs_irs) << '\n'
     << "d2 = " << num(c.dist_bs_center) << '\n'
     << "a0 = " << num(c.exp_irs_edge) << '\n'
     << "a1 = " << num(c.exp_bs_irs) << '\n'
     << "a2 = " << num(c.exp_bs_center) << '\n'
     << "B = " << num(c.bandwidth_hz) << '\n'
     << "N0_dBm = " << num(c.noise_dbm_per_hz) << '\n'
     << "eps_init = " << num(c.eps_init) << '\n'
     << "eps_beam = " << num(c.eps_beam) << '\n'
     << "eps_alt = " << num(c.eps_alt) << '\n'
     << "rand_trials = " << c.rand_trials << '\n'
     << "alpha_grid = " << list(c.alpha_grid) << '\n'
     << "seed = " << c.seed << '\n';
}

}  // namespace irsnoma

#include "oslab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace oslab {

namespace {

struct Value {
  std::string text;
  int line = 0;
  int column = 0;
};

[[noreturn]] void fail(const Value& v, const std::string& what) { throw ConfigError(v.line, v.column, what); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Trims `s` in place, returning the number of leading characters removed.
std::size_t trim(std::string& s) {
  std::size_t lo = 0;
  while (lo < s.size() && is_space(s[lo])) ++lo;
  std::size_t hi = s.size();
  while (hi > lo && is_space(s[hi - 1])) --hi;
  s = s.substr(lo, hi - lo);
  return lo;
}

double parse_real(const Value& v) {
  double out = 0.0;
  const char* end = v.text.data() + v.text.size();
  auto [ptr, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) fail(v, "expected a real number, got '" + v.text + "'");
  return out;
}

long long parse_integer(const Value& v) {
  long long out = 0;
  const char* end = v.text.data() + v.text.size();
  auto [ptr, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || ptr != end) fail(v, "expected an integer, got '" + v.text + "'");
  return out;
}

int parse_int(const Value& v) {
  const long long x = parse_integer(v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(v, "integer out of range");
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const Value& v) {
  std::uint64_t out = 0;
  const char* end = v.text.data() + v.text.size();
  auto [ptr, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || ptr != end) fail(v, "expected an unsigned 64-bit integer, got '" + v.text + "'");
  return out;
}

// Rows separated by ';', entries by blanks or commas.
Matrix parse_matrix(const Value& v) {
  std::vector<std::vector<double>> rows;
  std::size_t start = 0;
  while (start <= v.text.size()) {
    std::size_t stop = v.text.find(';', start);
    if (stop == std::string::npos) stop = v.text.size();
    std::vector<double> row;
    std::size_t i = start;
    while (i < stop) {
      while (i < stop && (is_space(v.text[i]) || v.text[i] == ',')) ++i;
      std::size_t j = i;
      while (j < stop && !is_space(v.text[j]) && v.text[j] != ',') ++j;
      if (j > i) row.push_back(parse_real({v.text.substr(i, j - i), v.line, v.column + static_cast<int>(i)}));
      i = j;
    }
    if (row.empty()) fail({v.text, v.line, v.column + static_cast<int>(start)}, "empty matrix row");
    rows.push_back(std::move(row));
    start = stop + 1;
  }
  const std::size_t n = rows.size();
  for (const auto& r : rows) {
    if (r.size() != n) fail(v, "matrix must be square");
  }
  if (n > static_cast<std::size_t>(kMaxAmbientDim)) fail(v, "matrix dimension exceeds " + std::to_string(kMaxAmbientDim));
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

using Setter = std::function<void(RunConfig&, const Value&)>;
using Table = std::map<std::string, std::map<std::string, Setter>>;

const Table& table() {
  static const Table t = [] {
    Table t;
    auto& sys = t["system"];
    sys["kind"] = [](RunConfig& c, const Value& v) {
      try {
        c.system.kind = system_kind_from_string(v.text);
      } catch (const Error& e) {
        fail(v, e.what());
      }
    };
    sys["matrix"] = [](RunConfig& c, const Value& v) { c.system.matrix = parse_matrix(v); };
    sys["delta"] = [](RunConfig& c, const Value& v) { c.system.delta = parse_real(v); };
    sys["a"] = [](RunConfig& c, const Value& v) { c.system.henon_a = parse_real(v); };
    sys["b"] = [](RunConfig& c, const Value& v) { c.system.henon_b = parse_real(v); };

    auto& hz = t["horizons"];
    hz["orbit"] = [](RunConfig& c, const Value& v) { c.verify.orbit_horizon = parse_int(v); };
    hz["splitting"] = [](RunConfig& c, const Value& v) { c.verify.splitting_horizon = parse_int(v); };
    hz["stats"] = [](RunConfig& c, const Value& v) { c.verify.stats_horizon = parse_int(v); };
    hz["renorm_period"] = [](RunConfig& c, const Value& v) { c.renorm_period = parse_int(v); };

    auto& ver = t["verify"];
    ver["epsilon"] = [](RunConfig& c, const Value& v) { c.verify.epsilon = parse_real(v); };
    ver["eta"] = [](RunConfig& c, const Value& v) { c.verify.eta = parse_real(v); };
    ver["samples"] = [](RunConfig& c, const Value& v) { c.verify.samples = parse_int(v); };
    ver["block_gap"] = [](RunConfig& c, const Value& v) { c.verify.block_gap = parse_real(v); };

    auto& pe = t["pesin"];
    pe["alpha"] = [](RunConfig& c, const Value& v) { c.verify.pesin.alpha = parse_real(v); };
    pe["beta"] = [](RunConfig& c, const Value& v) { c.verify.pesin.beta = parse_real(v); };
    pe["epsilon"] = [](RunConfig& c, const Value& v) { c.verify.pesin.epsilon = parse_real(v); };
    pe["k"] = [](RunConfig& c, const Value& v) { c.verify.pesin.k = parse_int(v); };
    pe["m_range"] = [](RunConfig& c, const Value& v) { c.verify.pesin.m_range = parse_int(v); };
    pe["n_range"] = [](RunConfig& c, const Value& v) { c.verify.pesin.n_range = parse_int(v); };

    auto& se = t["search"];
    se["max_period"] = [](RunConfig& c, const Value& v) { c.verify.search.max_period = parse_int(v); };
    se["seed_orbit_length"] = [](RunConfig& c, const Value& v) { c.verify.search.seed_orbit_length = parse_int(v); };
    se["return_radius"] = [](RunConfig& c, const Value& v) { c.verify.search.return_radius = parse_real(v); };
    se["newton_max_iters"] = [](RunConfig& c, const Value& v) { c.verify.search.newton_max_iters = parse_int(v); };
    se["newton_tol"] = [](RunConfig& c, const Value& v) { c.verify.search.newton_tol = parse_real(v); };
    se["dedup_tol"] = [](RunConfig& c, const Value& v) { c.verify.search.dedup_tol = parse_real(v); };

    auto& run = t["run"];
    run["seed"] = [](RunConfig& c, const Value& v) { c.verify.seed = parse_u64(v); };
    run["threads"] = [](RunConfig& c, const Value& v) { c.verify.threads = parse_int(v); };

    auto& out = t["output"];
    out["path"] = [](RunConfig& c, const Value& v) { c.output_path = v.text; };
    out["format"] = [](RunConfig& c, const Value& v) {
      if (v.text == "json") {
        c.format = OutputFormat::json;
      } else if (v.text == "csv") {
        c.format = OutputFormat::csv;
      } else {
        fail(v, "format must be json or csv");
      }
    };
    return t;
  }();
  return t;
}

}  // namespace

ConfigError::ConfigError(int line, int column, const std::string& message)
    : InputError("config:" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::set<std::string> seen_blocks;
  std::set<std::string> seen_keys;
  std::string block;
  Value system_block{"", 0, 0};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const int lead = static_cast<int>(trim(line));
    if (line.empty()) continue;
    const int col = lead + 1;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, col, "unterminated block header");
      std::string name = line.substr(1, line.size() - 2);
      trim(name);
      if (table().count(name) == 0) throw ConfigError(line_no, col + 1, "unknown block '" + name + "'");
      if (!seen_blocks.insert(name).second) throw ConfigError(line_no, col + 1, "duplicate block '" + name + "'");
      block = name;
      if (name == "system") system_block = {name, line_no, col};
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, col, "expected 'key = value'");
    if (block.empty()) throw ConfigError(line_no, col, "key outside of any block");
    std::string key = line.substr(0, eq);
    trim(key);
    std::string value = line.substr(eq + 1);
    const int value_col = col + static_cast<int>(eq) + 1 + static_cast<int>(trim(value));
    const auto& keys = table().at(block);
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(line_no, col, "unknown key '" + key + "' in block [" + block + "]");
    if (!seen_keys.insert(block + "." + key).second) throw ConfigError(line_no, col, "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(line_no, value_col, "missing value for '" + key + "'");
    it->second(cfg, Value{value, line_no, value_col});
  }
  if (seen_blocks.count("system") == 0) throw ConfigError(line_no + 1, 1, "missing [system] block");

  const bool toral = cfg.system.kind == SystemKind::toral_automorphism || cfg.system.kind == SystemKind::perturbed_toral;
  const bool needs_matrix = toral || cfg.system.kind == SystemKind::linear;
  if (needs_matrix && seen_keys.count("system.matrix") == 0) {
    throw ConfigError(system_block.line, system_block.column, "[system] needs a matrix for this kind");
  }
  if (cfg.system.kind == SystemKind::henon && seen_keys.count("system.matrix") != 0) {
    throw ConfigError(system_block.line, system_block.column, "[system] henon takes a and b, not a matrix");
  }
  if (cfg.renorm_period < 1) throw ConfigError(line_no, 1, "renorm_period must be >= 1");
  try {
    cfg.verify.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(line_no, 1, e.what());
  }
  return cfg;
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace oslab

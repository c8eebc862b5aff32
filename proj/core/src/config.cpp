#include "mgt/config.hpp"

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mgt/csv.hpp"
#include "mgt/errors.hpp"

namespace mgt {

using nlohmann::json;

namespace {

struct RawValue {
  enum class Kind { String, Boolean, Number, NumberList };
  Kind kind = Kind::String;
  std::string text;
  bool flag = false;
  double number = 0.0;
  std::vector<double> list;
  std::string where;  // "file:line" or "file: table.key" for diagnostics
};

using RawMap = std::map<std::string, RawValue>;

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError(where + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Cuts an unquoted # and everything after it.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

double parse_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t.empty()) fail(where, "expected a number");
  double v = 0.0;
  const char* last = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), last, v);
  if (ec != std::errc() || ptr != last) fail(where, "not a number: '" + t + "'");
  return v;
}

RawValue parse_value(const std::string& text, const std::string& where) {
  RawValue v;
  v.where = where;
  const std::string t = trim(text);
  if (t.empty()) fail(where, "missing value after '='");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') fail(where, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i] == '\\' && i + 2 < t.size() && (t[i + 1] == '"' || t[i + 1] == '\\')) {
        out.push_back(t[i + 1]);
        ++i;
      } else if (t[i] == '"') {
        fail(where, "stray quote inside string");
      } else {
        out.push_back(t[i]);
      }
    }
    v.kind = RawValue::Kind::String;
    v.text = std::move(out);
    return v;
  }
  if (t == "true" || t == "false") {
    v.kind = RawValue::Kind::Boolean;
    v.flag = t == "true";
    return v;
  }
  if (t.front() == '[') {
    if (t.back() != ']') fail(where, "unterminated array");
    v.kind = RawValue::Kind::NumberList;
    const std::string body = trim(t.substr(1, t.size() - 2));
    if (body.empty()) return v;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) v.list.push_back(parse_number(item, where));
    if (!body.empty() && body.back() == ',') fail(where, "trailing comma in array");
    return v;
  }
  v.kind = RawValue::Kind::Number;
  v.number = parse_number(t, where);
  return v;
}

RawMap parse_toml(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  RawMap out;
  std::string line, table;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(where, "unterminated table header");
      table = trim(s.substr(1, s.size() - 2));
      if (!valid_key(table)) fail(where, "bad table name '" + table + "'");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(where, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (!valid_key(key)) fail(where, "bad key '" + key + "'");
    const std::string full = table.empty() ? key : table + "." + key;
    if (out.count(full)) fail(where, "duplicate key '" + full + "'");
    out[full] = parse_value(s.substr(eq + 1), where);
  }
  return out;
}

void flatten_json(const json& j, const std::string& prefix, const std::string& path,
                  RawMap& out) {
  for (const auto& [key, val] : j.items()) {
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    const std::string where = path + ": " + full;
    if (val.is_object()) {
      if (!prefix.empty()) fail(where, "tables nest only one level");
      flatten_json(val, key, path, out);
      continue;
    }
    RawValue v;
    v.where = where;
    if (val.is_string()) {
      v.kind = RawValue::Kind::String;
      v.text = val.get<std::string>();
    } else if (val.is_boolean()) {
      v.kind = RawValue::Kind::Boolean;
      v.flag = val.get<bool>();
    } else if (val.is_number()) {
      v.kind = RawValue::Kind::Number;
      v.number = val.get<double>();
    } else if (val.is_array()) {
      v.kind = RawValue::Kind::NumberList;
      for (const auto& item : val) {
        if (!item.is_number()) fail(where, "array elements must be numbers");
        v.list.push_back(item.get<double>());
      }
    } else {
      fail(where, "unsupported value type");
    }
    out[full] = std::move(v);
  }
}

RawMap parse_json_mirror(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": top level must be an object");
  RawMap out;
  flatten_json(j, "", path, out);
  return out;
}

class Binder {
public:
  explicit Binder(RawMap values) : values_(std::move(values)) {}

  void string_field(const std::string& key, std::string& slot) {
    if (const RawValue* v = take(key)) {
      if (v->kind != RawValue::Kind::String) fail(v->where, key + " must be a string");
      slot = v->text;
    }
  }

  void int_field(const std::string& key, int& slot) {
    if (const RawValue* v = take(key)) {
      if (v->kind != RawValue::Kind::Number) fail(v->where, key + " must be a number");
      const int i = static_cast<int>(v->number);
      if (static_cast<double>(i) != v->number) fail(v->where, key + " must be an integer");
      slot = i;
    }
  }

  void double_field(const std::string& key, double& slot) {
    if (const RawValue* v = take(key)) {
      if (v->kind != RawValue::Kind::Number) fail(v->where, key + " must be a number");
      slot = v->number;
    }
  }

  void list_field(const std::string& key, std::vector<double>& slot) {
    if (const RawValue* v = take(key)) {
      if (v->kind != RawValue::Kind::NumberList) {
        fail(v->where, key + " must be an array of numbers");
      }
      slot = v->list;
    }
  }

  const RawValue* find(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  void reject_unknown() const {
    for (const auto& [key, v] : values_) {
      if (!seen_.count(key)) fail(v.where, "unknown key '" + key + "'");
    }
  }

private:
  const RawValue* take(const std::string& key) {
    seen_.insert(key);
    return find(key);
  }

  RawMap values_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& source, const std::string& msg) {
  if (!ok) throw ConfigError(source + ": " + msg);
}

void validate(const ExperimentConfig& c) {
  const std::string s = c.source.empty() ? "config" : c.source;
  require(c.seed >= 0, s, "seed must be nonnegative");
  require(c.stride >= 1, s, "density.stride must be >= 1");
  require(c.ladder_count >= 1, s, "density.count must be >= 1");
  require(c.ladder_factor > 0.0 && c.ladder_factor < 1.0, s,
          "density.factor must lie in (0, 1)");
  for (double r : c.radii_h) require(r > 0.0, s, "density.radii_h entries must be positive");
  require(c.shape == "ball" || c.shape == "cube", s, "density.shape must be ball or cube");
  require(c.n >= 1, s, "partition.n must be >= 1");
  require(c.m >= 0, s, "partition.m must be >= 0");
  require(c.depth >= 0, s, "partition.depth must be >= 0");
  require(c.rank_tol > 0.0, s, "chart.rank_tol must be positive");
  require(c.match_tol > 0.0, s, "chart.match_tol must be positive");
  require(c.gap_tol > 0.0, s, "suite.gap_tol must be positive");
  require(c.pass_fraction > 0.0 && c.pass_fraction <= 1.0, s,
          "suite.pass_fraction must lie in (0, 1]");
  require(c.slack_factor >= 1.0, s, "suite.slack_factor must be >= 1");
  require(!c.map.empty(), s, "map must not be empty");
  // a manifest reference has to exist now, not when a verb first touches it
  if (c.map.find('/') != std::string::npos || c.map.ends_with(".json")) {
    require(std::filesystem::exists(c.map), s, "map manifest not found: " + c.map);
  }
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig load_config(const std::string& path) {
  RawMap raw =
      path.ends_with(".json") ? parse_json_mirror(path) : parse_toml(path);
  Binder bind(std::move(raw));
  ExperimentConfig c;
  c.source = path;
  bind.string_field("map", c.map);
  bind.string_field("out", c.out_dir);
  bind.int_field("seed", c.seed);
  bind.int_field("threads", c.threads);
  bind.int_field("density.stride", c.stride);
  bind.int_field("density.count", c.ladder_count);
  bind.double_field("density.factor", c.ladder_factor);
  bind.double_field("density.top", c.ladder_top);
  bind.list_field("density.radii_h", c.radii_h);
  bind.string_field("density.shape", c.shape);
  bind.int_field("partition.n", c.n);
  bind.int_field("partition.m", c.m);
  bind.int_field("partition.depth", c.depth);
  bind.double_field("chart.tau_k", c.tau_k);
  bind.double_field("chart.rank_tol", c.rank_tol);
  bind.double_field("chart.match_tol", c.match_tol);
  bind.double_field("suite.gap_tol", c.gap_tol);
  bind.double_field("suite.pass_fraction", c.pass_fraction);
  bind.double_field("suite.slack_factor", c.slack_factor);
  bind.reject_unknown();
  validate(c);
  return c;
}

std::string config_toml(const ExperimentConfig& c) {
  std::ostringstream out;
  auto list = [](const std::vector<double>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ", ";
      s += format_double(xs[i]);
    }
    return s + "]";
  };
  out << "map = \"" << c.map << "\"\n";
  out << "out = \"" << c.out_dir << "\"\n";
  out << "seed = " << c.seed << "\n";
  out << "threads = " << c.threads << "\n";
  out << "\n[density]\n";
  out << "stride = " << c.stride << "\n";
  out << "count = " << c.ladder_count << "\n";
  out << "factor = " << format_double(c.ladder_factor) << "\n";
  out << "top = " << format_double(c.ladder_top) << "\n";
  out << "radii_h = " << list(c.radii_h) << "\n";
  out << "shape = \"" << c.shape << "\"\n";
  out << "\n[partition]\n";
  out << "n = " << c.n << "\n";
  out << "m = " << c.m << "\n";
  out << "depth = " << c.depth << "\n";
  out << "\n[chart]\n";
  out << "tau_k = " << format_double(c.tau_k) << "\n";
  out << "rank_tol = " << format_double(c.rank_tol) << "\n";
  out << "match_tol = " << format_double(c.match_tol) << "\n";
  out << "\n[suite]\n";
  out << "gap_tol = " << format_double(c.gap_tol) << "\n";
  out << "pass_fraction = " << format_double(c.pass_fraction) << "\n";
  out << "slack_factor = " << format_double(c.slack_factor) << "\n";
  return out.str();
}

std::string config_json(const ExperimentConfig& c) {
  json j;
  j["map"] = c.map;
  j["out"] = c.out_dir;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["density"] = {{"stride", c.stride},     {"count", c.ladder_count},
                  {"factor", c.ladder_factor}, {"top", c.ladder_top},
                  {"radii_h", c.radii_h},   {"shape", c.shape}};
  j["partition"] = {{"n", c.n}, {"m", c.m}, {"depth", c.depth}};
  j["chart"] = {{"tau_k", c.tau_k}, {"rank_tol", c.rank_tol}, {"match_tol", c.match_tol}};
  j["suite"] = {{"gap_tol", c.gap_tol},
                {"pass_fraction", c.pass_fraction},
                {"slack_factor", c.slack_factor}};
  return j.dump(2) + "\n";
}

}  // namespace mgt

#include "cli/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace stf::cli {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "schema", "group", "action", "f_e", "alpha", "delta", "eps", "K", "L", "averaging", "n", "base", "interval", "k",
      "radius_max", "m", "r", "depth", "series_terms", "replicates", "samples", "index_set", "theta", "A", "B", "g_tuple",
      "actions", "cap", "seed", "out", "workers"};
  return keys;
}

Rational rational_of(const json& v, const std::string& key) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number()) return rational_from_double(v.get<double>());
  } catch (const UsageError& e) {
    throw UsageError("config key '" + key + "': " + e.what());
  }
  throw UsageError("config key '" + key + "' must be a number or a rational string");
}

long long int_of(const json& v, const std::string& key, long long lo, long long hi = std::numeric_limits<long long>::max()) {
  if (!v.is_number_integer()) throw UsageError("config key '" + key + "' must be an integer");
  long long x = v.get<long long>();
  if (x < lo || x > hi) throw UsageError("config key '" + key + "' is out of range");
  return x;
}

std::string string_of(const json& v, const std::string& key) {
  if (!v.is_string()) throw UsageError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> strings_of(const json& v, const std::string& key) {
  if (!v.is_array()) throw UsageError("config key '" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(string_of(x, key));
  return out;
}

std::vector<int> ints_of(const json& v, const std::string& key, int lo) {
  if (!v.is_array() || v.empty()) throw UsageError("config key '" + key + "' must be a non-empty array of integers");
  std::vector<int> out;
  for (const auto& x : v) out.push_back(static_cast<int>(int_of(x, key, lo, 1'000'000)));
  return out;
}

Interval interval_of(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) throw UsageError("config key '" + key + "' must be [lo, hi] with null for an infinite end");
  Interval out;
  if (!v[0].is_null()) out.lo = to_double(rational_of(v[0], key));
  if (!v[1].is_null()) out.hi = to_double(rational_of(v[1], key));
  if (!(out.lo < out.hi)) throw UsageError("config key '" + key + "' needs lo < hi");
  return out;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw UsageError("");
    unsigned long long v = std::stoull(text, &used, 0);
    if (used != text.size()) throw UsageError("");
    return v;
  } catch (const std::exception&) {
    throw UsageError(what + " must be an unsigned 64-bit integer, got '" + text + "'");
  }
}

int parse_workers(const std::string& text) {
  std::uint64_t v = parse_u64(text, "workers");
  if (v < 1 || v > 1024) throw UsageError("workers must lie in 1..1024");
  return static_cast<int>(v);
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

GroupSpec group_of(const json& v) {
  if (v.is_string()) return parse_group(v.get<std::string>());
  if (!v.is_object() || !v.contains("kind")) throw UsageError("config key 'group' must be a string or {\"kind\": ...}");
  for (const auto& [key, x] : v.items())
    if (key != "kind" && key != "k" && key != "d") throw UsageError("unknown group key '" + key + "'");
  std::string kind = string_of(v["kind"], "group.kind");
  if (kind == "free") return GroupSpec::free(static_cast<int>(int_of(v.value("k", json(2)), "group.k", 2, 64)));
  if (kind == "lattice") return GroupSpec::lattice(static_cast<int>(int_of(v.value("d", json(1)), "group.d", 1, 8)));
  if (kind == "heisenberg") return GroupSpec::heisenberg();
  if (kind == "lamplighter") return GroupSpec::lamplighter();
  throw UsageError("unknown group kind '" + kind + "'");
}

}  // namespace

GroupSpec parse_group(const std::string& text) {
  auto number_after = [&](std::size_t pos) {
    try {
      std::size_t used = 0;
      int v = std::stoi(text.substr(pos), &used);
      if (used != text.size() - pos) throw UsageError("");
      return v;
    } catch (const std::exception&) {
      throw UsageError("malformed group '" + text + "'");
    }
  };
  if (text.rfind("Z^", 0) == 0) return GroupSpec::lattice(number_after(2));
  if (text == "Z") return GroupSpec::lattice(1);
  if (text.rfind("F_", 0) == 0) return GroupSpec::free(number_after(2));
  if (text == "Heisenberg" || text == "heisenberg") return GroupSpec::heisenberg();
  if (text == "Lamplighter" || text == "lamplighter") return GroupSpec::lamplighter();
  throw UsageError("unknown group '" + text + "' (expected Z^d, F_k, Heisenberg or Lamplighter)");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, v] : doc.items())
    if (!known_keys().count(key)) throw UsageError("unknown config key '" + key + "'");
  if (!doc.contains("schema")) throw UsageError("config is missing the 'schema' field");
  if (string_of(doc["schema"], "schema") != kSchema) throw UsageError(std::string("unsupported config schema (expected ") + kSchema + ")");

  ExperimentConfig c;
  c.raw = doc;
  auto has = [&](const char* k) { return doc.contains(k); };
  if (has("group")) c.group = group_of(doc["group"]);
  if (has("action")) c.action = string_of(doc["action"], "action");
  if (has("f_e")) {
    // Either {"cell": value, ...} or [{"region": cell or [cells], "value": v}, ...].
    const auto& f = doc["f_e"];
    if (f.is_object() && !f.empty()) {
      for (const auto& [cell, v] : f.items()) c.f_e.emplace_back(cell, format_rational(rational_of(v, "f_e")));
    } else if (f.is_array() && !f.empty()) {
      for (const auto& rec : f) {
        if (!rec.is_object() || !rec.contains("region") || !rec.contains("value") || rec.size() != 2)
          throw UsageError("f_e records must be {\"region\": ..., \"value\": ...}");
        std::string v = format_rational(rational_of(rec["value"], "f_e"));
        const auto& region = rec["region"];
        if (region.is_string())
          c.f_e.emplace_back(region.get<std::string>(), v);
        else
          for (const auto& cell : strings_of(region, "f_e region")) c.f_e.emplace_back(cell, v);
      }
    } else {
      throw UsageError("config key 'f_e' must be a non-empty object or list of records");
    }
  }
  if (has("alpha")) c.alpha = rational_of(doc["alpha"], "alpha");
  if (c.alpha <= 0 || c.alpha > 2) throw UsageError("alpha must lie in (0, 2]");
  if (has("delta")) c.delta = rational_of(doc["delta"], "delta");
  if (has("eps")) c.eps = rational_of(doc["eps"], "eps");
  if (has("K")) c.K = rational_of(doc["K"], "K");
  if (has("L")) {
    if (!doc["L"].is_array() || doc["L"].empty()) throw UsageError("config key 'L' must be a non-empty array");
    c.L.clear();
    for (const auto& x : doc["L"]) c.L.push_back(rational_of(x, "L"));
  }
  if (has("averaging")) {
    std::string a = string_of(doc["averaging"], "averaging");
    if (a == "folner")
      c.averaging = Averaging::Folner;
    else if (a == "ball")
      c.averaging = Averaging::Ball;
    else
      throw UsageError("averaging must be 'folner' or 'ball'");
  }
  if (has("n")) c.n = ints_of(doc["n"], "n", 0);
  if (has("base")) c.base = strings_of(doc["base"], "base");
  if (has("interval")) {
    const auto& v = doc["interval"];
    if (!v.is_array() || v.size() != 2 || v[0].is_null()) throw UsageError("config key 'interval' must be [lo, hi] with hi possibly null");
    c.lo = rational_of(v[0], "interval");
    c.hi = v[1].is_null() ? std::nullopt : std::optional<Rational>(rational_of(v[1], "interval"));
    if (c.lo <= 0 || (c.hi && *c.hi <= c.lo)) throw UsageError("interval must satisfy 0 < lo < hi");
  }
  if (has("k")) c.k = static_cast<int>(int_of(doc["k"], "k", 2, 64));
  if (has("radius_max")) c.radius_max = static_cast<int>(int_of(doc["radius_max"], "radius_max", 0, 64));
  if (has("m")) c.m = ints_of(doc["m"], "m", 0);
  if (has("r")) c.r = static_cast<int>(int_of(doc["r"], "r", 0, 32));
  if (has("depth")) c.depth = static_cast<int>(int_of(doc["depth"], "depth", 1, 32));
  if (has("series_terms")) c.series_terms = static_cast<std::size_t>(int_of(doc["series_terms"], "series_terms", 100, 100'000'000));
  if (has("replicates")) c.replicates = static_cast<std::size_t>(int_of(doc["replicates"], "replicates", 1, 100'000'000));
  if (has("samples")) c.samples = static_cast<std::size_t>(int_of(doc["samples"], "samples", 1, 1'000'000'000));
  if (has("index_set")) c.index_set = strings_of(doc["index_set"], "index_set");
  if (has("theta")) {
    if (!doc["theta"].is_array() || doc["theta"].empty()) throw UsageError("config key 'theta' must be a non-empty array");
    c.theta.clear();
    for (const auto& x : doc["theta"]) c.theta.push_back(to_double(rational_of(x, "theta")));
  }
  if (has("A")) c.A = interval_of(doc["A"], "A");
  if (has("B")) c.B = interval_of(doc["B"], "B");
  if (has("g_tuple")) c.g_tuple = strings_of(doc["g_tuple"], "g_tuple");
  if (has("actions")) c.actions = strings_of(doc["actions"], "actions");
  if (has("cap")) c.cap = static_cast<std::size_t>(int_of(doc["cap"], "cap", 1));
  if (has("seed")) {
    const auto& s = doc["seed"];
    if (s.is_number_unsigned())
      c.seed = s.get<std::uint64_t>();
    else if (s.is_string())
      c.seed = parse_u64(s.get<std::string>(), "seed");
    else
      throw UsageError("config key 'seed' must be an unsigned integer");
  }
  if (has("out")) c.out = string_of(doc["out"], "out");
  if (has("workers")) c.workers = static_cast<int>(int_of(doc["workers"], "workers", 1, 1024));
  return c;
}

ExperimentConfig load_config(const Overrides& flags) {
  std::optional<std::string> path = flags.config_path ? flags.config_path : env("STF_CONFIG");
  json doc = json{{"schema", kSchema}};
  if (path) {
    std::ifstream in(*path);
    if (!in) throw UsageError("cannot read config file '" + *path + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError("config file '" + *path + "' is not valid JSON: " + e.what());
    }
  }
  ExperimentConfig c = parse_config(doc);
  if (auto v = env("STF_OUT")) c.out = *v;
  if (auto v = env("STF_SEED")) c.seed = parse_u64(*v, "STF_SEED");
  if (auto v = env("STF_WORKERS")) c.workers = parse_workers(*v);
  if (auto v = env("STF_STRICT")) c.strict = (*v != "0");
  if (flags.out) c.out = *flags.out;
  if (flags.seed) c.seed = flags.seed;
  if (flags.workers) c.workers = *flags.workers;
  if (flags.strict) c.strict = true;
  if (c.workers < 1) throw UsageError("workers must be >= 1");
  return c;
}

json canonical(const ExperimentConfig& cfg) {
  json j = cfg.raw;
  j.erase("out");
  j.erase("workers");
  if (cfg.seed)
    j["seed"] = *cfg.seed;
  else
    j.erase("seed");
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::string text = canonical(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace stf::cli

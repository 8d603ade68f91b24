#include "cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/version.hpp>
#include <gmp.h>

#include "cli/artifacts.hpp"
#include "stf/boundary.hpp"
#include "stf/parallel.hpp"
#include "stf/simd/kernels.hpp"
#include "stf/stable.hpp"

namespace stf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Verdicts that track each ground-truth tag.
const char* expected_verdict(GroundTruth t) { return t == GroundTruth::Null ? "decays" : "stalls"; }
const char* expected_neveu(GroundTruth t) { return t == GroundTruth::Null ? "null-evidence" : "positive-evidence"; }

json versions() {
  return {{"stf", kVersion}, {"boost", BOOST_LIB_VERSION}, {"gmp", gmp_version}};
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) c = '_';
  return s;
}

/// Collects the artifacts and verdicts of one subcommand run.
class Job {
 public:
  Job(std::string sub, std::string tag, const ExperimentConfig& cfg) : sub_(std::move(sub)), cfg_(cfg), dir_(cfg.out) {
    stem_ = tag.empty() ? sub_ : sub_ + "-" + sanitize(tag);
    manifest_ = {{"schema", "stf.manifest/1"}, {"subcommand", sub_}, {"config_hash", config_hash(cfg)}, {"config", canonical(cfg)},
                 {"versions", versions()}};
    manifest_["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
    manifest_["verdicts"] = json::object();
  }

  json& manifest() { return manifest_; }
  const ExperimentConfig& cfg() const { return cfg_; }

  void file(const std::string& suffix, const std::string& content) {
    std::string name = stem_ + suffix;
    write_atomic(dir_ / name, content);
    files_.push_back(name);
  }

  void table(const std::string& label, const DecayTable& t) {
    std::string suffix = label.empty() ? "" : "-" + label;
    file(suffix + ".csv", decay_csv(t));
    file(suffix + ".svg", decay_svg(stem_ + suffix, t));
  }

  void verdict(const std::string& criterion, const std::string& v, const std::string& expected = "") {
    json entry{{"verdict", v}};
    if (!expected.empty()) entry["expected"] = expected;
    manifest_["verdicts"][criterion] = entry;
    if (v == "inconclusive") inconclusive_ = true;
  }

  void violation() { violation_ = true; }

  int finish(std::ostream& log) {
    int code = violation_ ? kViolation : (cfg_.strict && inconclusive_) ? kInconclusive : kOk;
    manifest_["exit_code"] = code;
    manifest_["artifacts"] = files_;
    write_json(dir_ / (stem_ + ".manifest.json"), manifest_);
    for (const auto& f : files_) log << "wrote " << (dir_ / f).string() << "\n";
    return code;
  }

 private:
  std::string sub_, stem_;
  const ExperimentConfig& cfg_;
  fs::path dir_;
  json manifest_;
  std::vector<std::string> files_;
  bool violation_ = false, inconclusive_ = false;
};

Element element_of(const GroupSpec& spec, const std::string& text) {
  if (text == "e") return identity(spec);
  return parse_element(spec, text);
}

std::uint64_t require_seed(const ExperimentConfig& cfg, const std::string& sub) {
  if (!cfg.seed) throw UsageError("subcommand '" + sub + "' is stochastic and needs a seed (--seed, STF_SEED or config 'seed')");
  return *cfg.seed;
}

RationalFunction f_e_of(const ExperimentConfig& cfg, const ActionPtr& a) {
  if (cfg.f_e.empty()) return default_f_e(a);
  const MeasureSpace& s = *a->space();
  std::vector<std::pair<Cell, Rational>> entries;
  for (const auto& [cell, v] : cfg.f_e) entries.emplace_back(s.parse_cell(cell), parse_rational(v));
  return RationalFunction(a->space(), entries);
}

RosinskiKernel kernel_of(const ExperimentConfig& cfg, const ActionPtr& a) { return RosinskiKernel(a, f_e_of(cfg, a), Alpha(cfg.alpha)); }

Region base_of(const ExperimentConfig& cfg, const ActionPtr& a) {
  if (cfg.base.empty()) return default_base(a);
  Region r;
  for (const auto& c : cfg.base) r.push_back(a->space()->parse_cell(c));
  return r;
}

Averaging averaging_of(const ExperimentConfig& cfg, const GroupSpec& g) { return cfg.averaging ? *cfg.averaging : default_averaging(g); }

std::vector<int> n_of(const ExperimentConfig& cfg, const GroupSpec& g) { return cfg.n.empty() ? default_n(g, averaging_of(cfg, g)) : cfg.n; }

std::vector<std::string> audit_actions(const ExperimentConfig& cfg) {
  if (!cfg.actions.empty()) return cfg.actions;
  if (!cfg.action.empty()) return {cfg.action};
  return builtin_action_names();
}

json scalar_json(const Scalar& s) {
  json j{{"value", s.to_double()}};
  if (s.is_exact()) j["exact"] = format_rational(s.exact());
  return j;
}

// ---------------------------------------------------------------------------

int cmd_gross(const ExperimentConfig& cfg, std::ostream& log) {
  auto a = action_of(cfg);
  auto kernel = kernel_of(cfg, a);
  Job job("gross", a->name(), cfg);
  auto t = gross_average(kernel, cfg.delta, cfg.eps, averaging_of(cfg, a->group()), n_of(cfg, a->group()), cfg.workers);
  job.table("", t);
  job.manifest()["action"] = a->name();
  job.manifest()["ground_truth"] = to_string(a->ground_truth());
  job.manifest()["table"] = decay_json(t);
  job.verdict("gross", to_string(t.verdict), expected_verdict(a->ground_truth()));
  return job.finish(log);
}

int cmd_mpns(const ExperimentConfig& cfg, std::ostream& log) {
  auto a = action_of(cfg);
  if (!cfg.hi) throw UsageError("mpns needs a bounded interval so that E has finite mass");
  Job job("mpns", a->name(), cfg);
  auto ns = n_of(cfg, a->group());
  auto t = mpns_average(a, base_of(cfg, a), cfg.lo, *cfg.hi, averaging_of(cfg, a->group()), ns, cfg.workers);
  job.table("", t);
  int horizon = std::max(2, *std::max_element(ns.begin(), ns.end()));
  if (a->group().kind == GroupKind::Free) horizon = std::min(horizon, 8);
  auto nv = neveu_classify(a, horizon, cfg.workers);
  job.table("neveu", nv.averages);
  job.manifest()["action"] = a->name();
  job.manifest()["ground_truth"] = to_string(a->ground_truth());
  job.manifest()["table"] = decay_json(t);
  job.manifest()["neveu"] = {{"horizon", horizon}, {"verdict", to_string(nv.verdict)}, {"averages", decay_json(nv.averages)}};
  job.verdict("mpns", to_string(t.verdict), expected_verdict(a->ground_truth()));
  job.verdict("neveu", to_string(nv.verdict), expected_neveu(a->ground_truth()));
  return job.finish(log);
}

json truncation_json(const TruncationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json j{{"lemma", c.lemma}, {"g", c.g}, {"L", format_rational(c.L)}, {"lhs", scalar_json(c.lhs)}, {"rhs", scalar_json(c.rhs)}, {"pass", c.pass}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    checks.push_back(j);
  }
  return {{"checks", checks}, {"violations", r.violations()}};
}

Rational max_abs(const RationalFunction& f) {
  Rational m = 0;
  for (const auto& [c, v] : f.entries()) m = std::max(m, Rational(abs(v)));
  return m;
}

int cmd_truncation(const ExperimentConfig& cfg, std::ostream& log) {
  auto a = action_of(cfg);
  auto kernel = kernel_of(cfg, a);
  Job job("truncation", a->name(), cfg);
  Rational K = cfg.K ? *cfg.K : max_abs(kernel.f_e());
  auto probes = ball(a->group(), cfg.depth > 0 ? cfg.depth : 2, cfg.cap);
  auto report = truncation_audit(kernel, cfg.delta, cfg.eps, cfg.L, K, probes);
  json j = truncation_json(report);
  j["K"] = format_rational(K);
  job.file(".json", j.dump(2) + "\n");
  job.manifest()["action"] = a->name();
  job.manifest()["violations"] = report.violations();
  job.verdict("truncation", report.violations() == 0 ? "pass" : "fail");
  if (report.violations()) job.violation();
  return job.finish(log);
}

int cmd_fmix(const ExperimentConfig& cfg, std::ostream& log) {
  auto a = action_of(cfg);
  std::uint64_t seed = require_seed(cfg, "fmix");
  FieldSpec field{kernel_of(cfg, a), {}, cfg.series_terms, seed};
  std::vector<Element> gs;
  for (const auto& g : cfg.g_tuple) gs.push_back(element_of(a->group(), g));
  Interval A = cfg.A, B = cfg.B;
  if (!cfg.raw.contains("A")) A.lo = 1;
  if (!cfg.raw.contains("B")) B.lo = 1;
  Averaging kind = averaging_of(cfg, a->group());
  std::vector<int> ns = cfg.n.empty() ? std::vector<int>{1, 2, 3, 4} : cfg.n;
  std::size_t reps = cfg.replicates ? cfg.replicates : 2000;
  auto res = f_mixing_empirical(field, A, B, gs, kind, ns, reps, cfg.workers);
  Job job("fmix", a->name(), cfg);
  job.table("", res.table);
  std::ostringstream cells;
  cells << "n,h,estimate,se\n";
  for (const auto& c : res.cells) cells << c.n << ',' << csv_field(c.h) << ',' << format_double(c.estimate) << ',' << format_double(c.se) << "\n";
  job.file("-cells.csv", cells.str());
  job.manifest()["action"] = a->name();
  job.manifest()["ground_truth"] = to_string(a->ground_truth());
  job.manifest()["replicates"] = reps;
  job.manifest()["table"] = decay_json(res.table);
  job.verdict("fmix", to_string(res.table.verdict), expected_verdict(a->ground_truth()));
  return job.finish(log);
}

int cmd_boundary_decay(const ExperimentConfig& cfg, std::ostream& log) {
  Rational K = cfg.K ? *cfg.K : Rational(1);
  auto rows = a_set_decay(cfg.k, K, cfg.radius_max, cfg.workers, cfg.cap);
  DecayTable t;
  for (const auto& r : rows) t.rows.push_back({r.n, to_double(r.value), r.value, std::nullopt});
  // Radius 0 has the full mass 1 by definition; the verdict uses radii >= 1.
  std::vector<DecayRow> tail;
  for (const auto& r : t.rows)
    if (r.n >= 1) tail.push_back(r);
  t.verdict = decay_verdict(tail);
  Job job("boundary-decay", "k" + std::to_string(cfg.k), cfg);
  job.table("", t);
  job.manifest()["K"] = format_rational(K);
  job.manifest()["table"] = decay_json(t);
  job.verdict("boundary-decay", to_string(t.verdict), "decays");
  return job.finish(log);
}

int cmd_cond_suff(const ExperimentConfig& cfg, std::ostream& log, bool second) {
  Rational K = cfg.K ? *cfg.K : Rational(2);
  DecayTable t;
  for (int m : cfg.m) {
    Rational v = second ? cond_suff2_average(cfg.k, cfg.r, m, cfg.workers) : cond_suff_average(cfg.k, K, m, cfg.workers);
    t.rows.push_back({m, to_double(v), v, std::nullopt});
  }
  std::sort(t.rows.begin(), t.rows.end(), [](const DecayRow& a, const DecayRow& b) { return a.n < b.n; });
  t.verdict = decay_verdict(t.rows);
  std::string sub = second ? "cond-suff2" : "cond-suff";
  Job job(sub, "k" + std::to_string(cfg.k) + (second ? "-r" + std::to_string(cfg.r) : ""), cfg);
  job.table("", t);
  if (!second) job.manifest()["K"] = format_rational(K);
  if (second) job.manifest()["r"] = cfg.r;
  job.manifest()["table"] = decay_json(t);
  job.verdict(sub, to_string(t.verdict), "decays");
  return job.finish(log);
}

int cmd_bms(const ExperimentConfig& cfg, std::ostream& log) {
  const int depth = cfg.depth > 0 ? cfg.depth : 3;
  const GroupSpec spec = GroupSpec::free(cfg.k);
  std::vector<Cell> cyl;
  for (int d = 1; d <= depth; ++d)
    for (auto& e : sphere(spec, d, cfg.cap)) cyl.push_back(e.data);
  std::vector<std::pair<Cell, Cell>> rects;
  for (const auto& u : cyl)
    for (const auto& v : cyl)
      if (diverging(u, v)) rects.emplace_back(u, v);
  auto gens = generators(spec);
  auto results = parallel_map(rects.size(), cfg.workers, [&](std::size_t i) {
    std::vector<std::pair<std::string, InvarianceReport>> bad;
    CylinderRect rect{cfg.k, {rects[i]}};
    for (const auto& g : gens) {
      auto r = bms_invariance_check(g, rect);
      if (!r.equal()) bad.emplace_back(format_element(g), r);
    }
    return bad;
  });
  json violations = json::array();
  for (std::size_t i = 0; i < rects.size(); ++i)
    for (const auto& [g, r] : results[i])
      violations.push_back({{"g", g},
                            {"rect", free_group::format_word(rects[i].first) + " x " + free_group::format_word(rects[i].second)},
                            {"before", format_rational(r.before)},
                            {"after", format_rational(r.after)}});
  Job job("bms", "k" + std::to_string(cfg.k), cfg);
  json doc{{"depth", depth}, {"rects", rects.size()}, {"checks", rects.size() * gens.size()}, {"violations", violations}};
  job.file(".json", doc.dump(2) + "\n");
  job.verdict("bms", violations.empty() ? "pass" : "fail");
  if (!violations.empty()) job.violation();
  return job.finish(log);
}

int cmd_walk(const ExperimentConfig& cfg, std::ostream& log) {
  std::uint64_t seed = require_seed(cfg, "walk");
  const int depth = cfg.depth > 0 ? cfg.depth : 2;
  auto rep = hitting_vs_ps(seed, cfg.k, depth, cfg.samples, cfg.workers);
  std::ostringstream os;
  os << "cylinder,expected_p_over_q,expected,frequency,se,z\n";
  for (const auto& r : rep.rows)
    os << csv_field(free_group::format_word(r.cylinder)) << ',' << format_rational(r.expected) << ',' << format_double(to_double(r.expected)) << ','
       << format_double(r.frequency) << ',' << format_double(r.se) << ',' << format_double(r.z) << "\n";
  Job job("walk", "k" + std::to_string(cfg.k), cfg);
  job.file(".csv", os.str());
  job.manifest()["samples"] = cfg.samples;
  job.manifest()["max_z"] = rep.max_z;
  job.manifest()["max_abs_deviation"] = rep.max_abs_deviation;
  job.verdict("walk", rep.max_z <= 3.0 ? "pass" : "fail");
  return job.finish(log);
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  auto a = action_of(cfg);
  std::uint64_t seed = require_seed(cfg, "simulate");
  const GroupSpec& spec = a->group();
  std::vector<Element> index;
  if (cfg.index_set.empty()) {
    index.push_back(identity(spec));
    for (const auto& g : generators(spec)) index.push_back(g);
  } else {
    for (const auto& g : cfg.index_set) index.push_back(element_of(spec, g));
  }
  FieldSpec field{kernel_of(cfg, a), index, cfg.series_terms, seed};
  LepageSampler sampler(field);
  const std::size_t reps = cfg.replicates ? cfg.replicates : 10000;
  auto rows = sampler.replicates(reps, cfg.workers);

  Job job("simulate", a->name(), cfg);
  std::ostringstream os;
  os << "replicate,g,value\n";
  for (std::size_t r = 0; r < reps; ++r)
    for (std::size_t i = 0; i < index.size(); ++i) os << r << ',' << csv_field(format_element(index[i])) << ',' << format_double(rows[r][i]) << "\n";
  job.file("-samples.csv", os.str());

  // Characteristic function of each Y_g and of Y_{g0} + Y_{g1}.
  std::vector<std::pair<std::string, Combination>> combos;
  for (std::size_t i = 0; i < index.size(); ++i) combos.push_back({format_element(index[i]), {{Rational(1), index[i]}}});
  if (index.size() >= 2)
    combos.push_back({format_element(index[0]) + " + " + format_element(index[1]), {{Rational(1), index[0]}, {Rational(1), index[1]}}});
  std::ostringstream cf;
  cf << "combination,theta,scale_pow,expected,re,im,se_re,se_im,z\n";
  const double alpha = to_double(cfg.alpha);
  json cf_rows = json::array();
  for (std::size_t ci = 0; ci < combos.size(); ++ci) {
    const auto& [label, combo] = combos[ci];
    std::vector<double> ys(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      double y = 0;
      for (std::size_t t = 0; t < combo.size(); ++t) {
        std::size_t slot = static_cast<std::size_t>(std::find(index.begin(), index.end(), combo[t].second) - index.begin());
        y += to_double(combo[t].first) * rows[r][slot];
      }
      ys[r] = y;
    }
    Scalar sp = scale_pow_of(combo, field.kernel);
    for (double theta : cfg.theta) {
      auto est = empirical_char(ys, theta);
      double expected = std::exp(-sp.to_double() * std::pow(std::fabs(theta), alpha));
      double z = est.se_re > 0 ? std::fabs(est.value.real() - expected) / est.se_re : (est.value.real() == expected ? 0.0 : INFINITY);
      cf << csv_field(label) << ',' << format_double(theta) << ',' << csv_field(sp.to_string()) << ',' << format_double(expected) << ','
         << format_double(est.value.real()) << ',' << format_double(est.value.imag()) << ',' << format_double(est.se_re) << ','
         << format_double(est.se_im) << ',' << format_double(z) << "\n";
      cf_rows.push_back({{"combination", label}, {"theta", theta}, {"z", z}});
    }
  }
  job.file("-char.csv", cf.str());

  StationarityReport st;
  std::vector<Combination> probes;
  for (const auto& [label, combo] : combos) probes.push_back(combo);
  for (const auto& h : generators(spec)) {
    auto r = stationarity_audit(field.kernel, h, probes);
    st.rows.insert(st.rows.end(), r.rows.begin(), r.rows.end());
  }
  json st_rows = json::array();
  for (const auto& r : st.rows) st_rows.push_back({{"probe", r.probe}, {"base", r.base.to_string()}, {"shifted", r.shifted.to_string()}, {"exact", r.exact}, {"pass", r.pass}});

  const auto& meta = sampler.meta();
  job.manifest()["action"] = a->name();
  job.manifest()["field"] = {{"seed", meta.seed}, {"series_terms", meta.series_terms}, {"alpha", meta.alpha}, {"support_mass", meta.support_mass},
                             {"tail_variance", meta.tail_variance}, {"replicates", reps}};
  job.file("-field.json", json{{"seed", meta.seed}, {"series_terms", meta.series_terms}, {"alpha", meta.alpha}, {"support_mass", meta.support_mass},
                                {"tail_variance", meta.tail_variance}, {"replicates", reps}}
                               .dump(2) +
                               "\n");
  job.manifest()["stationarity"] = st_rows;
  job.manifest()["char"] = cf_rows;
  job.verdict("stationarity", st.pass() ? "pass" : "fail");
  if (!st.pass()) job.violation();
  return job.finish(log);
}

// ---------------------------------------------------------------------------

json audit_one(const std::string& name, int depth) {
  auto a = builtin_action(name);
  const GroupSpec& spec = a->group();
  auto gens = generators(spec);
  std::vector<std::pair<Element, Element>> pairs;
  for (const auto& g1 : gens)
    for (const auto& g2 : gens) pairs.emplace_back(g1, g2);
  Region domain = audit_domain(*a, depth);
  json out{{"action", name}, {"ground_truth", to_string(a->ground_truth())}};

  auto coc = cocycle_audit(*a, pairs, domain);
  json cv = json::array();
  for (const auto& v : coc.violations) cv.push_back({{"g1", v.g1}, {"g2", v.g2}, {"cell", v.cell}, {"what", v.what}});
  out["cocycle"] = {{"checks", coc.checks}, {"violations", cv}};

  std::vector<YInterval> intervals{{Rational(1, 2), Rational(2)}, {Rational(1, 3), Rational(3)}};
  auto mah = maharam_preservation_audit(a, gens, domain, intervals);
  json mv = json::array();
  auto opt = [](const std::optional<Rational>& r) { return r ? format_rational(*r) : std::string("inf"); };
  for (const auto& v : mah.violations) mv.push_back({{"g", v.g}, {"cell", v.cell}, {"interval", v.interval}, {"before", opt(v.before)}, {"after", opt(v.after)}});
  out["maharam"] = {{"checks", mah.checks}, {"violations", mv}};

  RosinskiKernel kernel(a, default_f_e(a), Alpha(Rational(3, 2)));
  std::vector<Combination> probes{{{Rational(1), identity(spec)}}, {{Rational(1), identity(spec)}, {Rational(1), gens[0]}},
                                  {{Rational(2), identity(spec)}, {Rational(-1), gens.back()}}};
  json sv = json::array();
  std::size_t st_checks = 0;
  for (const auto& h : gens) {
    auto st = stationarity_audit(kernel, h, probes);
    for (const auto& r : st.rows) {
      ++st_checks;
      if (!r.pass) sv.push_back({{"probe", r.probe}, {"base", r.base.to_string()}, {"shifted", r.shifted.to_string()}});
    }
  }
  out["stationarity"] = {{"checks", st_checks}, {"violations", sv}};
  out["pass"] = cv.empty() && mv.empty() && sv.empty();
  return out;
}

int cmd_audit(const ExperimentConfig& cfg, std::ostream& log) {
  const int depth = cfg.depth > 0 ? cfg.depth : 4;
  auto names = audit_actions(cfg);
  auto results = parallel_map(names.size(), cfg.workers, [&](std::size_t i) { return audit_one(names[i], depth); });
  Job job("audit", "", cfg);
  bool pass = true;
  for (const auto& r : results) pass = pass && r["pass"].get<bool>();
  job.file(".json", json{{"depth", depth}, {"actions", results}}.dump(2) + "\n");
  job.verdict("audit", pass ? "pass" : "fail");
  if (!pass) job.violation();
  for (const auto& r : results) log << r["action"].get<std::string>() << ": " << (r["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
  return job.finish(log);
}

int cmd_report(const ExperimentConfig& cfg, std::ostream& log) {
  fs::path dir = cfg.out;
  if (!fs::is_directory(dir)) throw UsageError("report input directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> manifests;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string n = e.path().filename().string();
    if (n.size() > 14 && n.compare(n.size() - 14, 14, ".manifest.json") == 0) manifests.push_back(e.path());
  }
  std::sort(manifests.begin(), manifests.end());
  json runs = json::array();
  json summary = json::object();
  std::size_t mismatches = 0;
  for (const auto& p : manifests) {
    json m;
    try {
      std::ifstream in(p);
      m = json::parse(in);
      if (m.value("schema", "") != "stf.manifest/1" || !m.contains("subcommand") || !m.contains("verdicts")) throw UsageError("");
      for (const auto& f : m.at("artifacts"))
        if (!fs::exists(dir / f.get<std::string>())) throw UsageError("missing artifact " + f.get<std::string>() + " listed in " + p.string());
    } catch (const UsageError& e) {
      throw UsageError(std::string(e.what()).empty() ? "corrupted artifact " + p.string() : e.what());
    } catch (const std::exception&) {
      throw UsageError("corrupted artifact " + p.string());
    }
    std::string who = m.value("action", m["subcommand"].get<std::string>());
    runs.push_back({{"manifest", p.filename().string()}, {"subcommand", m["subcommand"]}, {"subject", who}, {"config_hash", m["config_hash"]},
                    {"seed", m["seed"]}, {"versions", m["versions"]}});
    for (const auto& [criterion, entry] : m["verdicts"].items()) {
      json e{{"verdict", entry["verdict"]}, {"config_hash", m["config_hash"]}};
      if (m.contains("ground_truth")) e["ground_truth"] = m["ground_truth"];
      if (entry.contains("expected")) {
        bool ok = entry["expected"] == entry["verdict"];
        e["matches_ground_truth"] = ok;
        if (!ok) ++mismatches;
      }
      summary[criterion][who] = e;
    }
  }
  json doc{{"schema", "stf.report/1"}, {"versions", versions()}, {"runs", runs}, {"summary", summary}, {"mismatches", mismatches}};
  write_json(dir / "report.json", doc);
  log << "wrote " << (dir / "report.json").string() << " (" << runs.size() << " runs, " << mismatches << " mismatches)\n";
  return kOk;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"gross", "mpns", "truncation", "fmix", "boundary-decay", "cond-suff", "bms", "cond-suff2", "walk",
                                          "simulate", "audit", "report"};
  return s;
}

ActionPtr action_of(const ExperimentConfig& cfg) {
  if (cfg.action.empty()) throw UsageError("config needs an 'action'");
  return builtin_action(cfg.action, cfg.group);
}

RationalFunction default_f_e(const ActionPtr& action) {
  const MeasureSpace& s = *action->space();
  Cell c;
  switch (action->group().kind) {
    case GroupKind::Free: c = Cell{1}; break;  // C_a
    case GroupKind::Lamplighter: c = dynamic_cast<const DiscreteSpace&>(s).points().front(); break;
    default:
      if (s.finite())
        c = dynamic_cast<const DiscreteSpace&>(s).points().back();  // the fixed point of the permutation action
      else
        c = Cell(static_cast<std::size_t>(action->group().rank), 0);
  }
  return indicator(action->space(), Region{c});
}

Region default_base(const ActionPtr& action) {
  const MeasureSpace& s = *action->space();
  if (s.finite()) return s.cells(0);
  return {Cell(static_cast<std::size_t>(action->group().rank), 0)};
}

std::vector<int> default_n(const GroupSpec& spec, Averaging kind) {
  if (kind == Averaging::Ball) return spec.kind == GroupKind::Free ? std::vector<int>{2, 4, 6, 8} : std::vector<int>{1, 2, 3, 4};
  switch (spec.kind) {
    case GroupKind::IntLattice: return spec.rank == 1 ? std::vector<int>{2, 4, 8, 16, 32, 64} : std::vector<int>{1, 2, 4, 8};
    default: return {1, 2, 3, 4};
  }
}

int run(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log) {
  static const std::map<std::string, std::function<int(const ExperimentConfig&, std::ostream&)>> table{
      {"gross", cmd_gross},
      {"mpns", cmd_mpns},
      {"truncation", cmd_truncation},
      {"fmix", cmd_fmix},
      {"boundary-decay", cmd_boundary_decay},
      {"cond-suff", [](const ExperimentConfig& c, std::ostream& l) { return cmd_cond_suff(c, l, false); }},
      {"cond-suff2", [](const ExperimentConfig& c, std::ostream& l) { return cmd_cond_suff(c, l, true); }},
      {"bms", cmd_bms},
      {"walk", cmd_walk},
      {"simulate", cmd_simulate},
      {"audit", cmd_audit},
      {"report", cmd_report},
  };
  auto it = table.find(subcommand);
  if (it == table.end()) {
    log << "error: unknown subcommand '" << subcommand << "'\n";
    return kUsage;
  }
  try {
    return it->second(cfg, log);
  } catch (const ResourceError& e) {
    log << "resource error: " << e.what() << "\n";
  } catch (const UnsupportedError& e) {
    log << "unsupported: " << e.what() << "\n";
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
  }
  return kUsage;
}

}  // namespace stf::cli

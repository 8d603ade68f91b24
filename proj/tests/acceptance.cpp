// Acceptance suite: one PASS/FAIL line per criterion, with wall time against its limit.
// Stochastic criteria use seed 1, fixed before any run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include <unistd.h>

#include "cli/config.hpp"
#include "cli/runner.hpp"
#include "stf/boundary.hpp"
#include "stf/diagnostics.hpp"
#include "stf/simd/kernels.hpp"

using namespace stf;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;
const GroupSpec F2 = GroupSpec::free(2);

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = secs < limit_s;
  bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %2d %s: %s (%.2f s, limit %.0f s%s) %s\n", id, pass ? "PASS" : "FAIL", name, secs, limit_s, in_time ? "" : ", over time",
              o.detail.c_str());
  std::fflush(stdout);
}

std::vector<std::pair<Element, Element>> generator_pairs(const GroupSpec& spec) {
  std::vector<std::pair<Element, Element>> out;
  for (const auto& g1 : generators(spec))
    for (const auto& g2 : generators(spec)) out.emplace_back(g1, g2);
  return out;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read(e.path());
  return out;
}

// 1/(4 * 3^{len-1}), the Patterson-Sullivan mass of a length-len cylinder.
Rational ps_mass(std::size_t len) {
  if (len == 0) return 1;
  Rational m(1, 4);
  for (std::size_t i = 1; i < len; ++i) m /= 3;
  return m;
}

Outcome cocycles() {
  std::size_t checks = 0;
  for (const auto& name : builtin_action_names()) {
    auto a = builtin_action(name);
    auto r = cocycle_audit(*a, generator_pairs(a->group()), audit_domain(*a, 4));
    checks += r.checks;
    if (!r.pass()) {
      const auto& v = r.violations.front();
      return {false, name + ": " + v.what + " at g1=" + v.g1 + " g2=" + v.g2 + " cell=" + v.cell};
    }
  }
  return {true, std::to_string(checks) + " exact chain-rule checks"};
}

Outcome maharam() {
  std::vector<YInterval> intervals{{Rational(1, 2), Rational(2)}, {Rational(1, 3), Rational(3)}};
  std::size_t checks = 0;
  for (const auto& name : builtin_action_names()) {
    auto a = builtin_action(name);
    auto r = maharam_preservation_audit(a, generators(a->group()), audit_domain(*a, 4), intervals);
    checks += r.checks;
    if (!r.pass()) {
      const auto& v = r.violations.front();
      return {false, name + ": g=" + v.g + " cell=" + v.cell + " interval=" + v.interval};
    }
  }
  return {true, std::to_string(checks) + " product-cell masses preserved"};
}

Outcome conformality() {
  auto a = builtin_action("boundary-free-2");
  const auto& space = *a->space();
  std::size_t checks = 0;
  for (const auto& g : ball(F2, 3))
    for (int extra : {1, 2})
      for (const auto& c : BoundarySpace(2).cells(static_cast<int>(g.data.size()) + extra)) {
        Rational lhs = rn_boundary(g, c) * space.mass(c);
        Rational pushed = measure(space, image(*a, g, Region{c}));
        Rational oracle = ps_mass(free_group::multiply(free_group::inverse(g.data), c).size());
        ++checks;
        if (lhs != pushed || lhs != oracle) return {false, "g=" + format_element(g) + " cell=" + space.format_cell(c)};
      }
  return {true, std::to_string(checks) + " cylinders over ball(3)"};
}

Outcome a_set_decay_check() {
  Element ab = parse_element(F2, "ab"), g = ab;
  std::vector<Rational> m;
  for (int j = 1; j <= 6; ++j, g = mul(g, ab)) m.push_back(a_set(g, 1).mass);
  for (int j = 2; j <= 5; ++j)
    if (m[static_cast<std::size_t>(j)] / m[static_cast<std::size_t>(j) - 1] != Rational(1, 3)) return {false, "ratio at j=" + std::to_string(j)};
  // Enumeration oracle: cylinders at depth |g|+1 with |beta| <= 1, computed from word distances.
  auto oracle = [](const Element& h) {
    Rational s = 0;
    for (const auto& c : BoundarySpace(2).cells(static_cast<int>(h.data.size()) + 1)) {
      Key xi = c;
      while (xi.size() < c.size() + h.data.size() + 4) xi.push_back(xi.back() == -1 ? 2 : 1);
      long b = static_cast<long>(free_group::multiply(free_group::inverse(h.data), xi).size()) - static_cast<long>(xi.size());
      if (std::labs(b) <= 1) s += ps_mass(c.size());
    }
    return s;
  };
  Element abab = parse_element(F2, "abab"), ababab = parse_element(F2, "ababab");
  bool spot = m[1] == Rational(1, 18) && m[2] == Rational(1, 54) && oracle(abab) == Rational(1, 18) && oracle(ababab) == Rational(1, 54);
  return {spot, "mass((ab)^2)=" + format_rational(m[1]) + ", mass((ab)^3)=" + format_rational(m[2]) + ", ratios 1/3 for j=2..5"};
}

Outcome cond_suff_decay() {
  std::ostringstream d;
  bool ok = true;
  auto series = [&](const std::string& label, const std::function<Rational(int)>& f) {
    Rational prev = -1;
    d << label << ":";
    for (int m : {2, 4, 6, 8}) {
      Rational v = f(m);
      d << " " << format_rational(v);
      if (prev >= 0 && !(v < prev)) ok = false;
      prev = v;
    }
    if (!(prev < Rational(1, 20))) ok = false;
    d << "; ";
  };
  series("cond-suff K=2", [](int m) { return cond_suff_average(2, 2, m); });
  for (int r : {0, 1}) series("cond-suff2 r=" + std::to_string(r), [r](int m) { return cond_suff2_average(2, r, m); });
  return {ok, d.str()};
}

Outcome bms() {
  BoundarySpace b(2);
  std::vector<Cell> cells;
  for (int d = 1; d <= 3; ++d)
    for (const auto& c : b.cells(d)) cells.push_back(c);
  std::size_t checks = 0;
  for (const auto& c1 : cells)
    for (const auto& c2 : cells)
      if (diverging(c1, c2))
        for (const auto& g : generators(F2)) {
          ++checks;
          if (!bms_invariance_check(g, {2, {{c1, c2}}}).equal())
            return {false, "g=" + format_element(g) + " rect=" + b.format_cell(c1) + "x" + b.format_cell(c2)};
        }
  return {true, std::to_string(checks) + " translated rects"};
}

Outcome gross() {
  auto lat = builtin_action("lattice-translation-null");
  RosinskiKernel kl(lat, indicator(lat->space(), {Cell{0}}), Alpha(Rational(3, 2)));
  std::vector<int> ns;
  for (int n = 1; n <= 64; ++n) ns.push_back(n);
  auto t = gross_average(kl, Rational(1, 2), Rational(1, 2), Averaging::Folner, ns);
  for (const auto& r : t.rows)
    if (!r.exact || *r.exact != Rational(1, 2 * r.n + 1)) return {false, "lattice row n=" + std::to_string(r.n)};
  auto pos = builtin_action("finite-permutation-positive");
  RosinskiKernel kp(pos, cli::default_f_e(pos), Alpha(Rational(3, 2)));
  auto tp = gross_average(kp, Rational(1, 2), Rational(1, 2), default_averaging(pos->group()), ns);
  const Rational first = *tp.rows.front().exact;
  for (const auto& r : tp.rows)
    if (*r.exact < first) return {false, "positive exemplar drops below its n=1 value at n=" + std::to_string(r.n)};
  return {true, "lattice a_n = 1/(2n+1) for n=1..64; positive exemplar >= " + format_rational(first) + " throughout"};
}

Outcome truncation() {
  std::size_t checks = 0;
  auto run = [&](const ActionPtr& a, const RationalFunction& fe, const std::string& label) -> std::optional<std::string> {
    for (Alpha alpha : {Alpha(Rational(4, 5)), Alpha(1.0), Alpha(Rational(3, 2))}) {
      RosinskiKernel k(a, fe, alpha);
      auto r = truncation_audit(k, Rational(1, 2), Rational(1, 2), {Rational(2), Rational(3), Rational(9)}, Rational(1), ball(a->group(), 2));
      checks += r.checks.size();
      for (const auto& c : r.checks)
        if (!c.pass) return label + " " + c.lemma + " g=" + c.g + " L=" + format_rational(c.L) + " " + c.detail;
    }
    return std::nullopt;
  };
  auto b = builtin_action("boundary-free-2");
  const auto& s = b->space();
  RationalFunction depth2(s, {{s->parse_cell("ab"), Rational(1)}, {s->parse_cell("aa"), Rational(1, 2)}, {s->parse_cell("b^-1a"), Rational(-3, 4)}});
  if (auto w = run(b, depth2, "boundary-free-2 depth-2 f_e")) return {false, *w};
  for (const char* name : {"boundary-free-2", "finite-permutation-positive", "lamplighter-shift-positive"}) {
    auto a = builtin_action(name);
    if (auto w = run(a, cli::default_f_e(a), name)) return {false, *w};
  }
  return {true, std::to_string(checks) + " inequality checks, 0 violations"};
}

struct FieldRun {
  std::vector<std::vector<double>> rows;
  FieldMeta meta;
};

FieldSpec lepage_spec() {
  auto a = builtin_action("boundary-free-2");
  RosinskiKernel k(a, indicator(a->space(), {a->space()->parse_cell("a")}), Alpha(Rational(3, 2)));
  return FieldSpec{k, {identity(F2), parse_element(F2, "a")}, 2000, kSeed};
}

Outcome lepage(const std::vector<std::vector<double>>& rows, double tail_variance) {
  auto spec = lepage_spec();
  const Element e = identity(F2), a = parse_element(F2, "a");
  std::ostringstream d;
  bool ok = true;
  struct Target {
    const char* label;
    Combination combo;
    std::function<double(const std::vector<double>&)> pick;
  };
  std::vector<Target> targets{{"Y_e", {{Rational(1), e}}, [](const std::vector<double>& r) { return r[0]; }},
                              {"Y_e+Y_a", {{Rational(1), e}, {Rational(1), a}}, [](const std::vector<double>& r) { return r[0] + r[1]; }}};
  for (const auto& t : targets) {
    double sigma_pow = scale_pow_of(t.combo, spec.kernel).to_double();
    std::vector<double> xs;
    xs.reserve(rows.size());
    for (const auto& r : rows) xs.push_back(t.pick(r));
    for (double theta : {0.5, 1.0, 2.0}) {
      auto est = empirical_char(xs, theta);
      double target = std::exp(-sigma_pow * std::pow(std::fabs(theta), 1.5));
      double zr = std::fabs(est.value.real() - target) / est.se_re, zi = std::fabs(est.value.imag()) / est.se_im;
      if (!(zr < 3 && zi < 3)) ok = false;
      char buf[128];
      std::snprintf(buf, sizeof buf, "%s th=%.1f re %.2fSE im %.2fSE; ", t.label, theta, zr, zi);
      d << buf;
    }
  }
  // Stationarity: exact equality of scale parameters under left translation.
  std::vector<Combination> probes{{{Rational(1), e}}, {{Rational(1), e}, {Rational(1), a}}, {{Rational(2), e}, {Rational(-1), parse_element(F2, "b")}}};
  // Rows whose scales involve irrational powers are compared in double at 1e-12 relative error.
  std::size_t rows_checked = 0, exact = 0;
  double worst = 0;
  for (const auto& h : ball(F2, 2)) {
    auto st = stationarity_audit(spec.kernel, h, probes, 1e-12);
    for (const auto& r : st.rows) {
      ++rows_checked;
      if (!r.pass) ok = false;
      if (r.exact) {
        ++exact;
      } else {
        double x = r.base.to_double(), y = r.shifted.to_double();
        worst = std::max(worst, std::fabs(x - y) / std::max({1.0, std::fabs(x), std::fabs(y)}));
      }
    }
  }
  d << "stationarity " << rows_checked << " probes pass (" << exact << " in exact rationals, worst double rel. error " << worst
    << "); tail variance bound " << tail_variance;
  return {ok, d.str()};
}

Outcome hitting(HittingReport& out) {
  out = hitting_vs_ps(kSeed, 2, 2, 100000);
  std::size_t within = 0;
  for (const auto& r : out.rows) within += r.z < 3;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu/%zu cylinders within 3 SE, max z %.2f", within, out.rows.size(), out.max_z);
  return {within == out.rows.size(), buf};
}

Outcome determinism(const std::vector<std::vector<double>>& field1, const HittingReport& hit1) {
  auto field3 = LepageSampler(lepage_spec()).replicates(field1.size(), 3);
  if (field3 != field1) return {false, "LePage replicates differ between 1 and 3 workers"};
  auto hit3 = hitting_vs_ps(kSeed, 2, 2, 100000, 3);
  for (std::size_t i = 0; i < hit1.rows.size(); ++i)
    if (hit3.rows[i].frequency != hit1.rows[i].frequency) return {false, "hitting frequencies differ between 1 and 3 workers"};

  fs::path root = fs::temp_directory_path() / ("stf-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::ostringstream log;
  const std::vector<std::pair<std::string, nlohmann::json>> jobs{
      {"simulate", {{"action", "boundary-free-2"}, {"index_set", {"e", "a", "b"}}, {"replicates", 2000}}},
      {"walk", {{"k", 2}}},
      {"fmix", {{"action", "lattice-translation-null"}, {"replicates", 1000}, {"n", {1, 2}}}}};
  std::size_t files = 0;
  for (const auto& [sub, doc] : jobs) {
    std::map<std::string, std::string> seen[2];
    for (int w : {1, 3}) {
      nlohmann::json d = doc;
      d["schema"] = cli::kSchema;
      auto cfg = cli::parse_config(d);
      cfg.seed = kSeed;
      cfg.workers = w;
      cfg.out = (root / (sub + std::to_string(w))).string();
      int code = cli::run(sub, cfg, log);
      if (code != cli::kOk && code != cli::kInconclusive) return {false, sub + " exited " + std::to_string(code) + ": " + log.str()};
      seen[w == 1 ? 0 : 1] = contents(cfg.out);
    }
    if (seen[0] != seen[1]) return {false, sub + " artifacts differ between 1 and 3 workers"};
    files += seen[0].size();
  }
  fs::remove_all(root);
  return {true, "LePage, hitting and " + std::to_string(files) + " CLI artifacts identical for 1 and 3 workers"};
}

}  // namespace

int main() {
  std::printf("stf acceptance suite (SIMD: %s)\n", simd::isa_name(simd::active_isa()).c_str());
  criterion(1, "exact cocycle suite", 10, cocycles);
  criterion(2, "Maharam preservation", 10, maharam);
  criterion(3, "PS conformality", 30, conformality);
  criterion(4, "A-set decay", 10, a_set_decay_check);
  criterion(5, "cond-suff and cond-suff2 decay", 300, cond_suff_decay);
  criterion(6, "BMS invariance", 60, bms);
  criterion(7, "Gross closed form", 10, gross);
  criterion(8, "truncation audit", 60, truncation);

  FieldRun field;
  criterion(9, "stable-law statistics", 300, [&] {
    LepageSampler sampler(lepage_spec());
    field.rows = sampler.replicates(10000);
    field.meta = sampler.meta();
    return lepage(field.rows, field.meta.tail_variance);
  });
  HittingReport hit;
  criterion(10, "hitting measure", 60, [&] { return hitting(hit); });
  criterion(11, "determinism", 600, [&] { return determinism(field.rows, hit); });

  std::printf("%s: %d of 11 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}

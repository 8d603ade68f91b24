#include "stf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "stf/parallel.hpp"

namespace stf {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Decays: return "decays";
    case Verdict::Stalls: return "stalls";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(NeveuVerdict v) {
  switch (v) {
    case NeveuVerdict::PositiveEvidence: return "positive-evidence";
    case NeveuVerdict::NullEvidence: return "null-evidence";
    case NeveuVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict decay_verdict(const std::vector<DecayRow>& rows) {
  if (rows.size() < 2) return Verdict::Inconclusive;
  auto sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const DecayRow& a, const DecayRow& b) { return a.n < b.n; });
  double first = sorted.front().value, last = sorted.back().value;
  if (last < std::min(first / 4.0, 0.05)) return Verdict::Decays;
  if (last >= first / 2.0) return Verdict::Stalls;
  return Verdict::Inconclusive;
}

Averaging default_averaging(const GroupSpec& spec) { return spec.amenable() ? Averaging::Folner : Averaging::Ball; }

std::vector<Element> averaging_set(const GroupSpec& spec, Averaging kind, int n) {
  if (kind == Averaging::Folner) return folner_set(spec, n);
  return ball(spec, n);
}

bool averaging_contains(const GroupSpec& spec, Averaging kind, int n, const Element& g) {
  if (kind == Averaging::Folner) return folner_contains(spec, n, g);
  return word_length(g) <= n;
}

namespace {

// Averages of per-element values over the nested sets F_n, n in n_list.
DecayTable nested_averages(const GroupSpec& spec, Averaging kind, const std::vector<int>& n_list, int workers,
                           const std::function<Rational(const Element&)>& term) {
  if (n_list.empty()) throw UsageError("empty n list");
  std::vector<int> ns = n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.front() < 0) throw UsageError("averaging index must be >= 0");
  auto elems = averaging_set(spec, kind, ns.back());
  auto values = parallel_map(elems.size(), workers, [&](std::size_t i) { return term(elems[i]); });
  DecayTable table;
  for (int n : ns) {
    Rational sum = 0;
    long count = 0;
    for (std::size_t i = 0; i < elems.size(); ++i)
      if (averaging_contains(spec, kind, n, elems[i])) {
        sum += values[i];
        ++count;
      }
    Rational avg = sum / count;
    table.rows.push_back({n, to_double(avg), avg, std::nullopt});
  }
  table.verdict = decay_verdict(table.rows);
  return table;
}

Scalar smin(const Scalar& a, const Scalar& b) { return b < a ? b : a; }
Scalar smax(const Scalar& a, const Scalar& b) { return b > a ? b : a; }

bool scalar_le(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return a.exact() <= b.exact();
  double x = a.to_double(), y = b.to_double();
  return x <= y + 1e-12 * std::max({1.0, std::fabs(x), std::fabs(y)});
}

}  // namespace

Rational gross_term(const RosinskiKernel& kernel, const Element& g, const Rational& delta, const Rational& eps) {
  if (delta <= 0 || delta > 1) throw UsageError("delta must lie in (0, 1]");
  if (eps <= 0) throw UsageError("eps must be positive");
  const MeasureSpace& s = *kernel.action()->space();
  Region a;
  for (const auto& [c, v] : kernel.f_e().entries()) {
    Rational av = abs(v);
    if (av >= delta && av * delta <= 1) a.push_back(c);
  }
  const Scalar eps_alpha = Scalar(eps).abs_pow(kernel.alpha());
  Region big;
  const KernelFunction fg = kernel.f(g);
  for (const auto& [c, v] : fg.entries())
    if (v.abs_alpha >= eps_alpha) big.push_back(c);
  return measure(s, intersect(s, normalize(s, a), normalize(s, big)));
}

DecayTable gross_average(const RosinskiKernel& kernel, const Rational& delta, const Rational& eps, Averaging kind, const std::vector<int>& n_list,
                         int workers) {
  return nested_averages(kernel.action()->group(), kind, n_list, workers, [&](const Element& g) { return gross_term(kernel, g, delta, eps); });
}

DecayTable mpns_average(const ActionPtr& action, const Region& base, const Rational& lo, const Rational& hi, Averaging kind,
                        const std::vector<int>& n_list, int workers) {
  if (!(lo > 0 && hi > lo)) throw UsageError("Maharam interval must satisfy 0 < lo < hi");
  MaharamAction m(action);
  return nested_averages(action->group(), kind, n_list, workers, [&](const Element& g) { return m.return_mass(g, base, lo, hi); });
}

// ---------------------------------------------------------------------------

std::size_t TruncationReport::violations() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const TruncationCheck& c) { return !c.pass; }));
}

TruncationReport truncation_audit(const RosinskiKernel& kernel, const Rational& delta, const Rational& eps, const std::vector<Rational>& L_list,
                                  const Rational& K, const std::vector<Element>& probes) {
  const NonsingularAction& a = *kernel.action();
  const MeasureSpace& s = *a.space();
  if (!s.finite() || s.total_mass() != 1) throw UsageError("truncation audit needs a probability space; " + s.name() + " is not one");
  if (delta <= 0 || delta > 1) throw UsageError("delta must lie in (0, 1]");
  if (eps <= 0) throw UsageError("eps must be positive");
  const Alpha& alpha = kernel.alpha();
  const auto& fe = kernel.f_e().entries();
  for (const auto& [c, v] : fe)
    if (abs(v) > K) throw UsageError("K must bound |f_e|; found value " + format_rational(v));
  const Region whole = s.cells(0);
  const Scalar eps_s(eps);
  const Scalar k_alpha = Scalar(K).abs_pow(alpha);

  TruncationReport report;
  for (const auto& L : L_list) {
    if (L <= 1) throw UsageError("truncation level L must exceed 1");
    const Scalar Ls(L);
    // Unbounded part u = f 1(|f| > L).
    std::vector<std::pair<Cell, Rational>> u_entries;
    Scalar tail_integral = 0;
    for (const auto& [c, v] : fe)
      if (abs(v) > L) {
        u_entries.emplace_back(c, v);
        tail_integral += Scalar(v).abs_pow(alpha) * Scalar(s.mass(c));
      }
    std::optional<RosinskiKernel> u_kernel;
    if (!u_entries.empty()) u_kernel.emplace(kernel.action(), RationalFunction(a.space(), u_entries), alpha);

    for (const auto& g : probes) {
      const std::string gname = format_element(g);
      // Tail bound.
      {
        Scalar lhs = 0;
        if (u_kernel) {
          const KernelFunction ug = u_kernel->f(g);
          for (const auto& [c, v] : ug.entries())
            if (v.abs_alpha > eps_s / Scalar(2)) lhs += Scalar(s.mass(c));
        }
        Scalar rhs = Scalar(2) / eps_s * tail_integral;
        report.checks.push_back({"tail", gname, L, lhs, rhs, scalar_le(lhs, rhs), ""});
      }
      auto pieces = pullback(a, g, kernel.f_e().support());
      // Radon-Nikodym bound, meaningful once L > K^alpha / eps.
      if (k_alpha / eps_s < Ls) {
        Scalar lhs = 0;
        for (const auto& p : pieces) {
          Scalar b = Scalar(p.rn) * Scalar(fe[p.target].second).abs_pow(alpha);
          if (b > eps_s && (p.rn * L < 1 || p.rn > L)) lhs += Scalar(s.mass(p.cell));
        }
        Rational markov = 0;
        const RationalFunction wg = rn_function(a, g, whole);
        for (const auto& [c, w] : wg.entries())
          if (w > L) markov += s.mass(c);
        Scalar rhs = Scalar(Rational(1) / L);
        bool ok = scalar_le(lhs, Scalar(markov)) && markov * L <= 1;
        report.checks.push_back({"radon-nikodym", gname, L, lhs, rhs, ok, "mu(w_g > L) = " + format_rational(markov)});
      }
      // Final inequality on the Maharam extension.
      {
        Scalar lhs = 0, rhs = 0;
        const Scalar d(delta);
        const Region support = normalize(s, kernel.f_e().support());
        for (const auto& p : pieces) {
          const Scalar w(p.rn);
          const Scalar b = w * Scalar(fe[p.target].second).abs_pow(alpha);  // |f o phi_g|^a w_g
          for (const auto& x : intersect(s, Region{p.cell}, support)) {
            const Rational* fx = kernel.f_e().at(x);
            if (!fx || *fx == 0) continue;
            const Scalar av = Scalar(*fx).abs_pow(alpha);  // |f(x)|^a
            const Scalar mx(s.mass(x));
            bool in_a = av >= d && av * d <= Scalar(1);
            if (in_a && p.rn * L >= 1 && p.rn <= L && b > eps_s) lhs += mx;
            // y-range: delta/2 <= av/y <= 2/delta, b/y > eps/2, 1/(2L) <= y/w <= 2L.
            Scalar lo = smax(av * d / Scalar(2), w / (Scalar(2) * Ls));
            Scalar hi = smin(smin(Scalar(2) * av / d, Scalar(2) * b / eps_s), Scalar(2) * Ls * w);
            if (hi > lo) rhs += mx * (hi - lo);
          }
        }
        Scalar scaled = Scalar(Rational(3, 2)) * lhs;
        report.checks.push_back({"final", gname, L, scaled, rhs, scalar_le(scaled, rhs), ""});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

FmixResult f_mixing_empirical(const FieldSpec& field, const Interval& a, const Interval& b, const std::vector<Element>& g_tuple, Averaging kind,
                              const std::vector<int>& n_list, std::size_t replicates, int workers) {
  if (g_tuple.empty() || g_tuple.size() > 2) throw UsageError("F-mixing estimator supports tuples of length 1 or 2");
  if (replicates < 1000) throw UsageError("F-mixing estimator needs at least 1000 replicates");
  if (n_list.empty()) throw UsageError("empty n list");
  const GroupSpec& spec = field.kernel.action()->group();
  std::vector<int> ns = n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  auto hs = averaging_set(spec, kind, ns.back());

  // Joint index set: the g_i and every h g_i.
  FieldSpec joint = field;
  joint.index_set.clear();
  std::unordered_map<Key, std::size_t, KeyHash> slot;
  auto index_of = [&](const Element& x) {
    auto [it, fresh] = slot.emplace(x.data, joint.index_set.size());
    if (fresh) joint.index_set.push_back(x);
    return it->second;
  };
  std::vector<std::size_t> base_slots;
  for (const auto& g : g_tuple) base_slots.push_back(index_of(g));
  std::vector<std::vector<std::size_t>> h_slots;
  for (const auto& h : hs) {
    std::vector<std::size_t> v;
    for (const auto& g : g_tuple) v.push_back(index_of(mul(h, g)));
    h_slots.push_back(std::move(v));
  }

  const bool trivial = a.whole() || b.whole();
  std::vector<double> est(hs.size(), 0.0), se(hs.size(), 0.0);
  if (!trivial) {
    LepageSampler sampler(joint);
    auto rows = sampler.replicates(replicates, workers);
    const double R = static_cast<double>(replicates);
    std::vector<char> in_b(replicates);
    double nb = 0;
    for (std::size_t r = 0; r < replicates; ++r) {
      bool ok = true;
      for (auto sidx : base_slots) ok = ok && b.contains(rows[r][sidx]);
      in_b[r] = ok;
      nb += ok;
    }
    const double pb = nb / R;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      double na = 0, nab = 0;
      for (std::size_t r = 0; r < replicates; ++r) {
        bool ok = true;
        for (auto sidx : h_slots[i]) ok = ok && a.contains(rows[r][sidx]);
        na += ok;
        nab += ok && in_b[r];
      }
      const double pa = na / R, pab = nab / R;
      est[i] = pab - pa * pb;
      se[i] = std::sqrt((pab * (1 - pab) + pb * pb * pa * (1 - pa) + pa * pa * pb * (1 - pb)) / R);
    }
  }

  FmixResult out;
  for (int n : ns) {
    double sum = 0, sum_se = 0;
    long count = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      if (!averaging_contains(spec, kind, n, hs[i])) continue;
      sum += std::fabs(est[i]);
      sum_se += se[i];
      ++count;
      out.cells.push_back({n, format_element(hs[i]), est[i], se[i]});
    }
    DecayRow row{n, sum / static_cast<double>(count), std::nullopt, sum_se / static_cast<double>(count)};
    if (trivial) row.exact = Rational(0);
    out.table.rows.push_back(row);
  }
  bool noise_only = !trivial && std::all_of(out.table.rows.begin(), out.table.rows.end(), [](const DecayRow& r) { return r.value <= 3.0 * *r.se; });
  out.table.verdict = noise_only ? Verdict::Inconclusive : decay_verdict(out.table.rows);
  if (noise_only) out.table.rule = std::string(kDecayRule) + "; inconclusive when every value is within 3 SE of zero";
  if (trivial) out.table.verdict = Verdict::Decays;
  return out;
}

// ---------------------------------------------------------------------------

DensityCertificate density_zero_extract(const std::function<double(const Element&)>& psi, const GroupSpec& spec, Averaging kind, int n_max) {
  if (n_max < 1) throw UsageError("density extraction needs n_max >= 1");
  auto elems = averaging_set(spec, kind, n_max);
  const std::size_t count = elems.size();
  std::vector<int> level(count);
  std::vector<double> value(count);
  for (std::size_t i = 0; i < count; ++i) {
    int n = 0;
    while (!averaging_contains(spec, kind, n, elems[i])) ++n;
    level[i] = n;
    value[i] = psi(elems[i]);
    if (!(value[i] >= 0) || !std::isfinite(value[i])) throw UsageError("psi must be finite and non-negative");
  }
  std::vector<long> size_at(static_cast<std::size_t>(n_max) + 1, 0);
  for (int l : level) ++size_at[static_cast<std::size_t>(l)];
  for (int n = 1; n <= n_max; ++n) size_at[static_cast<std::size_t>(n)] += size_at[static_cast<std::size_t>(n - 1)];

  // Smallest n >= from such that E_{1/m} has density <= 1/m on every F_n', n <= n' <= n_max.
  auto settle = [&](int m, int from) -> std::optional<int> {
    std::vector<long> hits(static_cast<std::size_t>(n_max) + 1, 0);
    for (std::size_t i = 0; i < count; ++i)
      if (value[i] * m >= 1.0) ++hits[static_cast<std::size_t>(level[i])];
    for (int n = 1; n <= n_max; ++n) hits[static_cast<std::size_t>(n)] += hits[static_cast<std::size_t>(n - 1)];
    std::optional<int> best;
    for (int n = n_max; n >= from; --n) {
      if (hits[static_cast<std::size_t>(n)] * m > size_at[static_cast<std::size_t>(n)]) break;
      best = n;
    }
    return best;
  };

  // Window m covers levels (N_m, N_{m+1}] and keeps the elements with psi >= 1/m.
  DensityCertificate cert;
  std::vector<char> in_e(count, 0);
  int lower = -1;
  for (int m = 1; lower < n_max; ++m) {
    auto next = settle(m + 1, lower + 1);
    int upper = next ? *next : n_max;
    for (std::size_t i = 0; i < count; ++i)
      if (level[i] > lower && level[i] <= upper && value[i] * m >= 1.0) in_e[i] = 1;
    cert.windows.push_back(upper);
    lower = upper;
  }
  for (std::size_t i = 0; i < count; ++i)
    if (in_e[i]) cert.set.push_back(elems[i]);
  for (int n = 1; n <= n_max; ++n) {
    long in = 0;
    double sup = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (level[i] > n) continue;
      if (in_e[i])
        ++in;
      else if (level[i] == n)
        sup = std::max(sup, value[i]);
    }
    cert.rows.push_back({n, Rational(in, size_at[static_cast<std::size_t>(n)]), sup});
  }
  return cert;
}

// ---------------------------------------------------------------------------

Region neveu_reference_base(const NonsingularAction& a) {
  const MeasureSpace& s = *a.space();
  if (s.finite()) return s.cells(0);
  return {Cell(static_cast<std::size_t>(dynamic_cast<const DiscreteSpace&>(s).dimension()), 0)};
}

NeveuResult neveu_classify(const ActionPtr& action, int horizon, int workers) {
  if (horizon < 2) throw UsageError("Neveu horizon must be >= 2");
  const Region base = neveu_reference_base(*action);
  const Rational lo(1, 2), hi(2);
  const Rational nu_e = measure(*action->space(), base) * (hi - lo);
  std::vector<int> ns;
  for (int n = 1; n <= horizon; ++n) ns.push_back(n);
  NeveuResult out;
  out.averages = mpns_average(action, base, lo, hi, default_averaging(action->group()), ns, workers);
  for (auto& row : out.averages.rows) {
    row.exact = *row.exact / nu_e;
    row.value = to_double(*row.exact);
  }
  out.averages.verdict = decay_verdict(out.averages.rows);
  const auto& rows = out.averages.rows;
  double last = rows.back().value;
  double lo_half = 1e300, hi_half = 0;
  for (std::size_t i = rows.size() / 2; i < rows.size(); ++i) {
    lo_half = std::min(lo_half, rows[i].value);
    hi_half = std::max(hi_half, rows[i].value);
  }
  if (last < 1.0 / horizon)
    out.verdict = NeveuVerdict::NullEvidence;
  else if (lo_half >= 0.25 && hi_half - lo_half <= 0.1 * hi_half)
    out.verdict = NeveuVerdict::PositiveEvidence;
  else
    out.verdict = NeveuVerdict::Inconclusive;
  return out;
}

}  // namespace stf

#include "stf/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stf/parallel.hpp"

namespace stf {

namespace {

void require_free(const Element& g) {
  if (g.spec.kind != GroupKind::Free) throw UsageError("boundary computations need a free group element, got " + g.spec.name());
}

Cell prefix(const Cell& w, std::size_t n) { return Cell(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(std::min(n, w.size()))); }

Rational weight(int k, int p) { return pow_int(Rational(2 * k - 1), 2 * p); }

// Cylinders covering g C_u (g acts by left multiplication).
void translate_cell(const Element& g, const Cell& u, const BoundarySpace& s, std::vector<Cell>& out) {
  // g C_u = phi_{g^{-1}} C_u, a single cylinder unless u is a prefix of g^{-1}.
  Key h = free_group::inverse(g.data);
  if (h.empty() || !free_group::is_prefix(u, h)) {
    out.push_back(free_group::multiply(g.data, u));
    return;
  }
  for (const auto& c : s.children(u)) translate_cell(g, c, s, out);
}

void bms_pair(int k, const BoundarySpace& s, const Cell& u, const Cell& v, int max_depth, Rational& total) {
  if (diverging(u, v)) {
    total += weight(k, free_group::common_prefix(u, v)) * s.mass(u) * s.mass(v);
    return;
  }
  if (static_cast<int>(std::max(u.size(), v.size())) >= max_depth)
    throw ResourceError("BMS refinement toward the diagonal exceeds the depth cap (" + std::to_string(max_depth) + ")");
  if (u.size() < v.size()) {
    for (const auto& c : s.children(u)) bms_pair(k, s, c, v, max_depth, total);
  } else if (v.size() < u.size()) {
    for (const auto& c : s.children(v)) bms_pair(k, s, u, c, max_depth, total);
  } else {
    for (const auto& a : s.children(u))
      for (const auto& b : s.children(v)) bms_pair(k, s, a, b, max_depth, total);
  }
}

std::optional<Cell> cylinder_meet(const Cell& a, const Cell& b) {
  if (free_group::is_prefix(a, b)) return b;
  if (free_group::is_prefix(b, a)) return a;
  return std::nullopt;
}

}  // namespace

int busemann(const Element& g, const Cell& w) {
  require_free(g);
  if (w.size() < g.data.size() && free_group::is_prefix(w, g.data))
    throw NotConstantError("Busemann function of " + format_element(g) + " is not constant on C_" + free_group::format_word(w));
  int m = free_group::common_prefix(w, g.data);
  return static_cast<int>(g.data.size()) - 2 * m;
}

std::vector<std::pair<Cell, int>> busemann_cells(const Element& g, const Cell& w) {
  require_free(g);
  BoundarySpace s(g.spec.rank);
  s.check(w);
  std::vector<std::pair<Cell, int>> out;
  std::vector<Cell> stack{w};
  while (!stack.empty()) {
    Cell c = std::move(stack.back());
    stack.pop_back();
    if (c.size() < g.data.size() && free_group::is_prefix(c, g.data)) {
      for (auto& child : s.children(c)) stack.push_back(std::move(child));
      continue;
    }
    int b = busemann(g, c);
    out.emplace_back(std::move(c), b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Rational rn_boundary(const Element& g, const Cell& w) { return pow_int(Rational(2 * g.spec.rank - 1), -busemann(g, w)); }

Rational prefix_shell_mass(int k, int length, int j) {
  if (j < 0 || j > length) throw UsageError("prefix shell index out of range");
  BoundarySpace s(k);
  if (j == length) return s.mass_at_depth(length);
  return s.mass_at_depth(j) - s.mass_at_depth(j + 1);
}

ASet a_set(const Element& g, const Rational& K) {
  require_free(g);
  if (K < 0) throw UsageError("K must be >= 0");
  const int k = g.spec.rank;
  const int len = static_cast<int>(g.data.size());
  BoundarySpace s(k);
  ASet out;
  out.mass = 0;
  for (int j = 0; j <= len; ++j) {
    int beta = len - 2 * j;
    if (Rational(std::abs(beta)) > K) continue;
    out.mass += prefix_shell_mass(k, len, j);
    Cell base = prefix(g.data, static_cast<std::size_t>(j));
    if (j == len) {
      out.region.push_back(base);
      continue;
    }
    for (auto& c : s.children(base))
      if (c.back() != g.data[static_cast<std::size_t>(j)]) out.region.push_back(std::move(c));
  }
  std::sort(out.region.begin(), out.region.end());
  return out;
}

std::vector<RadiusMass> a_set_decay(int k, const Rational& K, int radius_max, int workers, std::size_t cap) {
  GroupSpec spec = GroupSpec::free(k);
  std::vector<RadiusMass> rows;
  for (int r = 0; r <= radius_max; ++r) {
    auto sph = sphere(spec, r, cap);
    auto masses = parallel_map(sph.size(), workers, [&](std::size_t i) { return a_set(sph[i], K).mass; });
    Rational best = 0;
    for (const auto& m : masses) best = std::max(best, m);
    rows.push_back({r, best});
  }
  return rows;
}

Rational cond_suff_term(const Element& g, const Rational& K) {
  require_free(g);
  if (K <= 1) throw UsageError("cond-suff needs K > 1");
  const int k = g.spec.rank;
  const int len = static_cast<int>(g.data.size());
  const Rational lo = 1 / K;
  Rational total = 0;
  for (int j = 0; j <= len; ++j) {
    Rational w = pow_int(Rational(2 * k - 1), 2 * j - len);
    auto overlap = interval_overlap(lo, K, w * lo, Rational(w * K));
    if (*overlap == 0) continue;
    total += prefix_shell_mass(k, len, j) * *overlap;
  }
  return total;
}

Rational cond_suff_average(int k, const Rational& K, int m, int workers) {
  auto b = ball(GroupSpec::free(k), m);
  auto terms = parallel_map(b.size(), workers, [&](std::size_t i) { return cond_suff_term(b[i], K); });
  Rational total = 0;
  for (const auto& t : terms) total += t;
  return total / static_cast<long>(b.size());
}

bool diverging(const Cell& a, const Cell& b) { return !free_group::is_prefix(a, b) && !free_group::is_prefix(b, a); }

int gromov_product(const Cell& a, const Cell& b) {
  if (!diverging(a, b)) throw UsageError("Gromov product needs diverging cylinders; refine off the diagonal first");
  return free_group::common_prefix(a, b);
}

Rational bms_mass(const CylinderRect& rect, int max_depth) {
  BoundarySpace s(rect.k);
  Rational total = 0;
  for (const auto& [u, v] : rect.pairs) {
    s.check(u);
    s.check(v);
    bms_pair(rect.k, s, u, v, max_depth, total);
  }
  return total;
}

CylinderRect geodesics_through(int k, int r) {
  if (r < 0) throw UsageError("radius must be >= 0");
  BoundarySpace s(k);
  auto cells = s.cells(r + 1);
  CylinderRect rect{k, {}};
  for (const auto& u : cells)
    for (const auto& v : cells)
      if (u != v) rect.pairs.emplace_back(u, v);
  return rect;
}

CylinderRect translate_rect(const Element& g, const CylinderRect& rect) {
  require_free(g);
  if (g.spec.rank != rect.k) throw UsageError("rect and element come from different free groups");
  BoundarySpace s(rect.k);
  CylinderRect out{rect.k, {}};
  for (const auto& [u, v] : rect.pairs) {
    std::vector<Cell> us, vs;
    translate_cell(g, u, s, us);
    translate_cell(g, v, s, vs);
    for (const auto& a : us)
      for (const auto& b : vs) out.pairs.emplace_back(a, b);
  }
  return out;
}

CylinderRect intersect_rect(const CylinderRect& a, const CylinderRect& b) {
  if (a.k != b.k) throw UsageError("rects come from different free groups");
  CylinderRect out{a.k, {}};
  for (const auto& [u, v] : a.pairs)
    for (const auto& [x, y] : b.pairs) {
      auto p = cylinder_meet(u, x);
      if (!p) continue;
      auto q = cylinder_meet(v, y);
      if (!q) continue;
      out.pairs.emplace_back(std::move(*p), std::move(*q));
    }
  return out;
}

InvarianceReport bms_invariance_check(const Element& g, const CylinderRect& rect) {
  return {bms_mass(rect), bms_mass(translate_rect(g, rect))};
}

Rational cond_suff2_term(const Element& g, int r) {
  require_free(g);
  const int k = g.spec.rank;
  const std::size_t depth = static_cast<std::size_t>(r) + 1;
  BoundarySpace s(k);
  CylinderRect moved = translate_rect(g, geodesics_through(k, r));
  // Keep the parts of g Omega whose endpoints still have distinct depth-(r+1) prefixes.
  CylinderRect kept{k, {}};
  for (const auto& [u, v] : moved.pairs) {
    Region us = u.size() < depth ? refine(s, Region{u}, static_cast<int>(depth)) : Region{u};
    Region vs = v.size() < depth ? refine(s, Region{v}, static_cast<int>(depth)) : Region{v};
    for (const auto& a : us)
      for (const auto& b : vs)
        if (prefix(a, depth) != prefix(b, depth)) kept.pairs.emplace_back(a, b);
  }
  return bms_mass(kept);
}

Rational cond_suff2_average(int k, int r, int m, int workers) {
  auto b = ball(GroupSpec::free(k), m);
  auto terms = parallel_map(b.size(), workers, [&](std::size_t i) { return cond_suff2_term(b[i], r); });
  Rational total = 0;
  for (const auto& t : terms) total += t;
  return total / static_cast<long>(b.size());
}

Cell srw_boundary_sample(Rng& rng, int k, int depth) {
  if (k < 2) throw UsageError("free group rank must be >= 2");
  if (depth < 0) throw UsageError("depth must be >= 0");
  Cell w;
  w.reserve(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) {
    // Letters 1..k and -1..-k; the first step has 2k choices, later ones 2k-1.
    std::int64_t l;
    if (w.empty()) {
      auto x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * k)));
      l = x < k ? x + 1 : -(x - k + 1);
    } else {
      do {
        auto x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * k)));
        l = x < k ? x + 1 : -(x - k + 1);
      } while (l == -w.back());
    }
    w.push_back(l);
  }
  return w;
}

HittingReport hitting_vs_ps(std::uint64_t seed, int k, int depth, std::size_t n_samples, int workers) {
  if (depth < 1 || depth > 8) throw UsageError("hitting test depth must lie in 1..8");
  if (n_samples < 1000) throw UsageError("hitting test needs at least 1000 samples");
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n_samples + kChunk - 1) / kChunk;
  auto partial = parallel_map(chunks, workers, [&](std::size_t c) {
    Rng rng(seed, Stream::Walk, c);
    std::map<Cell, std::size_t> counts;
    std::size_t end = std::min(n_samples, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      Cell w = srw_boundary_sample(rng, k, depth);
      for (int d = 1; d <= depth; ++d) ++counts[prefix(w, static_cast<std::size_t>(d))];
    }
    return counts;
  });
  std::map<Cell, std::size_t> counts;
  for (const auto& p : partial)
    for (const auto& [c, n] : p) counts[c] += n;

  BoundarySpace s(k);
  HittingReport report;
  const double n = static_cast<double>(n_samples);
  for (int d = 1; d <= depth; ++d) {
    for (const auto& c : s.cells(d)) {
      HittingRow row;
      row.cylinder = c;
      row.expected = s.mass(c);
      double p = to_double(row.expected);
      auto it = counts.find(c);
      row.frequency = it == counts.end() ? 0.0 : static_cast<double>(it->second) / n;
      row.se = std::sqrt(p * (1 - p) / n);
      double dev = std::fabs(row.frequency - p);
      row.z = dev / row.se;
      report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
      report.max_z = std::max(report.max_z, row.z);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace stf

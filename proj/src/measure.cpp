#include "stf/measure.hpp"

#include <algorithm>
#include <sstream>

namespace stf {

Relation MeasureSpace::relate(const Cell& a, const Cell& b) const {
  if (a == b) return Relation::Equal;
  if (depth(a) < depth(b)) {
    auto anc = ancestors(b);
    if (std::find(anc.begin(), anc.end(), a) != anc.end()) return Relation::Contains;
  } else if (depth(a) > depth(b)) {
    auto anc = ancestors(a);
    if (std::find(anc.begin(), anc.end(), b) != anc.end()) return Relation::Within;
  }
  return Relation::Disjoint;
}

void MeasureSpace::check(const Cell& c) const {
  if (!valid(c)) throw UsageError("invalid cell " + format_cell(c) + " for " + name());
}

// ---------------------------------------------------------------------------

std::shared_ptr<DiscreteSpace> DiscreteSpace::weighted(std::vector<Rational> weights) {
  std::vector<std::pair<Cell, Rational>> pts;
  for (std::size_t i = 0; i < weights.size(); ++i) pts.push_back({Cell{static_cast<std::int64_t>(i)}, weights[i]});
  return keyed(std::move(pts));
}

std::shared_ptr<DiscreteSpace> DiscreteSpace::uniform(std::size_t n) {
  if (n == 0) throw UsageError("uniform space needs at least one point");
  return weighted(std::vector<Rational>(n, Rational(1, static_cast<long>(n))));
}

std::shared_ptr<DiscreteSpace> DiscreteSpace::keyed(std::vector<std::pair<Cell, Rational>> points) {
  if (points.empty()) throw UsageError("discrete space needs at least one point");
  std::shared_ptr<DiscreteSpace> s(new DiscreteSpace());
  s->dim_ = static_cast<int>(points.front().first.size());
  for (auto& [c, w] : points) {
    if (w <= 0) throw UsageError("discrete weights must be positive");
    if (static_cast<int>(c.size()) != s->dim_) throw UsageError("discrete point keys must share one length");
    if (!s->weights_.emplace(c, w).second) throw UsageError("duplicate discrete point");
    s->order_.push_back(c);
    s->total_ += w;
  }
  return s;
}

std::shared_ptr<DiscreteSpace> DiscreteSpace::counting(int d) {
  if (d < 1) throw UsageError("counting measure dimension must be >= 1");
  std::shared_ptr<DiscreteSpace> s(new DiscreteSpace());
  s->counting_ = true;
  s->dim_ = d;
  return s;
}

std::string DiscreteSpace::name() const {
  if (counting_) return "counting(Z^" + std::to_string(dim_) + ")";
  return "discrete(" + std::to_string(order_.size()) + " points)";
}

Rational DiscreteSpace::total_mass() const {
  if (counting_) throw ResourceError("counting measure on Z^" + std::to_string(dim_) + " has infinite total mass");
  return total_;
}

Rational DiscreteSpace::mass(const Cell& c) const {
  if (counting_) {
    check(c);
    return 1;
  }
  auto it = weights_.find(c);
  if (it == weights_.end()) throw UsageError("point " + format_cell(c) + " is not in " + name());
  return it->second;
}

bool DiscreteSpace::valid(const Cell& c) const {
  if (counting_) return static_cast<int>(c.size()) == dim_;
  return weights_.count(c) > 0;
}

std::vector<Cell> DiscreteSpace::cells(int, std::size_t cap) const {
  if (counting_) throw ResourceError("cannot enumerate the infinite space " + name());
  if (order_.size() > cap) throw ResourceError("discrete space exceeds the enumeration cap");
  return order_;
}

std::string DiscreteSpace::format_cell(const Cell& c) const {
  if (c.size() == 1) return std::to_string(c[0]);
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

Cell DiscreteSpace::parse_cell(std::string_view text) const {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](char ch) { return ch == ' ' || ch == '(' || ch == ')'; }), s.end());
  Cell c;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      c.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw UsageError("");
    } catch (const std::exception&) {
      throw UsageError("malformed point '" + std::string(text) + "'");
    }
  }
  if (!valid(c)) throw UsageError("point '" + std::string(text) + "' is not in " + name());
  return c;
}

// ---------------------------------------------------------------------------

BoundarySpace::BoundarySpace(int k) : k_(k) {
  if (k < 2) throw UsageError("free group rank must be >= 2");
}

std::string BoundarySpace::name() const { return "boundary(F_" + std::to_string(k_) + ")"; }

Rational BoundarySpace::mass_at_depth(int length) const {
  if (length == 0) return 1;
  return Rational(1, 2 * k_) / pow_int(Rational(2 * k_ - 1), length - 1);
}

Rational BoundarySpace::mass(const Cell& c) const {
  check(c);
  return mass_at_depth(static_cast<int>(c.size()));
}

bool BoundarySpace::valid(const Cell& c) const {
  for (auto l : c)
    if (l == 0 || l > k_ || l < -k_) return false;
  return free_group::is_reduced(c);
}

std::vector<Cell> BoundarySpace::children(const Cell& c) const {
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(2 * k_));
  for (auto l : free_group::letters(k_)) {
    if (!c.empty() && c.back() == -l) continue;
    Cell x = c;
    x.push_back(l);
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Cell> BoundarySpace::ancestors(const Cell& c) const {
  std::vector<Cell> out;
  out.reserve(c.size() + 1);
  for (std::size_t n = c.size() + 1; n-- > 0;) out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

std::vector<Cell> BoundarySpace::cells(int depth, std::size_t cap) const {
  if (depth < 0) throw UsageError("depth must be >= 0");
  return [&] {
    std::vector<Cell> out;
    for (auto& e : sphere(GroupSpec::free(k_), depth, cap)) out.push_back(std::move(e.data));
    return out;
  }();
}

std::string BoundarySpace::format_cell(const Cell& c) const { return free_group::format_word(c); }

Cell BoundarySpace::parse_cell(std::string_view text) const {
  std::string_view s = text;
  if (s == "boundary" || s == "all") return {};
  return free_group::parse_word(k_, s);
}

// ---------------------------------------------------------------------------
// Region algebra

Region normalize(const MeasureSpace& s, Region r) {
  for (const auto& c : r) s.check(c);
  std::sort(r.begin(), r.end(), [&](const Cell& a, const Cell& b) {
    int da = s.depth(a), db = s.depth(b);
    return da != db ? da < db : a < b;
  });
  r.erase(std::unique(r.begin(), r.end()), r.end());
  // Shallow cells come first, so a cell is dropped when any ancestor was kept.
  std::unordered_set<Cell, KeyHash> kept;
  Region out;
  for (auto& c : r) {
    bool covered = false;
    auto anc = s.ancestors(c);
    for (std::size_t i = 1; i < anc.size() && !covered; ++i) covered = kept.count(anc[i]) > 0;
    if (covered) continue;
    kept.insert(c);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Region coarsen(const MeasureSpace& s, Region r) {
  r = normalize(s, std::move(r));
  if (s.atomic()) return r;
  for (bool changed = true; changed;) {
    changed = false;
    std::unordered_set<Cell, KeyHash> present(r.begin(), r.end());
    std::unordered_set<Cell, KeyHash> parents;
    for (const auto& c : r) {
      if (s.depth(c) == 0) continue;
      auto anc = s.ancestors(c);
      const Cell& parent = anc[1];
      if (parents.count(parent)) continue;
      auto kids = s.children(parent);
      if (std::all_of(kids.begin(), kids.end(), [&](const Cell& k) { return present.count(k) > 0; })) parents.insert(parent);
    }
    if (!parents.empty()) {
      changed = true;
      r.insert(r.end(), parents.begin(), parents.end());
      r = normalize(s, std::move(r));
    }
  }
  return r;
}

Region intersect(const MeasureSpace& s, const Region& a, const Region& b) {
  std::unordered_set<Cell, KeyHash> aset(a.begin(), a.end()), bset(b.begin(), b.end());
  Region out;
  // a-cells inside (or equal to) some b-cell, then b-cells strictly inside some a-cell.
  for (const auto& c : a)
    for (const auto& anc : s.ancestors(c))
      if (bset.count(anc)) {
        out.push_back(c);
        break;
      }
  for (const auto& c : b) {
    auto anc = s.ancestors(c);
    for (std::size_t i = 1; i < anc.size(); ++i)
      if (aset.count(anc[i])) {
        out.push_back(c);
        break;
      }
  }
  return normalize(s, std::move(out));
}

namespace {

void subtract_into(const MeasureSpace& s, const Cell& c, const std::unordered_set<Cell, KeyHash>& bset,
                   const std::unordered_set<Cell, KeyHash>& b_interior, Region& out) {
  for (const auto& anc : s.ancestors(c))
    if (bset.count(anc)) return;
  if (!b_interior.count(c)) {
    out.push_back(c);
    return;
  }
  for (const auto& child : s.children(c)) subtract_into(s, child, bset, b_interior, out);
}

}  // namespace

Region subtract(const MeasureSpace& s, const Region& a, const Region& b) {
  std::unordered_set<Cell, KeyHash> bset(b.begin(), b.end()), interior;
  for (const auto& c : b) {
    auto anc = s.ancestors(c);
    for (std::size_t i = 1; i < anc.size(); ++i) interior.insert(anc[i]);
  }
  Region out;
  for (const auto& c : normalize(s, a)) subtract_into(s, c, bset, interior, out);
  return normalize(s, std::move(out));
}

Region unite(const MeasureSpace& s, const Region& a, const Region& b) {
  Region out = a;
  out.insert(out.end(), b.begin(), b.end());
  return normalize(s, std::move(out));
}

Rational measure(const MeasureSpace& s, const Region& r) {
  Rational total = 0;
  for (const auto& c : normalize(s, r)) total += s.mass(c);
  return total;
}

Region refine(const MeasureSpace& s, const Region& r, int depth) {
  Region out;
  std::vector<Cell> stack;
  for (const auto& c : normalize(s, r)) {
    if (s.depth(c) > depth) throw UsageError("refine target depth " + std::to_string(depth) + " is shallower than cell " + s.format_cell(c));
    stack.push_back(c);
    while (!stack.empty()) {
      Cell x = std::move(stack.back());
      stack.pop_back();
      if (s.atomic() || s.depth(x) == depth) {
        out.push_back(std::move(x));
        continue;
      }
      for (auto& child : s.children(x)) stack.push_back(std::move(child));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool disjoint(const MeasureSpace& s, const Region& a, const Region& b) { return intersect(s, a, b).empty(); }

Region common_partition(const MeasureSpace& s, const std::vector<Region>& regions) {
  Region all;
  std::unordered_set<Cell, KeyHash> interior;
  for (const auto& r : regions)
    for (const auto& c : r) {
      all.push_back(c);
      auto anc = s.ancestors(c);
      for (std::size_t i = 1; i < anc.size(); ++i) interior.insert(anc[i]);
    }
  Region out;
  std::vector<Cell> stack;
  for (auto& c : normalize(s, std::move(all))) {
    stack.push_back(std::move(c));
    while (!stack.empty()) {
      Cell x = std::move(stack.back());
      stack.pop_back();
      if (!interior.count(x)) {
        out.push_back(std::move(x));
        continue;
      }
      for (auto& child : s.children(x)) stack.push_back(std::move(child));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

RationalFunction indicator(SpacePtr space, const Region& r, const Rational& value) {
  std::vector<std::pair<Cell, Rational>> entries;
  for (auto& c : normalize(*space, r)) entries.emplace_back(std::move(c), value);
  return RationalFunction(std::move(space), std::move(entries));
}

RationalFunction refine(const RationalFunction& f, int depth) {
  std::vector<std::pair<Cell, Rational>> entries;
  for (const auto& [c, v] : f.entries())
    for (auto& x : refine(*f.space(), Region{c}, depth)) entries.emplace_back(std::move(x), v);
  return RationalFunction(f.space(), std::move(entries));
}

Scalar lp_norm_pow(const RationalFunction& f, const Alpha& alpha) {
  Scalar total = 0;
  for (const auto& [c, v] : f.entries()) total += Scalar(v).abs_pow(alpha) * Scalar(f.space()->mass(c));
  return total;
}

Scalar lp_norm(const RationalFunction& f, const Alpha& alpha) { return lp_norm_pow(f, alpha).abs_root(alpha); }

std::optional<Rational> interval_overlap(const Rational& a_lo, const std::optional<Rational>& a_hi, const Rational& b_lo,
                                         const std::optional<Rational>& b_hi) {
  Rational lo = std::max(a_lo, b_lo);
  std::optional<Rational> hi;
  if (a_hi && b_hi)
    hi = std::min(*a_hi, *b_hi);
  else if (a_hi)
    hi = a_hi;
  else if (b_hi)
    hi = b_hi;
  if (!hi) return std::nullopt;
  return *hi > lo ? Rational(*hi - lo) : Rational(0);
}

std::optional<Rational> product_cell_mass(const MeasureSpace& s, const ProductCell& cell) {
  if (cell.lo < 0 || (cell.hi && *cell.hi <= cell.lo)) throw UsageError("product cell interval must satisfy 0 <= lo < hi");
  Rational base = measure(s, cell.base);
  if (base == 0) return Rational(0);
  if (!cell.hi) return std::nullopt;
  return Rational(base * (*cell.hi - cell.lo));
}

}  // namespace stf

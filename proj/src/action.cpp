#include "stf/action.hpp"

#include <functional>

namespace stf {

std::string to_string(GroundTruth t) { return t == GroundTruth::Null ? "null" : "positive"; }

void NonsingularAction::require(const Element& g) const {
  if (!(g.spec == group_)) throw UsageError("element of " + g.spec.name() + " used with an action of " + group_.name());
}

namespace {

void resolve_into(const NonsingularAction& a, const Element& g, const Cell& c, Region& out, std::size_t cap) {
  if (a.resolved(g, c)) {
    out.push_back(c);
    if (out.size() > cap) throw ResourceError("refinement cap (" + std::to_string(cap) + " cells) exceeded while resolving " + format_element(g));
    return;
  }
  const MeasureSpace& s = *a.space();
  if (s.atomic()) throw UsageError(a.name() + ": atomic cell " + s.format_cell(c) + " is not resolved");
  for (const auto& child : s.children(c)) resolve_into(a, g, child, out, cap);
}

}  // namespace

Region resolve(const NonsingularAction& a, const Element& g, const Cell& c, std::size_t cap) {
  Region out;
  resolve_into(a, g, c, out, cap);
  return out;
}

std::vector<Piece> pullback(const NonsingularAction& a, const Element& g, const Region& target, std::size_t cap) {
  const Element gi = inv(g);
  std::vector<Piece> out;
  for (std::size_t i = 0; i < target.size(); ++i) {
    a.space()->check(target[i]);
    for (const auto& b : resolve(a, gi, target[i], cap)) {
      Cell x = a.apply(gi, b);
      for (auto& piece : resolve(a, g, x, cap)) {
        Cell img = a.apply(g, piece);
        Rational w = a.rn(g, piece);
        int sg = a.sign(g, piece);
        out.push_back(Piece{std::move(piece), std::move(img), i, std::move(w), sg});
        if (out.size() > cap) throw ResourceError("pullback exceeds the refinement cap (" + std::to_string(cap) + ")");
      }
    }
  }
  return out;
}

Region image(const NonsingularAction& a, const Element& g, const Region& r) {
  Region out;
  for (const auto& c : r)
    for (const auto& piece : resolve(a, g, c)) out.push_back(a.apply(g, piece));
  return normalize(*a.space(), std::move(out));
}

RationalFunction rn_function(const NonsingularAction& a, const Element& g, const Region& domain) {
  std::vector<std::pair<Cell, Rational>> entries;
  for (const auto& c : normalize(*a.space(), domain))
    for (auto& piece : resolve(a, g, c)) {
      Rational w = a.rn(g, piece);
      entries.emplace_back(std::move(piece), std::move(w));
    }
  return RationalFunction(a.space(), std::move(entries));
}

RationalFunction sign_function(const NonsingularAction& a, const Element& g, const Region& domain) {
  std::vector<std::pair<Cell, Rational>> entries;
  for (const auto& c : normalize(*a.space(), domain))
    for (auto& piece : resolve(a, g, c)) {
      int sg = a.sign(g, piece);
      entries.emplace_back(std::move(piece), Rational(sg));
    }
  return RationalFunction(a.space(), std::move(entries));
}

// ---------------------------------------------------------------------------

RosinskiKernel::RosinskiKernel(ActionPtr action, RationalFunction f_e, Alpha alpha)
    : action_(std::move(action)), f_e_(std::move(f_e)), alpha_(alpha) {
  if (!action_) throw UsageError("kernel without an action");
  if (f_e_.space() != action_->space()) throw UsageError("f_e lives on a different measure space than the action");
  if (!(alpha_.value() > 0.0 && alpha_.value() <= 2.0)) throw UsageError("alpha must lie in (0, 2]");
}

KernelFunction RosinskiKernel::f(const Element& g, std::size_t cap) const {
  std::vector<std::pair<Cell, KernelValue>> entries;
  const auto& fe = f_e_.entries();
  for (auto& p : pullback(*action_, g, f_e_.support(), cap)) {
    const Rational& v = fe[p.target].second;
    if (v == 0) continue;
    Scalar w(p.rn);
    Scalar value = w.abs_root(alpha_) * Scalar(v);
    if (p.sign < 0) value = -value;
    Scalar abs_alpha = w * Scalar(v).abs_pow(alpha_);
    entries.emplace_back(std::move(p.cell), KernelValue{value, abs_alpha});
  }
  return KernelFunction(action_->space(), std::move(entries));
}

bool RosinskiKernel::covers(const std::vector<Element>& gs, const Region& domain) const {
  Region uni;
  for (const auto& g : gs) {
    auto s = f(g).support();
    uni.insert(uni.end(), s.begin(), s.end());
  }
  const MeasureSpace& sp = *action_->space();
  return subtract(sp, domain, normalize(sp, uni)).empty();
}

Scalar lp_norm_pow(const KernelFunction& f) {
  Scalar total = 0;
  for (const auto& [c, v] : f.entries()) total += v.abs_alpha * Scalar(f.space()->mass(c));
  return total;
}

Scalar lp_norm(const KernelFunction& f, const Alpha& alpha) { return lp_norm_pow(f).abs_root(alpha); }

// ---------------------------------------------------------------------------

MaharamCell MaharamAction::apply_star(const Element& g, const MaharamCell& cell) const {
  if (!base_->resolved(g, cell.base)) throw UsageError("apply_star needs a base cell on which w_g is constant; refine first");
  Rational w = base_->rn(g, cell.base);
  MaharamCell out{base_->apply(g, cell.base), cell.lo / w, std::nullopt};
  if (cell.hi) out.hi = Rational(*cell.hi / w);
  return out;
}

std::optional<Rational> MaharamAction::mass(const MaharamCell& cell) const {
  return product_cell_mass(*base_->space(), ProductCell{{cell.base}, cell.lo, cell.hi});
}

Rational MaharamAction::return_mass(const Element& g, const Region& base, const Rational& lo, const std::optional<Rational>& hi) const {
  const MeasureSpace& s = *base_->space();
  Region b = normalize(s, base);
  Rational total = 0;
  for (const auto& p : pullback(*base_, g, b)) {
    std::optional<Rational> whi;
    if (hi) whi = Rational(p.rn * *hi);
    auto overlap = interval_overlap(lo, hi, p.rn * lo, whi);
    if (!overlap) throw ResourceError("Maharam return mass is infinite (unbounded y-interval)");
    if (*overlap == 0) continue;
    for (const auto& c : intersect(s, Region{p.cell}, b)) total += s.mass(c) * *overlap;
  }
  return total;
}

MaharamReport maharam_preservation_audit(const ActionPtr& a, const std::vector<Element>& gs, const Region& domain,
                                         const std::vector<YInterval>& intervals) {
  const MeasureSpace& s = *a->space();
  MaharamAction m(a);
  MaharamReport report;
  for (const auto& g : gs)
    for (const auto& c : domain)
      for (const auto& [lo, hi] : intervals) {
        for (const auto& piece : resolve(*a, g, c)) {
          MaharamCell before{piece, lo, hi};
          auto mb = m.mass(before);
          auto ma = m.mass(m.apply_star(g, before));
          ++report.checks;
          if (mb != ma) {
            std::string iv = "(" + format_rational(lo) + ", " + (hi ? format_rational(*hi) : std::string("inf")) + ")";
            report.violations.push_back({format_element(g), s.format_cell(piece), iv, mb, ma});
          }
        }
      }
  return report;
}

bool check_weakly_wandering(const NonsingularAction& a, const Region& w, const std::vector<Element>& l) {
  const MeasureSpace& s = *a.space();
  if (measure(s, w) <= 0) throw UsageError("weakly wandering check needs a set of positive measure");
  std::vector<Region> images;
  images.reserve(l.size());
  for (const auto& g : l) images.push_back(image(a, g, w));
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j)
      if (!disjoint(s, images[i], images[j])) return false;
  return true;
}

// ---------------------------------------------------------------------------

Region audit_domain(const NonsingularAction& a, int depth) {
  const auto* d = dynamic_cast<const DiscreteSpace*>(a.space().get());
  if (d && !d->finite()) {
    Region out;
    Cell v(static_cast<std::size_t>(d->dimension()), -depth);
    for (;;) {
      out.push_back(v);
      std::size_t i = 0;
      while (i < v.size() && v[i] == depth) v[i++] = -depth;
      if (i == v.size()) break;
      ++v[i];
    }
    return out;
  }
  return a.space()->cells(depth);
}

CocycleReport cocycle_audit(const NonsingularAction& a, const std::vector<std::pair<Element, Element>>& pairs, const Region& domain) {
  const MeasureSpace& s = *a.space();
  CocycleReport report;
  const Element e = identity(a.group());
  auto fail = [&](const Element& g1, const Element& g2, const Cell& c, std::string what) {
    report.violations.push_back({format_element(g1), format_element(g2), s.format_cell(c), std::move(what)});
  };

  for (const auto& c : domain) {
    ++report.checks;
    if (!a.resolved(e, c) || a.apply(e, c) != c || a.rn(e, c) != 1 || a.sign(e, c) != 1) fail(e, e, c, "identity cocycles are not trivial");
  }

  for (const auto& [g1, g2] : pairs) {
    const Element g12 = mul(g1, g2);
    std::function<void(const Cell&)> visit = [&](const Cell& y) {
      bool ok = a.resolved(g1, y) && a.resolved(g12, y) && a.resolved(g2, a.apply(g1, y));
      if (!ok) {
        if (s.atomic()) {
          fail(g1, g2, y, "atomic cell is not resolved");
          return;
        }
        for (const auto& child : s.children(y)) visit(child);
        return;
      }
      ++report.checks;
      Cell x1 = a.apply(g1, y);
      Rational w1 = a.rn(g1, y), w2 = a.rn(g2, x1), w12 = a.rn(g12, y);
      int c1 = a.sign(g1, y), c2 = a.sign(g2, x1), c12 = a.sign(g12, y);
      if (w1 <= 0 || w2 <= 0 || w12 <= 0) fail(g1, g2, y, "non-positive Radon-Nikodym value");
      if (a.apply(g12, y) != a.apply(g2, x1)) fail(g1, g2, y, "phi_{g1 g2} differs from phi_{g2} o phi_{g1}");
      if (w12 != w1 * w2) fail(g1, g2, y, "w chain rule: " + format_rational(w12) + " != " + format_rational(w1) + " * " + format_rational(w2));
      if (c12 != c1 * c2) fail(g1, g2, y, "c chain rule: " + std::to_string(c12) + " != " + std::to_string(c1) + " * " + std::to_string(c2));
      if (std::abs(c1) != 1 || std::abs(c2) != 1) fail(g1, g2, y, "sign cocycle is not +-1");
    };
    for (const auto& c : domain) visit(c);
  }
  return report;
}

}  // namespace stf

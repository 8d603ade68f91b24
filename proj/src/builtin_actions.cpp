#include <array>

#include "stf/action.hpp"

namespace stf {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// Z^d acting on itself by translation, counting measure.
class LatticeTranslation final : public NonsingularAction {
 public:
  LatticeTranslation(int d, bool alternating)
      : NonsingularAction(GroupSpec::lattice(d), DiscreteSpace::counting(d)), alternating_(alternating) {}

  std::string name() const override { return alternating_ ? "lattice-translation-signed" : "lattice-translation-null"; }
  GroundTruth ground_truth() const override { return GroundTruth::Null; }
  bool resolved(const Element& g, const Cell&) const override {
    require(g);
    return true;
  }
  Cell apply(const Element& g, const Cell& c) const override {
    require(g);
    space()->check(c);
    Cell out = c;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= g.data[i];
    return out;
  }
  Rational rn(const Element& g, const Cell&) const override {
    require(g);
    return 1;
  }
  int sign(const Element& g, const Cell&) const override {
    require(g);
    if (!alternating_) return 1;
    return word_length(g) % 2 == 0 ? 1 : -1;
  }

 private:
  bool alternating_;
};

// Z or Z^2 acting on six uniform points through two commuting permutations.
class FinitePermutation final : public NonsingularAction {
 public:
  explicit FinitePermutation(int d) : NonsingularAction(GroupSpec::lattice(d), DiscreteSpace::uniform(6)) {
    if (d > 2) throw UsageError("finite-permutation-positive supports Z and Z^2 only");
  }

  std::string name() const override { return "finite-permutation-positive"; }
  GroundTruth ground_truth() const override { return GroundTruth::Positive; }
  bool resolved(const Element& g, const Cell&) const override {
    require(g);
    return true;
  }
  Cell apply(const Element& g, const Cell& c) const override {
    require(g);
    space()->check(c);
    std::int64_t x = c[0];
    // phi_g = sigma^{-g0} tau^{-g1}; sigma has order 6 and tau order 2.
    for (std::int64_t i = 0, n = mod(-g.data[0], 6); i < n; ++i) x = kSigma[static_cast<std::size_t>(x)];
    if (g.data.size() > 1)
      for (std::int64_t i = 0, n = mod(-g.data[1], 2); i < n; ++i) x = kTau[static_cast<std::size_t>(x)];
    return {x};
  }
  Rational rn(const Element& g, const Cell&) const override {
    require(g);
    return 1;
  }
  int sign(const Element& g, const Cell&) const override {
    require(g);
    return 1;
  }

 private:
  static constexpr std::array<std::int64_t, 6> kSigma{1, 2, 0, 4, 3, 5};
  static constexpr std::array<std::int64_t, 6> kTau{0, 1, 2, 4, 3, 5};
};

// F_k acting on the boundary of its Cayley tree with the Patterson-Sullivan measure.
class BoundaryFree final : public NonsingularAction {
 public:
  explicit BoundaryFree(int k) : NonsingularAction(GroupSpec::free(k), BoundarySpace::make(k)), k_(k) {}

  std::string name() const override { return "boundary-free-" + std::to_string(k_); }
  GroundTruth ground_truth() const override { return GroundTruth::Null; }
  // g^{-1} C_w is a cylinder, with constant Busemann value, unless w is a prefix of g.
  bool resolved(const Element& g, const Cell& c) const override {
    require(g);
    return g.data.empty() || !free_group::is_prefix(c, g.data);
  }
  Cell apply(const Element& g, const Cell& c) const override {
    require(g);
    space()->check(c);
    return free_group::multiply(free_group::inverse(g.data), c);
  }
  Rational rn(const Element& g, const Cell& c) const override {
    require(g);
    int m = free_group::common_prefix(c, g.data);
    int beta = static_cast<int>(g.data.size()) - 2 * m;
    return pow_int(Rational(2 * k_ - 1), -beta);
  }
  int sign(const Element& g, const Cell&) const override {
    require(g);
    return 1;
  }

 private:
  int k_;
};

// Z/2 wr Z acting by left multiplication on its finite quotient Z/2 wr Z/3 (24 uniform points).
// Points are keyed (position mod 3, lamp mask).
class LamplighterShift final : public NonsingularAction {
 public:
  LamplighterShift() : NonsingularAction(GroupSpec::lamplighter(), make_space()) {}

  std::string name() const override { return "lamplighter-shift-positive"; }
  GroundTruth ground_truth() const override { return GroundTruth::Positive; }
  bool resolved(const Element& g, const Cell&) const override {
    require(g);
    return true;
  }
  Cell apply(const Element& g, const Cell& c) const override {
    require(g);
    space()->check(c);
    Cell gi = reduce(inv(g));
    // (f,t)(f',t') = (shift_{t'} f xor f', t + t')
    return {mod(gi[0] + c[0], 3), rotate(gi[1], c[0]) ^ c[1]};
  }
  Rational rn(const Element& g, const Cell&) const override {
    require(g);
    return 1;
  }
  int sign(const Element& g, const Cell&) const override {
    require(g);
    return 1;
  }

 private:
  static SpacePtr make_space() {
    std::vector<std::pair<Cell, Rational>> pts;
    for (std::int64_t t = 0; t < 3; ++t)
      for (std::int64_t m = 0; m < 8; ++m) pts.push_back({{t, m}, Rational(1, 24)});
    return DiscreteSpace::keyed(std::move(pts));
  }
  static std::int64_t rotate(std::int64_t mask, std::int64_t by) {
    std::int64_t out = 0;
    for (std::int64_t i = 0; i < 3; ++i)
      if (mask >> i & 1) out |= std::int64_t{1} << mod(i + by, 3);
    return out;
  }
  static Cell reduce(const Element& g) {
    std::int64_t mask = 0;
    for (std::size_t i = 1; i < g.data.size(); ++i) mask ^= std::int64_t{1} << mod(g.data[i], 3);
    return {mod(g.data[0], 3), mask};
  }
};

}  // namespace

std::vector<std::string> builtin_action_names() {
  return {"lattice-translation-null", "lattice-translation-signed", "finite-permutation-positive", "boundary-free-2", "lamplighter-shift-positive"};
}

ActionPtr builtin_action(const std::string& name, std::optional<GroupSpec> group) {
  auto lattice_dim = [&](int fallback) {
    if (!group) return fallback;
    if (group->kind != GroupKind::IntLattice) throw UsageError("action " + name + " needs an IntLattice group, got " + group->name());
    return group->rank;
  };
  if (name == "lattice-translation-null") return std::make_shared<LatticeTranslation>(lattice_dim(1), false);
  if (name == "lattice-translation-signed") return std::make_shared<LatticeTranslation>(lattice_dim(1), true);
  if (name == "finite-permutation-positive") return std::make_shared<FinitePermutation>(lattice_dim(1));
  if (name == "lamplighter-shift-positive") {
    if (group && group->kind != GroupKind::Lamplighter) throw UsageError("action " + name + " needs the Lamplighter group");
    return std::make_shared<LamplighterShift>();
  }
  const std::string prefix = "boundary-free-";
  if (name.rfind(prefix, 0) == 0) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(name.substr(prefix.size()), &used);
      if (used != name.size() - prefix.size()) throw UsageError("");
    } catch (const std::exception&) {
      throw UsageError("malformed action name '" + name + "'");
    }
    if (group && !(group->kind == GroupKind::Free && group->rank == k)) throw UsageError("action " + name + " needs the group F_" + std::to_string(k));
    return std::make_shared<BoundaryFree>(k);
  }
  throw UsageError("unknown action '" + name + "'");
}

}  // namespace stf

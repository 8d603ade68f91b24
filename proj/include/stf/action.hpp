#pragma once

// Non-singular actions phi_g(x) = g^{-1} x with their Radon-Nikodym and sign
// cocycles, the Rosinski kernel family and the Maharam extension.
//
// Composition convention: phi_{g1 g2} = phi_{g2} o phi_{g1}, hence
//   w_{g1 g2}(x) = w_{g1}(x) w_{g2}(phi_{g1} x)   and the same for c.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stf/group.hpp"
#include "stf/measure.hpp"

namespace stf {

enum class GroundTruth { Null, Positive };
std::string to_string(GroundTruth t);

class NonsingularAction {
 public:
  NonsingularAction(GroupSpec group, SpacePtr space) : group_(group), space_(std::move(space)) {}
  virtual ~NonsingularAction() = default;

  virtual std::string name() const = 0;
  virtual GroundTruth ground_truth() const = 0;

  /// phi_g maps `c` bijectively onto a cell, with w_g and c_g constant on `c`.
  /// Sub-cells of a resolved cell are resolved.
  virtual bool resolved(const Element& g, const Cell& c) const = 0;
  /// phi_g(c), for resolved cells.
  virtual Cell apply(const Element& g, const Cell& c) const = 0;
  /// w_g = d(mu o phi_g)/d mu on a resolved cell.
  virtual Rational rn(const Element& g, const Cell& c) const = 0;
  /// c_g in {-1, +1} on a resolved cell.
  virtual int sign(const Element& g, const Cell& c) const = 0;

  const GroupSpec& group() const { return group_; }
  const SpacePtr& space() const { return space_; }

 protected:
  void require(const Element& g) const;

 private:
  GroupSpec group_;
  SpacePtr space_;
};

using ActionPtr = std::shared_ptr<const NonsingularAction>;

/// Built-in actions by name: lattice-translation-null, lattice-translation-signed,
/// finite-permutation-positive, boundary-free-<k>, lamplighter-shift-positive.
/// `group` selects Z^d for the lattice and permutation actions.
ActionPtr builtin_action(const std::string& name, std::optional<GroupSpec> group = std::nullopt);
std::vector<std::string> builtin_action_names();

/// Splits `c` into cells resolved for g.
Region resolve(const NonsingularAction& a, const Element& g, const Cell& c, std::size_t cap = kDefaultEnumerationCap);

/// A cell of phi_g^{-1}(target) together with its image.
struct Piece {
  Cell cell;
  Cell image;
  std::size_t target;  // index into the target region
  Rational rn;
  int sign = 1;
};

/// Partition of phi_g^{-1}(target) into resolved cells, each mapped inside one target cell.
std::vector<Piece> pullback(const NonsingularAction& a, const Element& g, const Region& target, std::size_t cap = kDefaultEnumerationCap);

/// phi_g(region).
Region image(const NonsingularAction& a, const Element& g, const Region& r);

/// w_g as a simple function over resolved refinements of `domain`.
RationalFunction rn_function(const NonsingularAction& a, const Element& g, const Region& domain);
RationalFunction sign_function(const NonsingularAction& a, const Element& g, const Region& domain);

// ---------------------------------------------------------------------------
// Rosinski kernel f_g = c_g w_g^{1/alpha} f_e o phi_g

struct KernelValue {
  Scalar value;      // f_g on the cell
  Scalar abs_alpha;  // |f_g|^alpha, kept separately so norms stay exact
};

using KernelFunction = SimpleFunction<KernelValue>;

class RosinskiKernel {
 public:
  RosinskiKernel(ActionPtr action, RationalFunction f_e, Alpha alpha);

  const ActionPtr& action() const { return action_; }
  const RationalFunction& f_e() const { return f_e_; }
  const Alpha& alpha() const { return alpha_; }

  KernelFunction f(const Element& g, std::size_t cap = kDefaultEnumerationCap) const;

  /// Whether the supports of f_g, g in `gs`, cover `domain` (reported, not enforced).
  bool covers(const std::vector<Element>& gs, const Region& domain) const;

 private:
  ActionPtr action_;
  RationalFunction f_e_;
  Alpha alpha_;
};

/// (sum |f|^alpha mass), exact where possible.
Scalar lp_norm_pow(const KernelFunction& f);
Scalar lp_norm(const KernelFunction& f, const Alpha& alpha);

// ---------------------------------------------------------------------------
// Maharam extension phi*_g(x, y) = (phi_g x, y / w_g(x))

struct MaharamCell {
  Cell base;
  Rational lo;
  std::optional<Rational> hi;
};

class MaharamAction {
 public:
  explicit MaharamAction(ActionPtr base) : base_(std::move(base)) {}
  const ActionPtr& base() const { return base_; }

  /// Requires the base cell to be resolved for g.
  MaharamCell apply_star(const Element& g, const MaharamCell& cell) const;
  std::optional<Rational> mass(const MaharamCell& cell) const;

  /// nu(E and (phi*_g)^{-1} E) for E = base x (lo, hi).
  Rational return_mass(const Element& g, const Region& base, const Rational& lo, const std::optional<Rational>& hi) const;

 private:
  ActionPtr base_;
};

inline MaharamAction maharam_extend(ActionPtr a) { return MaharamAction(std::move(a)); }

struct MaharamViolation {
  std::string g, cell, interval;
  std::optional<Rational> before, after;
};

struct MaharamReport {
  std::size_t checks = 0;
  std::vector<MaharamViolation> violations;
  bool pass() const { return violations.empty(); }
};

using YInterval = std::pair<Rational, std::optional<Rational>>;

/// mass(phi*_g(C x I)) == mass(C x I) for every g, every cell C of `domain`
/// (split into resolved cells) and every interval I.
MaharamReport maharam_preservation_audit(const ActionPtr& a, const std::vector<Element>& gs, const Region& domain,
                                         const std::vector<YInterval>& intervals);

/// Pairwise disjointness of phi_g(W), g in L.
bool check_weakly_wandering(const NonsingularAction& a, const Region& w, const std::vector<Element>& l);

// ---------------------------------------------------------------------------

struct CocycleViolation {
  std::string g1, g2, cell, what;
};

struct CocycleReport {
  std::size_t checks = 0;
  std::vector<CocycleViolation> violations;
  bool pass() const { return violations.empty(); }
};

/// Exact chain-rule check for each pair on every cell of `domain`, refining
/// cells until all cocycles involved are constant.
CocycleReport cocycle_audit(const NonsingularAction& a, const std::vector<std::pair<Element, Element>>& pairs, const Region& domain);

/// A natural finite test domain: all cells of the given depth, or the box
/// [-depth, depth]^d for counting measure.
Region audit_domain(const NonsingularAction& a, int depth);

}  // namespace stf

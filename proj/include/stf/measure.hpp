#pragma once

// Exactly computable measure spaces: weighted point sets (finite, or counting
// measure on Z^d) and the cylinder algebra of the free-group boundary.

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "stf/group.hpp"
#include "stf/rational.hpp"

namespace stf {

/// A point (discrete spaces) or a cylinder prefix (boundary).
using Cell = Key;
using Region = std::vector<Cell>;

enum class Relation { Disjoint, Equal, Contains, Within };

/// Raised when a simple function is asked for its value on a cell it is not constant on.
class NotConstantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeasureSpace {
 public:
  virtual ~MeasureSpace() = default;

  virtual std::string name() const = 0;
  /// Cells are points with no finer structure.
  virtual bool atomic() const = 0;
  virtual bool finite() const = 0;
  /// Throws ResourceError for infinite spaces.
  virtual Rational total_mass() const = 0;
  virtual Rational mass(const Cell& c) const = 0;
  virtual bool valid(const Cell& c) const = 0;
  virtual std::vector<Cell> children(const Cell& c) const = 0;
  /// The cell itself followed by every strictly larger cell, innermost first.
  virtual std::vector<Cell> ancestors(const Cell& c) const = 0;
  virtual int depth(const Cell& c) const = 0;
  /// A partition of the whole space into cells of the given depth.
  virtual std::vector<Cell> cells(int depth, std::size_t cap = kDefaultEnumerationCap) const = 0;
  virtual std::string format_cell(const Cell& c) const = 0;
  virtual Cell parse_cell(std::string_view text) const = 0;

  Relation relate(const Cell& a, const Cell& b) const;
  void check(const Cell& c) const;
};

using SpacePtr = std::shared_ptr<const MeasureSpace>;

class DiscreteSpace final : public MeasureSpace {
 public:
  /// Points labelled 0..n-1 with the given positive weights.
  static std::shared_ptr<DiscreteSpace> weighted(std::vector<Rational> weights);
  static std::shared_ptr<DiscreteSpace> uniform(std::size_t n);
  /// Points carrying arbitrary keys (all of the same length).
  static std::shared_ptr<DiscreteSpace> keyed(std::vector<std::pair<Cell, Rational>> points);
  /// Counting measure on Z^d. Infinite; points are materialized per query.
  static std::shared_ptr<DiscreteSpace> counting(int d);

  std::string name() const override;
  bool atomic() const override { return true; }
  bool finite() const override { return !counting_; }
  Rational total_mass() const override;
  Rational mass(const Cell& c) const override;
  bool valid(const Cell& c) const override;
  std::vector<Cell> children(const Cell&) const override { return {}; }
  std::vector<Cell> ancestors(const Cell& c) const override { return {c}; }
  int depth(const Cell&) const override { return 0; }
  std::vector<Cell> cells(int depth, std::size_t cap = kDefaultEnumerationCap) const override;
  std::string format_cell(const Cell& c) const override;
  Cell parse_cell(std::string_view text) const override;

  int dimension() const { return dim_; }
  const std::vector<Cell>& points() const { return order_; }

 private:
  DiscreteSpace() = default;
  bool counting_ = false;
  int dim_ = 1;
  std::unordered_map<Cell, Rational, KeyHash> weights_;
  std::vector<Cell> order_;
  Rational total_ = 0;
};

/// The boundary of the Cayley tree of F_k with the Patterson-Sullivan
/// (uniform) measure mu(C_w) = 1 / (2k (2k-1)^{|w|-1}).
class BoundarySpace final : public MeasureSpace {
 public:
  explicit BoundarySpace(int k);
  static std::shared_ptr<BoundarySpace> make(int k) { return std::make_shared<BoundarySpace>(k); }

  std::string name() const override;
  bool atomic() const override { return false; }
  bool finite() const override { return true; }
  Rational total_mass() const override { return 1; }
  Rational mass(const Cell& c) const override;
  bool valid(const Cell& c) const override;
  std::vector<Cell> children(const Cell& c) const override;
  std::vector<Cell> ancestors(const Cell& c) const override;
  int depth(const Cell& c) const override { return static_cast<int>(c.size()); }
  std::vector<Cell> cells(int depth, std::size_t cap = kDefaultEnumerationCap) const override;
  std::string format_cell(const Cell& c) const override;
  Cell parse_cell(std::string_view text) const override;

  int rank() const { return k_; }
  /// Mass of a cylinder of the given length.
  Rational mass_at_depth(int length) const;

 private:
  int k_;
};

// Region algebra. Regions are lists of cells; normalized regions are sorted
// and pairwise disjoint.

Region normalize(const MeasureSpace& s, Region r);
/// Merges complete sibling families into their parent, repeatedly.
Region coarsen(const MeasureSpace& s, Region r);
Region intersect(const MeasureSpace& s, const Region& a, const Region& b);
Region subtract(const MeasureSpace& s, const Region& a, const Region& b);
Region unite(const MeasureSpace& s, const Region& a, const Region& b);
Rational measure(const MeasureSpace& s, const Region& r);
/// Refines every cell to exactly `depth`; cells already deeper are an error.
Region refine(const MeasureSpace& s, const Region& r, int depth);
bool disjoint(const MeasureSpace& s, const Region& a, const Region& b);
/// The coarsest partition of the union of `regions` on which each of them is
/// a union of parts.
Region common_partition(const MeasureSpace& s, const std::vector<Region>& regions);

/// Finitely many disjoint cells with values, zero elsewhere.
template <class V>
class SimpleFunction {
 public:
  SimpleFunction() = default;
  SimpleFunction(SpacePtr space, std::vector<std::pair<Cell, V>> entries) : space_(std::move(space)), entries_(std::move(entries)) {
    build_index();
  }

  const SpacePtr& space() const { return space_; }
  const std::vector<std::pair<Cell, V>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// Value on `c`, or nullptr where the function vanishes. Throws
  /// NotConstantError when `c` strictly contains a cell of the function.
  const V* at(const Cell& c) const {
    for (const auto& a : space_->ancestors(c)) {
      auto it = index_.find(a);
      if (it != index_.end()) return &entries_[it->second].second;
    }
    if (interior_.count(c)) throw NotConstantError("simple function is not constant on cell " + space_->format_cell(c));
    return nullptr;
  }

  Region support() const {
    Region r;
    r.reserve(entries_.size());
    for (const auto& e : entries_) r.push_back(e.first);
    return r;
  }

  int max_depth() const {
    int d = 0;
    for (const auto& e : entries_) d = std::max(d, space_->depth(e.first));
    return d;
  }

 private:
  void build_index() {
    if (!space_) throw UsageError("simple function without a measure space");
    index_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      space_->check(entries_[i].first);
      auto anc = space_->ancestors(entries_[i].first);
      for (std::size_t j = 0; j < anc.size(); ++j) {
        if (index_.count(anc[j]) && j > 0) throw UsageError("simple function cells overlap at " + space_->format_cell(entries_[i].first));
        if (j > 0) interior_.insert(anc[j]);
      }
      if (!index_.emplace(entries_[i].first, i).second) throw UsageError("duplicate simple function cell " + space_->format_cell(entries_[i].first));
    }
    for (const auto& e : entries_)
      if (interior_.count(e.first)) throw UsageError("simple function cells overlap at " + space_->format_cell(e.first));
  }

  SpacePtr space_;
  std::vector<std::pair<Cell, V>> entries_;
  std::unordered_map<Cell, std::size_t, KeyHash> index_;
  std::unordered_set<Cell, KeyHash> interior_;
};

using RationalFunction = SimpleFunction<Rational>;

/// Indicator of a region.
RationalFunction indicator(SpacePtr space, const Region& r, const Rational& value = 1);

/// Splits every cell of `f` down to `depth` (values copied).
RationalFunction refine(const RationalFunction& f, int depth);

/// (sum |v|^alpha mass)^(1/alpha), exact where the powers are rational.
Scalar lp_norm(const RationalFunction& f, const Alpha& alpha);
/// sum |v|^alpha mass.
Scalar lp_norm_pow(const RationalFunction& f, const Alpha& alpha);

/// base x (lo, hi), hi absent meaning +infinity.
struct ProductCell {
  Region base;
  Rational lo;
  std::optional<Rational> hi;
};

/// measure(base) * (hi - lo); nullopt signals an infinite mass.
std::optional<Rational> product_cell_mass(const MeasureSpace& s, const ProductCell& cell);

/// Lebesgue length of (a_lo, a_hi) intersected with (b_lo, b_hi); absent upper ends are +infinity.
std::optional<Rational> interval_overlap(const Rational& a_lo, const std::optional<Rational>& a_hi, const Rational& b_lo,
                                         const std::optional<Rational>& b_hi);

}  // namespace stf

#pragma once

// Symmetric alpha-stable sampling, exact scale parameters and the LePage
// series realization of the field Y_g = integral of f_g dM.

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <unordered_map>
#include <vector>

#include "stf/action.hpp"
#include "stf/rng.hpp"

namespace stf {

/// One SaS(sigma) draw (Chambers-Mallows-Stuck, symmetric case).
double sas_sample(Rng& rng, double alpha, double sigma);

using Combination = std::vector<std::pair<Rational, Element>>;

/// Scale parameter ||sum c_i f_{g_i}||_alpha, exact when the arithmetic allows.
Scalar scale_of(const Combination& coeffs, const RosinskiKernel& kernel);
/// sum |sum c_i f_{g_i}|^alpha dmu, i.e. scale_of^alpha.
Scalar scale_pow_of(const Combination& coeffs, const RosinskiKernel& kernel);

struct StationarityRow {
  std::string probe;
  Scalar base, shifted;
  bool exact = false;
  bool pass = false;
};

struct StationarityReport {
  std::vector<StationarityRow> rows;
  bool pass() const;
};

/// Compares scale_of({(c_i, h g_i)}) with scale_of({(c_i, g_i)}) for each probe.
StationarityReport stationarity_audit(const RosinskiKernel& kernel, const Element& h, const std::vector<Combination>& probes,
                                      double rel_tol = 1e-10);

/// C_alpha = (1 - alpha) / (Gamma(2 - alpha) cos(pi alpha / 2)), alpha != 1.
double series_constant(double alpha);

struct FieldSpec {
  RosinskiKernel kernel;
  std::vector<Element> index_set;
  std::size_t series_terms = 2000;
  std::uint64_t seed = 0;
};

struct FieldMeta {
  std::uint64_t seed = 0;
  std::size_t series_terms = 0;
  double alpha = 0;
  double support_mass = 0;    // mu(U), U the union of the supports of f_g
  double tail_variance = 0;   // upper bound on the variance of each omitted tail
  std::string isa;
};

struct FieldSample {
  std::vector<Element> index_set;
  std::vector<double> values;
  FieldMeta meta;
};

/// Precomputed tables for repeated series draws.
class LepageSampler {
 public:
  explicit LepageSampler(const FieldSpec& spec);

  /// Replicate r of the field, drawn from stream (seed, Series, r).
  FieldSample sample(std::uint64_t replicate) const;
  /// Replicates 0..count-1, rows indexed like `index_set`.
  std::vector<std::vector<double>> replicates(std::size_t count, int workers = 1) const;

  const FieldMeta& meta() const { return meta_; }
  std::size_t cells() const { return cell_mass_.size(); }

 private:
  std::size_t draw_cell(Rng& rng) const;
  void fill(std::uint64_t replicate, double* out) const;

  FieldSpec spec_;
  FieldMeta meta_;
  double prefactor_ = 0;
  // Partition of the support on which every f_g is constant.
  std::vector<Cell> cells_;
  std::vector<double> cell_mass_;
  std::vector<std::vector<double>> table_;  // table_[g][cell]
  // Sampling: alias table over the top-level cells, then a walk down the
  // cylinder tree by child-mass ratios where cells are refined.
  struct Node {
    std::int32_t leaf = -1;  // index into cells_, or -1 for an interior cell
    std::uint32_t first = 0, count = 0;  // children occupy nodes_[first, first + count)
  };
  std::uint32_t build_node(const Cell& c, const std::unordered_map<Cell, std::int32_t, KeyHash>& leaves);
  std::vector<Cell> roots_;
  std::vector<double> alias_prob_;
  std::vector<std::uint32_t> alias_other_;
  std::vector<std::uint32_t> root_node_;
  std::vector<Node> nodes_;
  std::vector<double> cum_;  // cum_[i]: conditional probability of nodes_[first..i] among its siblings
};

FieldSample lepage_field(const FieldSpec& spec, std::uint64_t replicate = 0);

struct CharEstimate {
  std::complex<double> value;
  double se_re = 0;
  double se_im = 0;
};

/// (1/n) sum exp(i theta Y) with standard errors of both parts.
CharEstimate empirical_char(const std::vector<double>& samples, double theta);

}  // namespace stf

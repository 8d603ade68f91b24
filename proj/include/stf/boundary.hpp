#pragma once

// Patterson-Sullivan theory on the boundary of the free group F_k: Busemann
// cocycle, the sets A(K,o,g), Gromov products, the Bowen-Margulis-Sullivan
// measure on pairs of cylinders and the simple random walk exit law.
//
// Busemann convention: beta(g, xi) = lim d(g o, xi_t) - d(o, xi_t) = |g| - 2m,
// m the common prefix of xi and g. Then d(mu o phi_g)/d mu = (2k-1)^{-beta}.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stf/group.hpp"
#include "stf/measure.hpp"
#include "stf/rng.hpp"

namespace stf {

/// beta(g, .) on C_w. Throws NotConstantError when w is a proper prefix of g.
int busemann(const Element& g, const Cell& w);
/// beta(g, .) on C_w refined until constant.
std::vector<std::pair<Cell, int>> busemann_cells(const Element& g, const Cell& w);
/// (2k-1)^{-beta(g, .)} on C_w.
Rational rn_boundary(const Element& g, const Cell& w);

/// Mass of {xi : common prefix of xi and g is exactly j}, 0 <= j <= |g|.
Rational prefix_shell_mass(int k, int length, int j);

struct ASet {
  Region region;
  Rational mass;
};

/// A(K, o, g) = {xi : |beta(g, xi)| <= K}.
ASet a_set(const Element& g, const Rational& K);

struct RadiusMass {
  int n = 0;
  Rational value;
};

/// Row r: max over the sphere of radius r of mass(A(K, o, g)).
std::vector<RadiusMass> a_set_decay(int k, const Rational& K, int radius_max, int workers = 1, std::size_t cap = 2'000'000);

/// nu((Y x (1/K, K)) and (phi*_g)^{-1}(Y x (1/K, K))) for Y the whole boundary.
Rational cond_suff_term(const Element& g, const Rational& K);
/// Average of cond_suff_term over ball(m).
Rational cond_suff_average(int k, const Rational& K, int m, int workers = 1);

/// Gromov product of two diverging cylinders: their common prefix length.
int gromov_product(const Cell& a, const Cell& b);
/// Neither prefix extends the other.
bool diverging(const Cell& a, const Cell& b);

struct CylinderRect {
  int k = 2;
  std::vector<std::pair<Cell, Cell>> pairs;
};

/// Sum over pairs of (2k-1)^{2p} mu(C) mu(C'). Non-diverging pairs are refined
/// off the diagonal up to `max_depth`, beyond which a ResourceError is raised.
Rational bms_mass(const CylinderRect& rect, int max_depth = 12);

/// Omega_A for A the ball of radius r around o: pairs with Gromov product <= r.
CylinderRect geodesics_through(int k, int r);

/// g . rect, with cylinders refined where g C is not a single cylinder.
CylinderRect translate_rect(const Element& g, const CylinderRect& rect);
CylinderRect intersect_rect(const CylinderRect& a, const CylinderRect& b);

struct InvarianceReport {
  Rational before, after;
  bool equal() const { return before == after; }
};
InvarianceReport bms_invariance_check(const Element& g, const CylinderRect& rect);

/// mu_BMS(Omega_A and g Omega_A) for A the ball of radius r.
Rational cond_suff2_term(const Element& g, int r);
Rational cond_suff2_average(int k, int r, int m, int workers = 1);

/// Exit law of simple random walk: a non-backtracking word of length `depth`.
Cell srw_boundary_sample(Rng& rng, int k, int depth);

struct HittingRow {
  Cell cylinder;
  Rational expected;
  double frequency = 0;
  double se = 0;
  double z = 0;  // |frequency - expected| / se
};

struct HittingReport {
  std::vector<HittingRow> rows;
  double max_abs_deviation = 0;
  double max_z = 0;
};

/// Frequencies of all cylinders of depth 1..depth over n_samples walks.
HittingReport hitting_vs_ps(std::uint64_t seed, int k, int depth, std::size_t n_samples, int workers = 1);

}  // namespace stf

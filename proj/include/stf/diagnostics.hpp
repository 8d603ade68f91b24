#pragma once

// Mixing diagnostics: Gross averages, Maharam-extension averages, the
// truncation inequalities, a Monte Carlo F-mixing estimator, density-zero
// extraction and a Neveu-part classifier.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stf/action.hpp"
#include "stf/stable.hpp"

namespace stf {

enum class Verdict { Decays, Stalls, Inconclusive };
std::string to_string(Verdict v);

/// "decays" iff last < min(first / 4, 0.05); "stalls" iff last >= first / 2.
inline constexpr const char* kDecayRule = "decays iff value(n_max) < min(value(n_min)/4, 0.05); stalls iff value(n_max) >= value(n_min)/2";

struct DecayRow {
  int n = 0;
  double value = 0;
  std::optional<Rational> exact;
  std::optional<double> se;
};

struct DecayTable {
  std::vector<DecayRow> rows;
  Verdict verdict = Verdict::Inconclusive;
  std::string rule = kDecayRule;
};

Verdict decay_verdict(const std::vector<DecayRow>& rows);

/// Folner sets for amenable groups, balls for free groups.
enum class Averaging { Folner, Ball };
Averaging default_averaging(const GroupSpec& spec);
std::vector<Element> averaging_set(const GroupSpec& spec, Averaging kind, int n);
bool averaging_contains(const GroupSpec& spec, Averaging kind, int n, const Element& g);

/// mu(delta <= |f_e| <= 1/delta, |f_g| >= eps).
Rational gross_term(const RosinskiKernel& kernel, const Element& g, const Rational& delta, const Rational& eps);
DecayTable gross_average(const RosinskiKernel& kernel, const Rational& delta, const Rational& eps, Averaging kind,
                         const std::vector<int>& n_list, int workers = 1);

/// nu(E and (phi*_g)^{-1} E), E = base x (lo, hi), averaged over the chosen sets.
DecayTable mpns_average(const ActionPtr& action, const Region& base, const Rational& lo, const Rational& hi, Averaging kind,
                        const std::vector<int>& n_list, int workers = 1);

// ---------------------------------------------------------------------------

struct TruncationCheck {
  std::string lemma;  // "tail", "radon-nikodym", "final"
  std::string g;
  Rational L;
  Scalar lhs, rhs;
  bool pass = false;
  std::string detail;
};

struct TruncationReport {
  std::vector<TruncationCheck> checks;
  std::size_t violations() const;
};

/// The three truncation inequalities for every L in `L_list` and g in `probes`:
///  tail:           mu(|u_g|^a > eps/2) <= (2/eps) int |f|^a 1(|f| > L), u = f 1(|f| > L)
///  radon-nikodym:  mu(|f_g|^a > eps, w_g outside [1/L, L]) <= mu(w_g > L) <= 1/L, for L > K^a / eps
///  final:          (3/2) mu(A, w_g in [1/L, L], |f o phi_g|^a w_g > eps)
///                    <= (mu x Leb)(A', |h_L o phi*_g|^a > eps/2)
/// with A = {delta <= |f|^a <= 1/delta}, A' = {delta/2 <= |f|^a / y <= 2/delta}
/// and h_L(x, y) = |f(x)| y^{-1/a} 1(1/(2L) <= y <= 2L).
TruncationReport truncation_audit(const RosinskiKernel& kernel, const Rational& delta, const Rational& eps,
                                  const std::vector<Rational>& L_list, const Rational& K, const std::vector<Element>& probes);

// ---------------------------------------------------------------------------

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x > lo && x < hi; }
  bool whole() const { return lo == -std::numeric_limits<double>::infinity() && hi == std::numeric_limits<double>::infinity(); }
};

struct FmixCell {
  int n = 0;
  std::string h;
  double estimate = 0;  // P[AB] - P[A] P[B] for this translate
  double se = 0;
};

struct FmixResult {
  DecayTable table;
  std::vector<FmixCell> cells;
};

/// Monte Carlo (1/|F_n|) sum_{h in F_n} |P[(Y_{h g_i}) in A, (Y_{g_i}) in B] - P[A] P[B]|.
FmixResult f_mixing_empirical(const FieldSpec& field, const Interval& a, const Interval& b, const std::vector<Element>& g_tuple,
                              Averaging kind, const std::vector<int>& n_list, std::size_t replicates, int workers = 1);

// ---------------------------------------------------------------------------

struct DensityRow {
  int n = 0;
  Rational density;   // |E and F_n| / |F_n|
  double sup_off = 0;  // sup of psi on the shell F_n minus F_{n-1}, off E
};

struct DensityCertificate {
  std::vector<Element> set;
  std::vector<int> windows;  // N_1 < N_2 < ...
  std::vector<DensityRow> rows;
};

/// Nested-threshold construction of a density-zero set E off which psi -> 0.
DensityCertificate density_zero_extract(const std::function<double(const Element&)>& psi, const GroupSpec& spec, Averaging kind, int n_max);

// ---------------------------------------------------------------------------

enum class NeveuVerdict { PositiveEvidence, NullEvidence, Inconclusive };
std::string to_string(NeveuVerdict v);

struct NeveuResult {
  NeveuVerdict verdict = NeveuVerdict::Inconclusive;
  DecayTable averages;  // normalized Maharam return averages
};

/// Averages of nu(E and (phi*_g)^{-1} E) / nu(E) for a reference set E.
NeveuResult neveu_classify(const ActionPtr& action, int horizon, int workers = 1);

/// The reference base region used by the classifier.
Region neveu_reference_base(const NonsingularAction& a);

}  // namespace stf

#include <doctest.h>

#include <algorithm>
#include <set>

#include "cli/runner.hpp"
#include "stf/diagnostics.hpp"

using namespace stf;

namespace {

const GroupSpec F2 = GroupSpec::free(2);
const GroupSpec Z1 = GroupSpec::lattice(1);
Element el(const char* w) { return parse_element(F2, w); }

RosinskiKernel lattice_kernel(const Alpha& alpha = Alpha(1.5)) {
  auto a = builtin_action("lattice-translation-null");
  return RosinskiKernel(a, indicator(a->space(), {Cell{0}}), alpha);
}

RosinskiKernel boundary_kernel(const Alpha& alpha) {
  auto a = builtin_action("boundary-free-2");
  return RosinskiKernel(a, indicator(a->space(), {a->space()->parse_cell("a")}), alpha);
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("decay verdict rule") {
  auto rows = [](double first, double last) { return std::vector<DecayRow>{{1, first, {}, {}}, {8, last, {}, {}}}; };
  CHECK(decay_verdict(rows(1.0, 0.04)) == Verdict::Decays);
  CHECK(decay_verdict(rows(0.1, 0.024)) == Verdict::Decays);
  CHECK(decay_verdict(rows(0.1, 0.03)) == Verdict::Inconclusive);
  CHECK(decay_verdict(rows(1.0, 0.06)) == Verdict::Inconclusive);
  CHECK(decay_verdict(rows(1.0, 0.5)) == Verdict::Stalls);
  CHECK(decay_verdict(rows(1.0, 2.0)) == Verdict::Stalls);
}

TEST_CASE("Gross averages: lattice closed form") {
  auto table = gross_average(lattice_kernel(), Rational(1, 2), Rational(1, 2), Averaging::Folner, range(1, 64));
  REQUIRE(table.rows.size() == 64);
  for (const auto& row : table.rows) CHECK(*row.exact == Rational(1, 2 * row.n + 1));
  CHECK(*table.rows[9].exact == Rational(1, 21));
  CHECK(table.verdict == Verdict::Decays);
  // Worker count is irrelevant to exact sums.
  auto par = gross_average(lattice_kernel(), Rational(1, 2), Rational(1, 2), Averaging::Folner, {4, 16}, 3);
  CHECK(*par.rows[1].exact == Rational(1, 33));
}

TEST_CASE("Gross averages: positive and boundary exemplars") {
  auto perm = builtin_action("finite-permutation-positive");
  // Point 5 is fixed by both generating permutations.
  RosinskiKernel kp(perm, indicator(perm->space(), {Cell{5}}), Alpha(1.5));
  auto table = gross_average(kp, Rational(1, 2), Rational(1, 2), Averaging::Folner, {1, 2, 4, 8, 16});
  for (const auto& row : table.rows) CHECK(*row.exact == Rational(1, 6));
  CHECK(table.verdict == Verdict::Stalls);

  auto tb = gross_average(boundary_kernel(Alpha(1.5)), Rational(1, 2), Rational(1, 2), Averaging::Ball, {2, 4, 6, 8});
  for (std::size_t i = 1; i < tb.rows.size(); ++i) CHECK(*tb.rows[i].exact < *tb.rows[i - 1].exact);

  // alpha = 1: f_a = 3 on C_aa and 0 elsewhere, so the set is C_a and C_aa.
  CHECK(gross_term(boundary_kernel(Alpha(1.0)), el("a"), Rational(1, 2), Rational(1, 2)) == Rational(1, 12));
  // f_{a^-1} = 1/3 off C_{a^-1} and 0 on it: never above 1/2.
  CHECK(gross_term(boundary_kernel(Alpha(1.0)), el("a^-1"), Rational(1, 2), Rational(1, 2)) == 0);
}

TEST_CASE("Maharam averages") {
  auto b = builtin_action("boundary-free-2");
  auto m = maharam_extend(b);
  // w_a = 3 on C_a: overlap of (1/2, 2) with (3/2, 6) is 1/2.
  // w_a = 1/3 elsewhere: overlap with (1/6, 2/3) is 1/6.
  CHECK(m.return_mass(el("a"), {Cell{}}, Rational(1, 2), Rational(2)) == Rational(1, 4) * Rational(1, 2) + Rational(3, 4) * Rational(1, 6));
  CHECK(m.return_mass(identity(F2), {Cell{}}, Rational(1, 2), Rational(2)) == Rational(3, 2));

  auto lat = builtin_action("lattice-translation-null");
  Region base;
  for (std::int64_t x = 0; x < 10; ++x) base.push_back(Cell{x});
  auto table = mpns_average(lat, base, Rational(1), Rational(2), Averaging::Folner, {1, 5, 9, 20, 64});
  for (const auto& row : table.rows) {
    // phi_g x = x - g keeps 10 - |g| points of {0..9} inside it.
    Rational sum = 0;
    for (int g = -row.n; g <= row.n; ++g) sum += std::max(0, 10 - std::abs(g));
    CHECK(*row.exact == sum / (2 * row.n + 1));
  }
  CHECK(table.rows.back().value < table.rows.front().value);

  auto perm = builtin_action("finite-permutation-positive");
  auto tp = mpns_average(perm, perm->space()->cells(0), Rational(1, 2), Rational(2), Averaging::Folner, {1, 4, 16});
  for (const auto& row : tp.rows) CHECK(*row.exact == Rational(3, 2));
}

TEST_CASE("Gross and Maharam verdicts agree on every built-in") {
  for (const auto& name : builtin_action_names()) {
    CAPTURE(name);
    auto a = builtin_action(name);
    auto kind = default_averaging(a->group());
    auto ns = cli::default_n(a->group(), kind);
    RosinskiKernel k(a, cli::default_f_e(a), Alpha(1.5));
    auto g = gross_average(k, Rational(1, 2), Rational(1, 2), kind, ns);
    auto m = mpns_average(a, cli::default_base(a), Rational(1, 2), Rational(2), kind, ns);
    CHECK(g.verdict == m.verdict);
    CHECK(g.verdict == (a->ground_truth() == GroundTruth::Null ? Verdict::Decays : Verdict::Stalls));
  }
}

TEST_CASE("Neveu classifier matches ground truth") {
  for (const auto& name : builtin_action_names()) {
    CAPTURE(name);
    auto a = builtin_action(name);
    int horizon = std::min(cli::default_n(a->group(), default_averaging(a->group())).back(), a->group().kind == GroupKind::Free ? 8 : 64);
    auto r = neveu_classify(a, horizon);
    CHECK(r.verdict == (a->ground_truth() == GroundTruth::Null ? NeveuVerdict::NullEvidence : NeveuVerdict::PositiveEvidence));
  }
}

TEST_CASE("truncation audit on the boundary grid") {
  auto b = builtin_action("boundary-free-2");
  const auto& s = b->space();
  // Depth-2 simple function bounded by K = 1.
  RationalFunction fe(s, {{s->parse_cell("ab"), Rational(1)}, {s->parse_cell("aa"), Rational(1, 2)}, {s->parse_cell("b^-1a"), Rational(-3, 4)}});
  for (Alpha alpha : {Alpha(1.0), Alpha(Rational(3, 2))}) {
    RosinskiKernel k(b, fe, alpha);
    auto report = truncation_audit(k, Rational(1, 2), Rational(1, 2), {Rational(3), Rational(9)}, Rational(1), ball(F2, 2));
    CHECK(report.violations() == 0);
    std::set<std::string> lemmas;
    for (const auto& c : report.checks) lemmas.insert(c.lemma);
    CHECK(lemmas == std::set<std::string>{"tail", "radon-nikodym", "final"});
    for (const auto& c : report.checks) {
      // f is bounded by 1 < L, so the unbounded part vanishes.
      if (c.lemma == "tail") CHECK(c.lhs.is_zero());
      // RN values on f_g's support are powers of 3 within [1/9, 9]: nothing lies outside [1/L, L] for L = 9.
      if (c.lemma == "radon-nikodym" && c.L == 9) CHECK(c.lhs.is_zero());
    }
  }
  // An invalid K is rejected.
  CHECK_THROWS_AS(truncation_audit(RosinskiKernel(b, fe, Alpha(1.0)), Rational(1, 2), Rational(1, 2), {Rational(3)}, Rational(1, 2), {el("a")}),
                  UsageError);
}

TEST_CASE("truncation audit on the positive exemplars") {
  for (const char* name : {"finite-permutation-positive", "lamplighter-shift-positive"}) {
    auto a = builtin_action(name);
    RosinskiKernel k(a, cli::default_f_e(a), Alpha(Rational(3, 2)));
    CHECK(truncation_audit(k, Rational(1, 2), Rational(1, 2), {Rational(2), Rational(4), Rational(8)}, Rational(1), ball(a->group(), 2)).violations() ==
          0);
  }
}

TEST_CASE("density-zero extraction") {
  auto zero = density_zero_extract([](const Element&) { return 0.0; }, Z1, Averaging::Folner, 16);
  CHECK(zero.set.empty());

  auto spike = density_zero_extract([](const Element& g) { return is_identity(g) ? 1.0 : 0.0; }, Z1, Averaging::Folner, 16);
  REQUIRE(spike.set.size() == 1);
  CHECK(is_identity(spike.set[0]));
  for (const auto& row : spike.rows) {
    CHECK(row.density == Rational(1, 2 * row.n + 1));
    CHECK(row.sup_off == 0);
  }

  auto inv_len = density_zero_extract([](const Element& g) { return is_identity(g) ? 0.0 : 1.0 / word_length(g); }, Z1, Averaging::Folner, 64);
  // E = {-1, 1}; off E the shell at level n carries psi = 1/n.
  CHECK(inv_len.set.size() == 2);
  for (const auto& row : inv_len.rows) {
    CHECK(row.density == Rational(2, 2 * row.n + 1));
    if (row.n >= 2) CHECK(row.sup_off == doctest::Approx(1.0 / row.n));
  }
}

TEST_CASE("F-mixing estimator") {
  Interval pos{1.0, std::numeric_limits<double>::infinity()};
  // Lattice with f_e = 1_{0}: distinct translates have disjoint supports, hence independent values.
  FieldSpec lat{lattice_kernel(), {}, 2000, 31};
  auto ind = f_mixing_empirical(lat, pos, pos, {identity(Z1)}, Averaging::Folner, {1, 2, 3, 4}, 4000);
  std::size_t total = 0, within = 0;
  for (const auto& c : ind.cells) {
    if (c.h == format_element(identity(Z1))) continue;  // h = e compares a value with itself
    ++total;
    within += std::fabs(c.estimate) <= 3 * c.se;
  }
  REQUIRE(total > 0);
  CHECK(static_cast<double>(within) >= 0.95 * static_cast<double>(total));

  // Every translate is the same variable for the positive exemplar.
  auto perm = builtin_action("finite-permutation-positive");
  FieldSpec fp{RosinskiKernel(perm, indicator(perm->space(), {Cell{5}}), Alpha(1.5)), {}, 2000, 32};
  auto dep = f_mixing_empirical(fp, pos, pos, {identity(Z1)}, Averaging::Folner, {1, 2, 4}, 2000);
  for (const auto& row : dep.table.rows) CHECK(row.value > 5 * *row.se);
  CHECK(dep.table.verdict == Verdict::Stalls);

  Interval all;
  auto triv = f_mixing_empirical(fp, all, all, {identity(Z1)}, Averaging::Folner, {1, 2}, 1000);
  for (const auto& row : triv.table.rows) CHECK(row.value == 0);
  CHECK_THROWS_AS(f_mixing_empirical(fp, pos, pos, {identity(Z1)}, Averaging::Folner, {1}, 10), UsageError);

  // Determinism across worker counts.
  auto w1 = f_mixing_empirical(fp, pos, pos, {identity(Z1)}, Averaging::Folner, {1, 2}, 1000, 1);
  auto w3 = f_mixing_empirical(fp, pos, pos, {identity(Z1)}, Averaging::Folner, {1, 2}, 1000, 3);
  for (std::size_t i = 0; i < w1.cells.size(); ++i) CHECK(w1.cells[i].estimate == w3.cells[i].estimate);
}

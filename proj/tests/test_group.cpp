#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "stf/group.hpp"

using namespace stf;

namespace {

Element F2(const char* w) { return parse_element(GroupSpec::free(2), w); }

Element random_element(const GroupSpec& spec, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 8), coord(-6, 6);
  switch (spec.kind) {
    case GroupKind::IntLattice: {
      std::vector<std::int64_t> v(static_cast<std::size_t>(spec.rank));
      for (auto& x : v) x = coord(rng);
      return lattice_element(v);
    }
    case GroupKind::Heisenberg: return heisenberg_element(coord(rng), coord(rng), coord(rng));
    case GroupKind::Lamplighter: {
      std::vector<std::int64_t> lamps;
      for (int i = -4; i <= 4; ++i)
        if (rng() & 1) lamps.push_back(i);
      return lamplighter_element(lamps, coord(rng));
    }
    case GroupKind::Free: {
      auto gens = generators(spec);
      Element x = identity(spec);
      for (int i = len(rng); i > 0; --i) x = mul(x, gens[rng() % gens.size()]);
      return x;
    }
  }
  return identity(spec);
}

// Independent lamplighter model: (lamp set, position) with
// (f,t)(f',t') = ((f shifted by t') xor f', t + t').
using LL = std::pair<std::set<std::int64_t>, std::int64_t>;
LL ll_mul(const LL& a, const LL& b) {
  std::set<std::int64_t> f;
  for (auto x : a.first) f.insert(x + b.second);
  for (auto x : b.first)
    if (!f.erase(x)) f.insert(x);
  return {f, a.second + b.second};
}

}  // namespace

TEST_CASE("multiplication examples") {
  CHECK(format_element(mul(F2("ab"), F2("b^-1a"))) == "aa");
  CHECK(mul(lattice_element({1, 2}), lattice_element({3, -1})) == lattice_element({4, 1}));
  CHECK(mul(heisenberg_element(1, 0, 0), heisenberg_element(0, 1, 0)) == heisenberg_element(1, 1, 1));
  CHECK(mul(heisenberg_element(0, 1, 0), heisenberg_element(1, 0, 0)) == heisenberg_element(1, 1, 0));
  CHECK_THROWS_AS(mul(F2("a"), lattice_element({1})), UsageError);
}

TEST_CASE("free words parse in spaced and inverse notation") {
  CHECK(F2("a b a^-1") == F2("aba^-1"));
  CHECK(F2("a a^-1").data.empty());
  CHECK(format_element(F2("A")) == "a^-1");
}

TEST_CASE("inverse, identity and word length") {
  for (auto spec : {GroupSpec::lattice(2), GroupSpec::heisenberg(), GroupSpec::lamplighter(), GroupSpec::free(2)}) {
    CHECK(inv(identity(spec)) == identity(spec));
    CHECK(word_length(identity(spec)) == 0);
  }
  CHECK(word_length(F2("abab")) == 4);
  CHECK(word_length(lamplighter_element({0}, 0)) == 1);
  CHECK(word_length(lattice_element({3, -2})) == 5);
}

TEST_CASE("group axioms on random triples") {
  std::mt19937_64 rng(12345);
  for (auto spec : {GroupSpec::lattice(1), GroupSpec::lattice(3), GroupSpec::heisenberg(), GroupSpec::lamplighter(), GroupSpec::free(2),
                    GroupSpec::free(3)}) {
    CAPTURE(spec.name());
    Element e = identity(spec);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
      Element a = random_element(spec, rng), b = random_element(spec, rng), c = random_element(spec, rng);
      if (!(mul(mul(a, b), c) == mul(a, mul(b, c)))) ++bad;
      if (!(mul(a, e) == a) || !(mul(e, a) == a)) ++bad;
      if (!is_identity(mul(a, inv(a))) || !is_identity(mul(inv(a), a))) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("lamplighter product matches an independent model") {
  std::mt19937_64 rng(7);
  auto spec = GroupSpec::lamplighter();
  for (int i = 0; i < 2000; ++i) {
    Element a = random_element(spec, rng), b = random_element(spec, rng);
    LL la{{a.data.begin() + 1, a.data.end()}, a.data[0]}, lb{{b.data.begin() + 1, b.data.end()}, b.data[0]};
    LL lc = ll_mul(la, lb);
    Element c = mul(a, b);
    CHECK(c.data[0] == lc.second);
    CHECK(std::set<std::int64_t>(c.data.begin() + 1, c.data.end()) == lc.first);
  }
}

TEST_CASE("lamplighter word length: BFS oracle, library and closed form agree") {
  // BFS on the independent model with generators t, t^-1 and the toggle at 0.
  std::map<LL, int> dist{{LL{{}, 0}, 0}};
  std::vector<LL> frontier{LL{{}, 0}};
  const std::vector<LL> gens{{{}, 1}, {{}, -1}, {{0}, 0}};
  for (int d = 1; d <= 8; ++d) {
    std::vector<LL> next;
    for (const auto& x : frontier)
      for (const auto& s : gens) {
        LL y = ll_mul(x, s);
        if (dist.emplace(y, d).second) next.push_back(y);
      }
    frontier = next;
  }
  for (const auto& [x, d] : dist) {
    Element el = lamplighter_element({x.first.begin(), x.first.end()}, x.second);
    CHECK(word_length(el) == d);
    CHECK(lamplighter_length_formula(el) == d);
  }
  // The seam: library BFS radius 8 against the formula.
  for (const auto& [el, d] : cayley_bfs(GroupSpec::lamplighter(), 8)) CHECK(lamplighter_length_formula(el) == d);
  // Beyond the BFS radius the library falls back to the formula.
  Element far = lamplighter_element({-5, 0, 7}, 2);
  CHECK(word_length(far) == lamplighter_length_formula(far));
}

TEST_CASE("Heisenberg word length matches BFS") {
  for (const auto& [el, d] : cayley_bfs(GroupSpec::heisenberg(), 6)) CHECK(word_length(el) == d);
}

TEST_CASE("Folner sets: sizes, increasing, exhaustion") {
  auto z1 = folner_set(GroupSpec::lattice(1), 2);
  CHECK(z1.size() == 5);
  CHECK(folner_set(GroupSpec::heisenberg(), 1).size() == 27);
  CHECK(folner_set(GroupSpec::lamplighter(), 1).size() == 24);
  CHECK_THROWS_AS(folner_set(GroupSpec::free(2), 1), UnsupportedError);
  for (auto spec : {GroupSpec::lattice(2), GroupSpec::heisenberg(), GroupSpec::lamplighter()}) {
    CAPTURE(spec.name());
    for (int n = 0; n < 3; ++n) {
      auto small = folner_set(spec, n), big = folner_set(spec, n + 1);
      CHECK(BigInt(small.size()) == folner_size(spec, n));
      std::set<Element> b(big.begin(), big.end());
      for (const auto& x : small) CHECK(b.count(x) == 1);
      for (const auto& x : small) CHECK(folner_contains(spec, n, x));
    }
    // Every element of the 2-ball eventually lies in some F_n.
    for (const auto& x : ball(spec, 2)) CHECK(folner_contains(spec, 4, x));
  }
}

TEST_CASE("Folner ratio: examples and enumeration oracle") {
  CHECK(folner_ratio(lattice_element({1}), 10) == Rational(2, 21));
  CHECK(folner_ratio(identity(GroupSpec::heisenberg()), 5) == 0);
  for (auto spec : {GroupSpec::lattice(2), GroupSpec::heisenberg(), GroupSpec::lamplighter()}) {
    for (const auto& g : generators(spec)) {
      for (int n : {1, 2, 3}) {
        auto fn = folner_set(spec, n);
        std::set<Element> s(fn.begin(), fn.end());
        std::size_t outside = 0;
        for (const auto& x : fn)
          if (!s.count(mul(g, x))) ++outside;
        CHECK(folner_ratio(g, n) == Rational(static_cast<long>(2 * outside), static_cast<long>(fn.size())));
      }
    }
  }
  Element h = heisenberg_element(1, 0, 0);
  CHECK(folner_ratio(h, 4) <= folner_ratio(h, 2));
}

TEST_CASE("Folner ratio tends to zero along every generator") {
  for (auto spec : {GroupSpec::lattice(1), GroupSpec::lattice(2), GroupSpec::lattice(3), GroupSpec::heisenberg(), GroupSpec::lamplighter()}) {
    CAPTURE(spec.name());
    for (const auto& g : generators(spec)) {
      Rational r8 = folner_ratio(g, 8), r64 = folner_ratio(g, 64);
      // The lamp toggle preserves every F_n, so its ratio is 0 throughout.
      if (r8 > 0)
        CHECK(r64 < r8);
      else
        CHECK(r64 == 0);
      CHECK(r64 < Rational(1, 10));
    }
  }
}

TEST_CASE("Shulman bound") {
  // Union over k < n of F_k^{-1} F_n is [-(2n-1), 2n-1] on Z, so the ratio is (4n-1)/(2n+1).
  CHECK(shulman_bound(GroupSpec::lattice(1), 10) == Rational(39, 21));
  CHECK(shulman_bound(GroupSpec::lattice(2), 3) == Rational(121, 49));
  CHECK(shulman_bound(GroupSpec::lattice(1), 2) == Rational(7, 5));
  CHECK_THROWS_AS(shulman_bound(GroupSpec::lattice(1), 1), UsageError);
  // Enumeration oracle on the lattice: the union for k < n is F_{n-1}^{-1} F_n.
  for (int n = 2; n <= 4; ++n) {
    std::set<Element> u;
    for (int k = 1; k < n; ++k)
      for (const auto& a : folner_set(GroupSpec::lattice(2), k))
        for (const auto& b : folner_set(GroupSpec::lattice(2), n)) u.insert(mul(inv(a), b));
    Rational ratio(static_cast<long>(u.size()), static_cast<long>(folner_set(GroupSpec::lattice(2), n).size()));
    CHECK(shulman_bound(GroupSpec::lattice(2), n) >= ratio);
  }
  for (auto spec : {GroupSpec::lattice(1), GroupSpec::lattice(2), GroupSpec::heisenberg(), GroupSpec::lamplighter()}) {
    Rational prev = 0;
    for (int n_max = 2; n_max <= 4; ++n_max) {
      Rational s = shulman_bound(spec, n_max);
      CHECK(s >= prev);
      prev = s;
    }
    if (spec.kind == GroupKind::IntLattice) CHECK(prev <= pow_int(Rational(4), spec.rank));
  }
  // Regression bounds for the non-lattice built-ins.
  CHECK(shulman_bound(GroupSpec::heisenberg(), 4) <= 64);
  CHECK(shulman_bound(GroupSpec::lamplighter(), 4) <= 64);
}

TEST_CASE("balls") {
  CHECK(ball(GroupSpec::free(2), 1).size() == 5);
  CHECK(ball(GroupSpec::free(2), 2).size() == 17);
  long p = 1;
  for (int n = 0; n <= 7; ++n, p *= 3) CHECK(ball(GroupSpec::free(2), n).size() == static_cast<std::size_t>(2 * p - 1));
  for (auto spec : {GroupSpec::lattice(2), GroupSpec::heisenberg(), GroupSpec::lamplighter(), GroupSpec::free(3)}) {
    auto b0 = ball(spec, 0);
    REQUIRE(b0.size() == 1);
    CHECK(is_identity(b0[0]));
    for (const auto& x : ball(spec, 3)) CHECK(word_length(x) <= 3);
  }
  CHECK(ball(GroupSpec::lattice(2), 2).size() == 13);
}

#pragma once

// Canonical arithmetic for the built-in countable groups: Z^d, the discrete
// Heisenberg group, the lamplighter Z/2 wr Z and the free groups F_k.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "stf/rational.hpp"

namespace stf {

enum class GroupKind { IntLattice, Heisenberg, Lamplighter, Free };

struct GroupSpec {
  GroupKind kind = GroupKind::IntLattice;
  int rank = 1;  // d for IntLattice, k for Free, unused otherwise

  static GroupSpec lattice(int d);
  static GroupSpec heisenberg() { return {GroupKind::Heisenberg, 0}; }
  static GroupSpec lamplighter() { return {GroupKind::Lamplighter, 0}; }
  static GroupSpec free(int k);

  bool amenable() const { return kind != GroupKind::Free; }
  std::string name() const;
  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

using Key = std::vector<std::int64_t>;

/// Canonical group element. Layout of `data` by kind:
///   IntLattice  - the d coordinates
///   Heisenberg  - (a, b, c) with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')
///   Lamplighter - position first, then the sorted lit lamp sites
///   Free        - reduced word, letter i+1 for x_i and -(i+1) for its inverse
struct Element {
  GroupSpec spec;
  Key data;

  friend bool operator==(const Element&, const Element&) = default;
  friend bool operator<(const Element& a, const Element& b) { return a.data < b.data; }
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept { return KeyHash{}(e.data); }
};

namespace free_group {

/// Freely reduces a word in place representation.
Key reduce(const Key& word);
Key multiply(const Key& a, const Key& b);
Key inverse(const Key& w);
/// Length of the longest common prefix.
int common_prefix(const Key& a, const Key& b);
bool is_prefix(const Key& prefix, const Key& word);
bool is_reduced(const Key& word);
/// All 2k letters.
std::vector<std::int64_t> letters(int k);
std::string letter_name(std::int64_t letter);
std::string format_word(const Key& w);
Key parse_word(int k, std::string_view text);

}  // namespace free_group

Element identity(const GroupSpec& spec);
Element mul(const Element& a, const Element& b);
Element inv(const Element& a);
bool is_identity(const Element& a);

/// Word length with respect to the standard symmetric generators.
int word_length(const Element& a);

/// The standard finite symmetric generating set.
std::vector<Element> generators(const GroupSpec& spec);

Element parse_element(const GroupSpec& spec, std::string_view text);
std::string format_element(const Element& a);

Element lattice_element(std::vector<std::int64_t> coords);
Element heisenberg_element(std::int64_t a, std::int64_t b, std::int64_t c);
Element lamplighter_element(std::vector<std::int64_t> lamps, std::int64_t position);
Element free_element(int k, const Key& word);

/// Element count cap for explicit enumerations.
inline constexpr std::size_t kDefaultEnumerationCap = 8'000'000;

/// F_n of the built-in increasing Folner sequence, enumerated.
std::vector<Element> folner_set(const GroupSpec& spec, int n, std::size_t cap = kDefaultEnumerationCap);
bool folner_contains(const GroupSpec& spec, int n, const Element& x);
BigInt folner_size(const GroupSpec& spec, int n);
/// #{x in F_n : g x in F_n}, by closed-form counting.
BigInt folner_overlap(const Element& g, int n);
/// Exact |g F_n symmetric-difference F_n| / |F_n|.
Rational folner_ratio(const Element& g, int n);

/// max over 2 <= n <= n_max of |union_{1<=k<n} F_k^{-1} F_n| / |F_n|.
Rational shulman_bound(const GroupSpec& spec, int n_max, std::size_t cap = 50'000'000);

/// All elements of word length <= r, ordered by length then canonical order.
std::vector<Element> ball(const GroupSpec& spec, int r, std::size_t cap = kDefaultEnumerationCap);
std::vector<Element> sphere(const GroupSpec& spec, int r, std::size_t cap = kDefaultEnumerationCap);

/// Breadth-first distances from the identity in the Cayley graph, up to `radius`.
/// Used as the word-length oracle for the Heisenberg and lamplighter groups.
std::vector<std::pair<Element, int>> cayley_bfs(const GroupSpec& spec, int radius, std::size_t cap = kDefaultEnumerationCap);

/// Closed-form lamplighter word length (toggles plus shortest covering walk on the line).
int lamplighter_length_formula(const Element& a);

}  // namespace stf

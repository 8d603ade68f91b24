#include "stf/group.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace stf {

namespace {

[[noreturn]] void usage(const std::string& msg) { throw UsageError(msg); }

void require_same(const Element& a, const Element& b) {
  if (!(a.spec == b.spec)) usage("group elements from different groups: " + a.spec.name() + " vs " + b.spec.name());
}

std::int64_t iabs(std::int64_t x) { return x < 0 ? -x : x; }

// Lamp sets are sorted vectors; xor is a symmetric difference.
Key lamp_xor(const Key& a, const Key& b) {
  Key out;
  out.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Key lamp_shift(const Key& lamps, std::int64_t by) {
  Key out(lamps);
  for (auto& p : out) p += by;
  return out;
}

Key lamps_of(const Element& e) { return Key(e.data.begin() + 1, e.data.end()); }

Element make_lamplighter(Key lamps, std::int64_t position) {
  Element e{GroupSpec::lamplighter(), {}};
  e.data.reserve(lamps.size() + 1);
  e.data.push_back(position);
  e.data.insert(e.data.end(), lamps.begin(), lamps.end());
  return e;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::int64_t> parse_int_list(std::string_view s, const std::string& what) {
  std::vector<std::int64_t> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    std::string tok(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (tok.empty()) usage("malformed " + what);
    char* end = nullptr;
    long long v = std::strtoll(tok.c_str(), &end, 10);
    if (*end != '\0') usage("malformed integer '" + tok + "' in " + what);
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

constexpr int kHeisenbergBfsRadius = 20;
constexpr int kLamplighterBfsRadius = 8;

const std::unordered_map<Key, int, KeyHash>& bfs_table(const GroupSpec& spec, int radius) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unordered_map<Key, int, KeyHash>> tables;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(static_cast<int>(spec.kind), spec.rank);
  auto it = tables.find(key);
  if (it == tables.end()) {
    std::unordered_map<Key, int, KeyHash> table;
    for (auto& [e, d] : cayley_bfs(spec, radius, 50'000'000)) table.emplace(e.data, d);
    it = tables.emplace(key, std::move(table)).first;
  }
  return it->second;
}

}  // namespace

GroupSpec GroupSpec::lattice(int d) {
  if (d < 1) usage("IntLattice dimension must be >= 1");
  return {GroupKind::IntLattice, d};
}

GroupSpec GroupSpec::free(int k) {
  if (k < 2) usage("free group rank must be >= 2");
  if (k > 25) usage("free group rank above 25 has no letter names");
  return {GroupKind::Free, k};
}

std::string GroupSpec::name() const {
  switch (kind) {
    case GroupKind::IntLattice: return "Z^" + std::to_string(rank);
    case GroupKind::Heisenberg: return "Heisenberg";
    case GroupKind::Lamplighter: return "Lamplighter";
    case GroupKind::Free: return "F_" + std::to_string(rank);
  }
  return "?";
}

std::size_t KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 1469598103934665603ULL ^ k.size();
  for (auto v : k) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

namespace free_group {

Key reduce(const Key& word) {
  Key out;
  out.reserve(word.size());
  for (auto l : word) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

Key multiply(const Key& a, const Key& b) {
  // Cancel the suffix of a against the prefix of b.
  std::size_t i = 0;
  while (i < a.size() && i < b.size() && a[a.size() - 1 - i] == -b[i]) ++i;
  Key out(a.begin(), a.end() - static_cast<std::ptrdiff_t>(i));
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(i), b.end());
  return out;
}

Key inverse(const Key& w) {
  Key out(w.rbegin(), w.rend());
  for (auto& l : out) l = -l;
  return out;
}

int common_prefix(const Key& a, const Key& b) {
  std::size_t n = std::min(a.size(), b.size()), i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return static_cast<int>(i);
}

bool is_prefix(const Key& prefix, const Key& word) {
  return prefix.size() <= word.size() && std::equal(prefix.begin(), prefix.end(), word.begin());
}

bool is_reduced(const Key& word) {
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (word[i] == -word[i + 1]) return false;
  return true;
}

std::vector<std::int64_t> letters(int k) {
  std::vector<std::int64_t> out;
  for (int i = 1; i <= k; ++i) {
    out.push_back(i);
    out.push_back(-i);
  }
  return out;
}

namespace {
// 'e' is reserved for the identity, so generators skip it.
char generator_char(std::int64_t index) {
  char c = static_cast<char>('a' + index - 1);
  return c >= 'e' ? static_cast<char>(c + 1) : c;
}
std::int64_t generator_index(char c) {
  if (c == 'e') return 0;
  std::int64_t idx = c - 'a' + 1;
  return c > 'e' ? idx - 1 : idx;
}
}  // namespace

std::string letter_name(std::int64_t letter) {
  std::string s(1, generator_char(iabs(letter)));
  if (letter < 0) s += "^-1";
  return s;
}

std::string format_word(const Key& w) {
  if (w.empty()) return "e";
  std::string out;
  for (auto letter : w) out += letter_name(letter);
  return out;
}

Key parse_word(int k, std::string_view text) {
  Key out;
  std::string_view s = trim(text);
  if (s == "e" || s == "1" || s.empty() || s == "()") return out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c) || c == '.' || c == '*') {
      ++i;
      continue;
    }
    if (!std::isalpha(c)) usage("malformed free-group word '" + std::string(text) + "'");
    bool inverse = std::isupper(c);
    char lower = static_cast<char>(std::tolower(c));
    if (lower == 'e') usage("'e' denotes the identity and cannot appear inside a word: '" + std::string(text) + "'");
    std::int64_t idx = generator_index(lower);
    if (idx < 1 || idx > k) usage("letter '" + std::string(1, static_cast<char>(c)) + "' is not a generator of F_" + std::to_string(k));
    ++i;
    if (s.substr(i, 3) == "^-1") {
      inverse = !inverse;
      i += 3;
    } else if (s.substr(i, 5) == "⁻¹") {  // superscript minus one
      inverse = !inverse;
      i += 5;
    }
    out.push_back(inverse ? -idx : idx);
  }
  return reduce(out);
}

}  // namespace free_group

Element lattice_element(std::vector<std::int64_t> coords) {
  GroupSpec spec = GroupSpec::lattice(static_cast<int>(coords.size()));
  return {spec, std::move(coords)};
}

Element heisenberg_element(std::int64_t a, std::int64_t b, std::int64_t c) { return {GroupSpec::heisenberg(), {a, b, c}}; }

Element lamplighter_element(std::vector<std::int64_t> lamps, std::int64_t position) {
  std::sort(lamps.begin(), lamps.end());
  // Toggling a site twice leaves it off.
  Key canon;
  for (std::size_t i = 0; i < lamps.size();) {
    std::size_t j = i;
    while (j < lamps.size() && lamps[j] == lamps[i]) ++j;
    if ((j - i) % 2 == 1) canon.push_back(lamps[i]);
    i = j;
  }
  return make_lamplighter(std::move(canon), position);
}

Element free_element(int k, const Key& word) {
  for (auto l : word)
    if (l == 0 || iabs(l) > k) usage("letter out of range for F_" + std::to_string(k));
  return {GroupSpec::free(k), free_group::reduce(word)};
}

Element identity(const GroupSpec& spec) {
  switch (spec.kind) {
    case GroupKind::IntLattice: return {spec, Key(static_cast<std::size_t>(spec.rank), 0)};
    case GroupKind::Heisenberg: return {spec, {0, 0, 0}};
    case GroupKind::Lamplighter: return {spec, {0}};
    case GroupKind::Free: return {spec, {}};
  }
  return {spec, {}};
}

bool is_identity(const Element& a) { return a == identity(a.spec); }

Element mul(const Element& a, const Element& b) {
  require_same(a, b);
  switch (a.spec.kind) {
    case GroupKind::IntLattice: {
      Element r = a;
      for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] += b.data[i];
      return r;
    }
    case GroupKind::Heisenberg:
      return {a.spec, {a.data[0] + b.data[0], a.data[1] + b.data[1], a.data[2] + b.data[2] + a.data[0] * b.data[1]}};
    case GroupKind::Lamplighter: {
      // (f,t)(f',t') = (shift_{t'} f xor f', t + t'): left multiplication moves the lamplighter.
      std::int64_t t = a.data[0], t2 = b.data[0];
      return make_lamplighter(lamp_xor(lamp_shift(lamps_of(a), t2), lamps_of(b)), t + t2);
    }
    case GroupKind::Free: return {a.spec, free_group::multiply(a.data, b.data)};
  }
  return a;
}

Element inv(const Element& a) {
  switch (a.spec.kind) {
    case GroupKind::IntLattice: {
      Element r = a;
      for (auto& v : r.data) v = -v;
      return r;
    }
    case GroupKind::Heisenberg:
      return {a.spec, {-a.data[0], -a.data[1], a.data[0] * a.data[1] - a.data[2]}};
    case GroupKind::Lamplighter: {
      std::int64_t t = a.data[0];
      return make_lamplighter(lamp_shift(lamps_of(a), -t), -t);
    }
    case GroupKind::Free: return {a.spec, free_group::inverse(a.data)};
  }
  return a;
}

int lamplighter_length_formula(const Element& a) {
  std::int64_t t = a.data[0];
  Key lamps = lamps_of(a);
  std::int64_t lo = std::min<std::int64_t>(0, t), hi = std::max<std::int64_t>(0, t);
  if (!lamps.empty()) {
    lo = std::min(lo, lamps.front());
    hi = std::max(hi, lamps.back());
  }
  // Cover [lo, hi] starting at 0 and ending at t: sweep left first or right first.
  std::int64_t left_first = (0 - lo) + (hi - lo) + (hi - t);
  std::int64_t right_first = (hi - 0) + (hi - lo) + (t - lo);
  return static_cast<int>(static_cast<std::int64_t>(lamps.size()) + std::min(left_first, right_first));
}

int word_length(const Element& a) {
  switch (a.spec.kind) {
    case GroupKind::IntLattice: {
      std::int64_t s = 0;
      for (auto v : a.data) s += iabs(v);
      return static_cast<int>(s);
    }
    case GroupKind::Free: return static_cast<int>(a.data.size());
    case GroupKind::Lamplighter: {
      int formula = lamplighter_length_formula(a);
      if (formula <= kLamplighterBfsRadius) {
        const auto& table = bfs_table(a.spec, kLamplighterBfsRadius);
        auto it = table.find(a.data);
        if (it != table.end()) return it->second;
      }
      return formula;
    }
    case GroupKind::Heisenberg: {
      const auto& table = bfs_table(a.spec, kHeisenbergBfsRadius);
      auto it = table.find(a.data);
      if (it == table.end())
        throw ResourceError("Heisenberg word length exceeds the BFS radius cap of " + std::to_string(kHeisenbergBfsRadius));
      return it->second;
    }
  }
  return 0;
}

std::vector<Element> generators(const GroupSpec& spec) {
  std::vector<Element> out;
  switch (spec.kind) {
    case GroupKind::IntLattice:
      for (int i = 0; i < spec.rank; ++i) {
        for (int s : {1, -1}) {
          Element e = identity(spec);
          e.data[static_cast<std::size_t>(i)] = s;
          out.push_back(e);
        }
      }
      break;
    case GroupKind::Heisenberg:
      out = {heisenberg_element(1, 0, 0), heisenberg_element(-1, 0, 0), heisenberg_element(0, 1, 0), heisenberg_element(0, -1, 0)};
      break;
    case GroupKind::Lamplighter:
      out = {make_lamplighter({}, 1), make_lamplighter({}, -1), make_lamplighter({0}, 0)};
      break;
    case GroupKind::Free:
      for (auto l : free_group::letters(spec.rank)) out.push_back({spec, {l}});
      break;
  }
  return out;
}

Element parse_element(const GroupSpec& spec, std::string_view text) {
  std::string_view s = trim(text);
  switch (spec.kind) {
    case GroupKind::Free: return {spec, free_group::parse_word(spec.rank, s)};
    case GroupKind::IntLattice:
    case GroupKind::Heisenberg: {
      if (s == "e") return identity(spec);
      if (!s.empty() && s.front() == '(') {
        if (s.back() != ')') usage("malformed element '" + std::string(text) + "'");
        s = s.substr(1, s.size() - 2);
      }
      auto v = parse_int_list(s, "element '" + std::string(text) + "'");
      std::size_t want = spec.kind == GroupKind::Heisenberg ? 3 : static_cast<std::size_t>(spec.rank);
      if (v.size() != want) usage("element '" + std::string(text) + "' has the wrong number of coordinates for " + spec.name());
      return {spec, v};
    }
    case GroupKind::Lamplighter: {
      if (s == "e") return identity(spec);
      // ({l1,l2,...},t)
      auto open = s.find('{'), close = s.find('}');
      if (s.empty() || s.front() != '(' || s.back() != ')' || open == std::string_view::npos || close == std::string_view::npos)
        usage("malformed lamplighter element '" + std::string(text) + "', expected ({lamps},position)");
      auto lamps = parse_int_list(s.substr(open + 1, close - open - 1), "lamp set");
      std::string_view rest = trim(s.substr(close + 1, s.size() - close - 2));
      if (rest.empty() || rest.front() != ',') usage("malformed lamplighter element '" + std::string(text) + "'");
      auto pos = parse_int_list(rest.substr(1), "lamplighter position");
      if (pos.size() != 1) usage("malformed lamplighter position in '" + std::string(text) + "'");
      return lamplighter_element(lamps, pos[0]);
    }
  }
  usage("unknown group");
}

std::string format_element(const Element& a) {
  std::ostringstream os;
  switch (a.spec.kind) {
    case GroupKind::Free: return free_group::format_word(a.data);
    case GroupKind::IntLattice:
    case GroupKind::Heisenberg:
      os << '(';
      for (std::size_t i = 0; i < a.data.size(); ++i) os << (i ? "," : "") << a.data[i];
      os << ')';
      return os.str();
    case GroupKind::Lamplighter:
      os << "({";
      for (std::size_t i = 1; i < a.data.size(); ++i) os << (i > 1 ? "," : "") << a.data[i];
      os << "}," << a.data[0] << ')';
      return os.str();
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Folner sequences

BigInt folner_size(const GroupSpec& spec, int n) {
  if (n < 0) usage("Folner index must be >= 0");
  BigInt side = 2 * n + 1;
  switch (spec.kind) {
    case GroupKind::IntLattice: return boost::multiprecision::pow(side, static_cast<unsigned>(spec.rank));
    case GroupKind::Heisenberg: return side * side * BigInt(2 * static_cast<std::int64_t>(n) * n + 1);
    case GroupKind::Lamplighter: return (BigInt(1) << (2 * n + 1)) * side;
    case GroupKind::Free: throw UnsupportedError("free groups are non-amenable and have no Folner sequence");
  }
  return 0;
}

bool folner_contains(const GroupSpec& spec, int n, const Element& x) {
  if (!(x.spec == spec)) usage("element from a different group");
  switch (spec.kind) {
    case GroupKind::IntLattice:
      return std::all_of(x.data.begin(), x.data.end(), [n](std::int64_t v) { return iabs(v) <= n; });
    case GroupKind::Heisenberg:
      return iabs(x.data[0]) <= n && iabs(x.data[1]) <= n && iabs(x.data[2]) <= static_cast<std::int64_t>(n) * n;
    case GroupKind::Lamplighter:
      return std::all_of(x.data.begin(), x.data.end(), [n](std::int64_t v) { return iabs(v) <= n; });
    case GroupKind::Free: throw UnsupportedError("free groups are non-amenable and have no Folner sequence");
  }
  return false;
}

std::vector<Element> folner_set(const GroupSpec& spec, int n, std::size_t cap) {
  BigInt size = folner_size(spec, n);
  if (size > cap) throw ResourceError("Folner set F_" + std::to_string(n) + " of " + spec.name() + " exceeds the enumeration cap (" + std::to_string(cap) + ")");
  std::vector<Element> out;
  out.reserve(size.convert_to<std::size_t>());
  switch (spec.kind) {
    case GroupKind::IntLattice: {
      Key v(static_cast<std::size_t>(spec.rank), -n);
      for (;;) {
        out.push_back({spec, v});
        std::size_t i = 0;
        while (i < v.size() && v[i] == n) v[i++] = -n;
        if (i == v.size()) break;
        ++v[i];
      }
      break;
    }
    case GroupKind::Heisenberg: {
      std::int64_t N = static_cast<std::int64_t>(n) * n;
      for (std::int64_t a = -n; a <= n; ++a)
        for (std::int64_t b = -n; b <= n; ++b)
          for (std::int64_t c = -N; c <= N; ++c) out.push_back(heisenberg_element(a, b, c));
      break;
    }
    case GroupKind::Lamplighter: {
      int sites = 2 * n + 1;
      for (std::int64_t t = -n; t <= n; ++t) {
        for (std::uint64_t mask = 0; mask < (1ULL << sites); ++mask) {
          Key lamps;
          for (int i = 0; i < sites; ++i)
            if (mask >> i & 1ULL) lamps.push_back(i - n);
          out.push_back(make_lamplighter(std::move(lamps), t));
        }
      }
      break;
    }
    case GroupKind::Free: break;
  }
  return out;
}

BigInt folner_overlap(const Element& g, int n) {
  const GroupSpec& spec = g.spec;
  switch (spec.kind) {
    case GroupKind::IntLattice: {
      BigInt count = 1;
      for (auto v : g.data) {
        std::int64_t side = 2 * static_cast<std::int64_t>(n) + 1 - iabs(v);
        if (side <= 0) return 0;
        count *= side;
      }
      return count;
    }
    case GroupKind::Heisenberg: {
      // g.(a,b,c) = (p+a, q+b, r+c+p*b)
      std::int64_t p = g.data[0], q = g.data[1], r = g.data[2];
      std::int64_t N = static_cast<std::int64_t>(n) * n;
      std::int64_t a_count = std::max<std::int64_t>(0, 2 * n + 1 - iabs(p));
      BigInt count = 0;
      for (std::int64_t b = -n; b <= n; ++b) {
        if (iabs(q + b) > n) continue;
        std::int64_t c_count = std::max<std::int64_t>(0, 2 * N + 1 - iabs(r + p * b));
        count += BigInt(a_count) * c_count;
      }
      return count;
    }
    case GroupKind::Lamplighter: {
      // g*(f,s) = (shift_s h xor f, u+s); stays in F_n iff both positions and shift_s h fit in [-n,n].
      std::int64_t u = g.data[0];
      Key h = lamps_of(g);
      std::int64_t valid = 0;
      for (std::int64_t s = -n; s <= n; ++s) {
        if (iabs(u + s) > n) continue;
        if (!h.empty() && (iabs(h.front() + s) > n || iabs(h.back() + s) > n)) continue;
        ++valid;
      }
      return (BigInt(1) << (2 * n + 1)) * valid;
    }
    case GroupKind::Free: throw UnsupportedError("free groups are non-amenable and have no Folner sequence");
  }
  return 0;
}

Rational folner_ratio(const Element& g, int n) {
  BigInt size = folner_size(g.spec, n);
  BigInt overlap = folner_overlap(g, n);
  return Rational(2 * (size - overlap), size);
}

Rational shulman_bound(const GroupSpec& spec, int n_max, std::size_t cap) {
  if (n_max < 2) usage("shulman_bound needs n_max >= 2");
  if (!spec.amenable()) throw UnsupportedError("free groups are non-amenable and have no Folner sequence");
  Rational best = 0;
  for (int n = 2; n <= n_max; ++n) {
    Rational ratio;
    if (spec.kind == GroupKind::IntLattice) {
      // F_{n-1}^{-1} F_n is the box of half-width 2n-1.
      ratio = Rational(boost::multiprecision::pow(BigInt(4 * n - 1), static_cast<unsigned>(spec.rank)), folner_size(spec, n));
    } else {
      BigInt pairs = folner_size(spec, n - 1) * folner_size(spec, n);
      if (pairs > cap) throw ResourceError("shulman_bound product enumeration exceeds the cap (" + std::to_string(cap) + ") at n=" + std::to_string(n));
      auto inner = folner_set(spec, n - 1);
      auto outer = folner_set(spec, n);
      std::unordered_set<Key, KeyHash> product;
      product.reserve(outer.size() * 4);
      for (const auto& k : inner) {
        Element ki = inv(k);
        for (const auto& x : outer) product.insert(mul(ki, x).data);
      }
      ratio = Rational(BigInt(product.size()), BigInt(outer.size()));
    }
    if (ratio > best) best = ratio;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Balls

std::vector<std::pair<Element, int>> cayley_bfs(const GroupSpec& spec, int radius, std::size_t cap) {
  auto gens = generators(spec);
  std::vector<std::pair<Element, int>> out;
  std::unordered_set<Key, KeyHash> seen;
  std::vector<Element> frontier{identity(spec)};
  seen.insert(frontier[0].data);
  out.emplace_back(frontier[0], 0);
  for (int d = 1; d <= radius && !frontier.empty(); ++d) {
    std::vector<Element> next;
    for (const auto& x : frontier) {
      for (const auto& s : gens) {
        Element y = mul(x, s);
        if (seen.insert(y.data).second) {
          next.push_back(y);
          if (seen.size() > cap) throw ResourceError("Cayley BFS of " + spec.name() + " exceeds the enumeration cap (" + std::to_string(cap) + ")");
        }
      }
    }
    std::sort(next.begin(), next.end());
    for (const auto& y : next) out.emplace_back(y, d);
    frontier = std::move(next);
  }
  return out;
}

std::vector<Element> sphere(const GroupSpec& spec, int r, std::size_t cap) {
  if (r < 0) usage("radius must be >= 0");
  std::vector<Element> out;
  switch (spec.kind) {
    case GroupKind::Free: {
      if (r == 0) return {identity(spec)};
      double est = 2.0 * spec.rank;
      for (int i = 1; i < r; ++i) est *= (2.0 * spec.rank - 1);
      if (est > static_cast<double>(cap)) throw ResourceError("sphere of radius " + std::to_string(r) + " in " + spec.name() + " exceeds the enumeration cap (" + std::to_string(cap) + ")");
      auto letters = free_group::letters(spec.rank);
      std::vector<Key> words{Key{}};
      for (int len = 0; len < r; ++len) {
        std::vector<Key> next;
        next.reserve(words.size() * letters.size());
        for (const auto& w : words)
          for (auto l : letters) {
            if (!w.empty() && w.back() == -l) continue;
            Key x = w;
            x.push_back(l);
            next.push_back(std::move(x));
          }
        words = std::move(next);
      }
      std::sort(words.begin(), words.end());
      out.reserve(words.size());
      for (auto& w : words) out.push_back({spec, std::move(w)});
      return out;
    }
    case GroupKind::IntLattice: {
      // Enumerate the box and keep L1 norm == r.
      int d = spec.rank;
      Key v(static_cast<std::size_t>(d), -r);
      for (;;) {
        std::int64_t s = 0;
        for (auto c : v) s += iabs(c);
        if (s == r) out.push_back({spec, v});
        if (out.size() > cap) throw ResourceError("lattice sphere exceeds the enumeration cap");
        std::size_t i = 0;
        while (i < v.size() && v[i] == r) v[i++] = -r;
        if (i == v.size()) break;
        ++v[i];
      }
      std::sort(out.begin(), out.end());
      return out;
    }
    case GroupKind::Heisenberg:
    case GroupKind::Lamplighter: {
      for (auto& [e, d] : cayley_bfs(spec, r, cap))
        if (d == r) out.push_back(e);
      return out;
    }
  }
  return out;
}

std::vector<Element> ball(const GroupSpec& spec, int r, std::size_t cap) {
  if (r < 0) usage("radius must be >= 0");
  if (spec.kind == GroupKind::Heisenberg || spec.kind == GroupKind::Lamplighter) {
    std::vector<Element> out;
    for (auto& [e, d] : cayley_bfs(spec, r, cap)) out.push_back(e);
    return out;
  }
  std::vector<Element> out;
  for (int i = 0; i <= r; ++i) {
    auto s = sphere(spec, i, cap);
    out.insert(out.end(), s.begin(), s.end());
    if (out.size() > cap) throw ResourceError("ball of radius " + std::to_string(r) + " exceeds the enumeration cap");
  }
  return out;
}

}  // namespace stf

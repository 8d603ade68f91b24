#include "stf/stable.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "stf/parallel.hpp"
#include "stf/simd/kernels.hpp"

namespace stf {

double sas_sample(Rng& rng, double alpha, double sigma) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw UsageError("alpha must lie in (0, 2]");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw UsageError("sigma must be positive and finite");
  const double u = std::numbers::pi * (rng.uniform_open() - 0.5);
  if (alpha == 1.0) return sigma * std::tan(u);
  const double w = rng.exponential();
  const double x = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) * std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
  return sigma * x;
}

namespace {

std::vector<KernelFunction> kernels_of(const Combination& coeffs, const RosinskiKernel& kernel) {
  std::vector<KernelFunction> fs;
  fs.reserve(coeffs.size());
  for (const auto& [c, g] : coeffs) fs.push_back(kernel.f(g));
  return fs;
}

std::string describe(const Combination& coeffs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < coeffs.size(); ++i) os << (i ? " + " : "") << format_rational(coeffs[i].first) << "*f[" << format_element(coeffs[i].second) << "]";
  return os.str();
}

}  // namespace

Scalar scale_pow_of(const Combination& coeffs, const RosinskiKernel& kernel) {
  const MeasureSpace& s = *kernel.action()->space();
  const Alpha& alpha = kernel.alpha();
  auto fs = kernels_of(coeffs, kernel);
  std::vector<Region> supports;
  for (const auto& f : fs) supports.push_back(f.support());
  Scalar total = 0;
  for (const auto& cell : common_partition(s, supports)) {
    Scalar sum = 0;
    const KernelValue* only = nullptr;
    std::size_t contributing = 0;
    Rational only_coeff;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (coeffs[i].first == 0) continue;
      if (const KernelValue* v = fs[i].at(cell)) {
        sum += Scalar(coeffs[i].first) * v->value;
        only = v;
        only_coeff = coeffs[i].first;
        ++contributing;
      }
    }
    Scalar p;
    // A lone term keeps |f_g|^alpha exact even when f_g itself is irrational.
    if (contributing == 1)
      p = Scalar(only_coeff).abs_pow(alpha) * only->abs_alpha;
    else if (contributing == 0)
      continue;
    else
      p = sum.abs_pow(alpha);
    total += p * Scalar(s.mass(cell));
  }
  return total;
}

Scalar scale_of(const Combination& coeffs, const RosinskiKernel& kernel) { return scale_pow_of(coeffs, kernel).abs_root(kernel.alpha()); }

bool StationarityReport::pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

StationarityReport stationarity_audit(const RosinskiKernel& kernel, const Element& h, const std::vector<Combination>& probes, double rel_tol) {
  StationarityReport report;
  for (const auto& probe : probes) {
    Combination shifted = probe;
    for (auto& [c, g] : shifted) g = mul(h, g);
    StationarityRow row;
    row.probe = describe(probe) + " shifted by " + format_element(h);
    row.base = scale_pow_of(probe, kernel);
    row.shifted = scale_pow_of(shifted, kernel);
    row.exact = row.base.is_exact() && row.shifted.is_exact();
    if (row.exact) {
      row.pass = row.base == row.shifted;
    } else {
      double a = row.base.to_double(), b = row.shifted.to_double();
      row.pass = std::fabs(a - b) <= rel_tol * std::max({1.0, std::fabs(a), std::fabs(b)});
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

double series_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw UsageError("series representation needs alpha in (0, 2)");
  if (alpha == 1.0) throw UnsupportedError("the series sampler does not support alpha = 1");
  return (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

// ---------------------------------------------------------------------------

LepageSampler::LepageSampler(const FieldSpec& spec) : spec_(spec) {
  const double alpha = spec.kernel.alpha().value();
  const double c_alpha = series_constant(alpha);
  if (spec.series_terms < 100) throw UsageError("series needs at least 100 terms");
  if (spec.index_set.empty()) throw UsageError("field index set is empty");
  const MeasureSpace& s = *spec.kernel.action()->space();

  std::vector<KernelFunction> fs;
  std::vector<Region> supports;
  for (const auto& g : spec.index_set) {
    fs.push_back(spec.kernel.f(g));
    supports.push_back(fs.back().support());
  }
  Region all;
  for (const auto& r : supports) all.insert(all.end(), r.begin(), r.end());
  roots_ = normalize(s, all);
  cells_ = common_partition(s, supports);

  // The field only sees M restricted to U; with m = mu(U) the series runs
  // against the probability mu|U / m and picks up a factor m^{1/alpha}.
  Rational u_mass = measure(s, roots_);
  meta_.seed = spec.seed;
  meta_.series_terms = spec.series_terms;
  meta_.alpha = alpha;
  meta_.support_mass = to_double(u_mass);
  meta_.isa = simd::isa_name(simd::active_isa());
  prefactor_ = std::pow(c_alpha * meta_.support_mass, 1.0 / alpha);

  cell_mass_.reserve(cells_.size());
  std::unordered_map<Cell, std::int32_t, KeyHash> leaves;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    cell_mass_.push_back(to_double(s.mass(cells_[i])));
    leaves.emplace(cells_[i], static_cast<std::int32_t>(i));
  }
  for (const auto& r : roots_) root_node_.push_back(build_node(r, leaves));
  double max_second_moment = 0;
  table_.assign(fs.size(), std::vector<double>(cells_.size(), 0.0));
  for (std::size_t g = 0; g < fs.size(); ++g) {
    double second = 0;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (const KernelValue* v = fs[g].at(cells_[i])) table_[g][i] = v->value.to_double();
      second += cell_mass_[i] * table_[g][i] * table_[g][i];
    }
    if (meta_.support_mass > 0) max_second_moment = std::max(max_second_moment, second / meta_.support_mass);
  }
  // sum_{i > N} E Gamma_i^{-2/alpha} = Gamma(N + 1 - p) / ((p - 1) Gamma(N)), p = 2/alpha > 1.
  const double p = 2.0 / alpha;
  const double n = static_cast<double>(spec.series_terms);
  const double tail_sum = std::exp(std::lgamma(n + 1.0 - p) - std::lgamma(n)) / (p - 1.0);
  meta_.tail_variance = prefactor_ * prefactor_ * max_second_moment * tail_sum;

  // Alias table (Vose) over the top-level support cells.
  const std::size_t r = roots_.size();
  alias_prob_.assign(r, 1.0);
  alias_other_.assign(r, 0);
  if (r > 0) {
    std::vector<double> scaled(r);
    for (std::size_t i = 0; i < r; ++i) scaled[i] = to_double(s.mass(roots_[i]) / u_mass) * static_cast<double>(r);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < r; ++i) (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
      std::uint32_t a = small.back(), b = large.back();
      small.pop_back();
      alias_prob_[a] = scaled[a];
      alias_other_[a] = b;
      scaled[b] = (scaled[b] + scaled[a]) - 1.0;
      if (scaled[b] < 1.0) {
        large.pop_back();
        small.push_back(b);
      }
    }
    for (auto i : small) alias_prob_[i] = 1.0;
    for (auto i : large) alias_prob_[i] = 1.0;
  }
}

std::uint32_t LepageSampler::build_node(const Cell& c, const std::unordered_map<Cell, std::int32_t, KeyHash>& leaves) {
  const auto idx = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  cum_.push_back(0.0);
  auto it = leaves.find(c);
  if (it != leaves.end()) {
    nodes_[idx].leaf = it->second;
    return idx;
  }
  const MeasureSpace& s = *spec_.kernel.action()->space();
  auto kids = s.children(c);
  if (kids.empty()) throw UsageError("support partition does not cover cell " + s.format_cell(c));
  const Rational parent = s.mass(c);
  // Siblings are laid out contiguously before any grandchildren.
  const auto first = static_cast<std::uint32_t>(nodes_.size());
  nodes_[idx].first = first;
  nodes_[idx].count = static_cast<std::uint32_t>(kids.size());
  Rational acc = 0;
  for (const auto& k : kids) {
    acc += s.mass(k);
    nodes_.emplace_back();
    cum_.push_back(to_double(acc / parent));
  }
  cum_.back() = 1.0;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    Node sub = nodes_[build_node(kids[i], leaves)];
    nodes_[first + i] = sub;
  }
  return idx;
}

std::size_t LepageSampler::draw_cell(Rng& rng) const {
  std::size_t slot = rng.below(roots_.size());
  std::size_t root = rng.uniform() < alias_prob_[slot] ? slot : alias_other_[slot];
  const Node* n = &nodes_[root_node_[root]];
  // Walk down the cylinder tree by child-mass ratios.
  while (n->leaf < 0) {
    double u = rng.uniform();
    std::uint32_t pick = n->first + n->count - 1;
    for (std::uint32_t i = n->first; i + 1 < n->first + n->count; ++i)
      if (u < cum_[i]) {
        pick = i;
        break;
      }
    n = &nodes_[pick];
  }
  return static_cast<std::size_t>(n->leaf);
}

void LepageSampler::fill(std::uint64_t replicate, double* out) const {
  const std::size_t g_count = table_.size();
  if (cells_.empty()) {
    for (std::size_t g = 0; g < g_count; ++g) out[g] = 0.0;
    return;
  }
  const double alpha = meta_.alpha;
  const std::size_t n = spec_.series_terms;
  Rng rng(spec_.seed, Stream::Series, replicate);
  std::vector<double> coeff(n);
  std::vector<std::int32_t> idx(n);
  double gamma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    gamma += rng.exponential();
    double eps = rng.sign();
    coeff[i] = prefactor_ * eps * std::pow(gamma, -1.0 / alpha);
    idx[i] = static_cast<std::int32_t>(draw_cell(rng));
  }
  for (std::size_t g = 0; g < g_count; ++g) out[g] = simd::gather_dot(coeff.data(), idx.data(), table_[g].data(), n);
}

FieldSample LepageSampler::sample(std::uint64_t replicate) const {
  FieldSample out;
  out.index_set = spec_.index_set;
  out.values.resize(table_.size());
  fill(replicate, out.values.data());
  out.meta = meta_;
  return out;
}

std::vector<std::vector<double>> LepageSampler::replicates(std::size_t count, int workers) const {
  return parallel_map(count, workers, [&](std::size_t r) {
    std::vector<double> row(table_.size());
    fill(r, row.data());
    return row;
  });
}

FieldSample lepage_field(const FieldSpec& spec, std::uint64_t replicate) { return LepageSampler(spec).sample(replicate); }

CharEstimate empirical_char(const std::vector<double>& samples, double theta) {
  if (samples.empty()) throw UsageError("empirical characteristic function of an empty sample");
  const double n = static_cast<double>(samples.size());
  double sc = 0, ss = 0, sc2 = 0, ss2 = 0;
  for (double y : samples) {
    double c = std::cos(theta * y), s = std::sin(theta * y);
    sc += c;
    ss += s;
    sc2 += c * c;
    ss2 += s * s;
  }
  CharEstimate out;
  out.value = {sc / n, ss / n};
  if (samples.size() > 1) {
    double vc = std::max(0.0, (sc2 - sc * sc / n) / (n - 1));
    double vs = std::max(0.0, (ss2 - ss * ss / n) / (n - 1));
    out.se_re = std::sqrt(vc / n);
    out.se_im = std::sqrt(vs / n);
  }
  return out;
}

}  // namespace stf

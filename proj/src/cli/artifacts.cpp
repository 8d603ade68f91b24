#include "cli/artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace stf::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ResourceError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_atomic(path, doc.dump(2) + "\n"); }

std::string decay_csv(const DecayTable& table) {
  const bool has_se = std::any_of(table.rows.begin(), table.rows.end(), [](const DecayRow& r) { return r.se.has_value(); });
  std::ostringstream os;
  os << "n,value,exact_p_over_q,verdict" << (has_se ? ",se" : "") << "\n";
  const std::string verdict = to_string(table.verdict);
  for (const auto& r : table.rows) {
    os << r.n << ',' << format_double(r.value) << ',' << (r.exact ? format_rational(*r.exact) : "") << ',' << verdict;
    if (has_se) os << ',' << (r.se ? format_double(*r.se) : "");
    os << "\n";
  }
  return os.str();
}

nlohmann::json decay_json(const DecayTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json row{{"n", r.n}, {"value", r.value}};
    if (r.exact) row["exact"] = format_rational(*r.exact);
    if (r.se) row["se"] = *r.se;
    rows.push_back(row);
  }
  return {{"rows", rows}, {"verdict", to_string(table.verdict)}, {"rule", table.rule}};
}

std::string decay_svg(const std::string& title, const DecayTable& table) {
  const double w = 640, h = 400, left = 70, right = 20, top = 40, bottom = 50;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : table.rows)
    if (r.value > 0 && std::isfinite(r.value)) pts.emplace_back(r.n, std::log10(r.value));
  double xmin = 0, xmax = 1, ymin = -1, ymax = 0;
  if (!pts.empty()) {
    xmin = xmax = pts[0].first;
    ymin = ymax = pts[0].second;
    for (auto [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (w - left - right); };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (h - top - bottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::string esc;
  for (char c : title) esc += c == '<' ? "&lt;" : c == '>' ? "&gt;" : c == '&' ? "&amp;" : std::string(1, c);
  os << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\">" << esc << " (" << to_string(table.verdict) << ")</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
    os << "<line x1=\"" << left - 4 << "\" y1=\"" << py(e) << "\" x2=\"" << w - right << "\" y2=\"" << py(e) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  for (const auto& r : table.rows)
    os << "<text x=\"" << px(r.n) << "\" y=\"" << h - bottom + 18 << "\" text-anchor=\"middle\">" << r.n << "</text>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">n</text>\n";
  if (!pts.empty()) {
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << px(pts[i].first) << ',' << py(pts[i].second);
    os << "\"/>\n";
    for (auto [x, y] : pts) os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace stf::cli

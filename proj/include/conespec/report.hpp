#pragma once

// Tabular and plot output: CSV with '#' provenance lines, log-log SVG.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "conespec/error.hpp"

namespace conespec {

inline constexpr const char* kVersion = "1.0.0";

/// %.12g, with nan/inf spelled the same on every platform.
inline std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& operator<<(double v) { return add(fmt_num(v)); }
    Row& operator<<(int v) { return add(std::to_string(v)); }
    Row& operator<<(long v) { return add(std::to_string(v)); }
    Row& operator<<(const std::string& v) { return add(quote(v)); }
    Row& operator<<(const char* v) { return add(quote(v)); }

   private:
    friend class CsvTable;
    Row& add(std::string s) {
      cells_.push_back(std::move(s));
      return *this;
    }
    static std::string quote(const std::string& s) {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
      return out + "\"";
    }
    std::vector<std::string> cells_;
  };

  Row& row() { return rows_.emplace_back(); }
  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }

  /// Provenance lines first; the timestamp line is the only varying one.
  std::string render(const std::string& config_hash, bool timestamp = true) const {
    std::ostringstream os;
    os << "# conespec version=" << kVersion << "\n";
    os << "# config_hash=" << config_hash << "\n";
    if (timestamp) {
      char buf[64];
      const std::time_t t = std::time(nullptr);
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
      os << "# generated_at=" << buf << "\n";
    }
    for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
    os << "\n";
    for (const auto& r : rows_) {
      require(r.cells_.size() == header_.size(), ErrorCode::Domain, "CSV row width mismatch");
      for (std::size_t i = 0; i < r.cells_.size(); ++i) os << (i ? "," : "") << r.cells_[i];
      os << "\n";
    }
    return os.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Config, "cannot write '" + path + "'");
  out << text;
}

struct Series {
  std::string label;
  std::vector<double> x, y;
};

/// Log-log polylines. Non-positive points are skipped.
inline std::string svg_loglog(const std::string& title, const std::string& xlabel,
                              const std::string& ylabel, const std::vector<Series>& series) {
  const double W = 640, H = 440, L = 70, R = 160, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.x[i] > 0 && s.y[i] > 0) {
        x0 = std::min(x0, std::log10(s.x[i]));
        x1 = std::max(x1, std::log10(s.x[i]));
        y0 = std::min(y0, std::log10(s.y[i]));
        y1 = std::max(y1, std::log10(s.y[i]));
      }
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
  y0 = std::floor(y0);
  y1 = std::ceil(y1);
  const auto px = [&](double lx) { return L + (lx - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double ly) { return H - B - (ly - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream os;
  char buf[160];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\">" << title << "</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  os << buf;
  for (double e = y0; e <= y1 + 1e-9; e += 1.0) {
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">1e%d</text>\n",
                  L - 6, py(e) + 4, int(e));
    os << buf;
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
     << xlabel << " (log)</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\" text-anchor=\"middle\">" << ylabel << " (log)</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 10];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.x[i] > 0 && s.y[i] > 0) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(std::log10(s.x[i])), py(std::log10(s.y[i])));
        os << buf;
      }
    os << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" fill=\"%s\">", W - R + 10,
                  T + 14.0 * (k + 1), c);
    os << buf << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace conespec

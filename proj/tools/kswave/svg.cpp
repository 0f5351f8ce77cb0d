#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace kswave::svg {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
}

void axes(std::ostringstream& out, const Frame& f, const std::string& xl, const std::string& yl, bool y_ticks) {
  out << "<g stroke=\"black\" fill=\"none\">\n"
      << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(kWidth - kLeft - kRight)
      << "\" height=\"" << fmt(kHeight - kTop - kBottom) << "\"/>\n</g>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
    out << "<text x=\"" << fmt(f.px(x)) << "\" y=\"" << fmt(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">"
        << tick(x) << "</text>\n";
    if (!y_ticks) continue;
    const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
    out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(f.py(y) + 4) << "\" text-anchor=\"end\">" << tick(y)
        << "</text>\n";
  }
  out << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"" << fmt(kHeight - 12) << "\" text-anchor=\"middle\">"
      << escape(xl) << "</text>\n";
  if (!yl.empty()) {
    out << "<text x=\"16\" y=\"" << fmt(kHeight / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fmt(kHeight / 2) << ")\">" << escape(yl) << "</text>\n";
  }
}

void legend(std::ostringstream& out, const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = kTop + 14;
  for (const auto& [label, color] : entries) {
    out << "<rect x=\"" << fmt(kWidth - kRight - 150) << "\" y=\"" << fmt(y - 9) << "\" width=\"10\" height=\"10\" fill=\""
        << color << "\"/>\n<text x=\"" << fmt(kWidth - kRight - 135) << "\" y=\"" << fmt(y) << "\">" << escape(label)
        << "</text>\n";
    y += 16;
  }
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  const double pad = 0.05 * (y1 - y0);
  const Frame f{x0, x1, y0 - pad, y1 + pad};

  std::ostringstream out;
  header(out, title);
  axes(out, f, x_label, y_label, true);
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    // At most ~2000 vertices per series.
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 2000);
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << fmt(f.px(s.x[i])) << ',' << fmt(f.py(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    entries.emplace_back(s.label, s.color);
  }
  legend(out, entries);
  out << "</svg>\n";
  return out.str();
}

std::string strip_plot(const std::string& title, const std::string& x_label, const std::vector<StripMark>& marks) {
  static const char* palette[] = {"#2ca02c", "#d62728", "#ff7f0e", "#9467bd", "#8c564b"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  std::map<std::string, std::string> colors;
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& m : marks) {
    x0 = std::min(x0, m.x);
    x1 = std::max(x1, m.x);
    if (!colors.count(m.category)) {
      const auto c = palette[colors.size() % 5];
      colors[m.category] = c;
      entries.emplace_back(m.category, c);
    }
  }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0;
  if (!(x1 > x0)) x1 = x0 + 1.0;
  const double pad = 0.03 * (x1 - x0);
  const Frame f{x0 - pad, x1 + pad, 0.0, 1.0};
  std::ostringstream out;
  header(out, title);
  axes(out, f, x_label, "", false);
  for (const auto& m : marks) {
    out << "<circle cx=\"" << fmt(f.px(m.x)) << "\" cy=\"" << fmt(f.py(0.5)) << "\" r=\"5\" fill=\""
        << colors[m.category] << "\" fill-opacity=\"0.7\"/>\n";
  }
  legend(out, entries);
  out << "</svg>\n";
  return out.str();
}

std::string heatmap(const std::string& title, const std::vector<std::string>& rows,
                    const std::vector<std::string>& cols, const std::vector<std::vector<double>>& values,
                    double scale) {
  const double left = 170, top = 40;
  const double cw = std::max(40.0, 360.0 / std::max<std::size_t>(1, cols.size()));
  const double ch = 18;
  const double width = left + cw * cols.size() + 20;
  const double height = top + ch * rows.size() + 60;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fmt(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(top + ch * i + 13) << "\" text-anchor=\"end\">"
        << escape(rows[i]) << "</text>\n";
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double v = values[i][j];
      std::string fill = "#bbbbbb";
      if (std::isfinite(v)) {
        const int g = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(v / scale, 0.0, 1.0))));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#ff%02x%02x", g, g);
        fill = buf;
      }
      out << "<rect x=\"" << fmt(left + cw * j) << "\" y=\"" << fmt(top + ch * i) << "\" width=\"" << fmt(cw)
          << "\" height=\"" << fmt(ch) << "\" fill=\"" << fill << "\" stroke=\"white\"/>\n";
    }
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out << "<text x=\"" << fmt(left + cw * (j + 0.5)) << "\" y=\"" << fmt(top + ch * rows.size() + 14)
        << "\" text-anchor=\"middle\">" << escape(cols[j]) << "</text>\n";
  }
  out << "<text x=\"" << fmt(width / 2) << "\" y=\"" << fmt(height - 10) << "\" text-anchor=\"middle\">colour: |c_emp - c*| / c*, red at "
      << tick(scale) << "</text>\n</svg>\n";
  return out.str();
}

}  // namespace kswave::svg

#include "pob/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace pob::svg {
namespace {

constexpr double kLeft = 56, kRight = 16, kTop = 32, kBottom = 44;

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  std::string s(buf, r.ptr);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle",
                 int size = 11, const std::string& extra = {}) {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + std::to_string(size) +
         "\" text-anchor=\"" + anchor + "\"" + extra + ">" + escape(s) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const std::string& stroke) {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
         num(y2) + "\" stroke=\"" + stroke + "\"/>\n";
}

struct Frame {
  double x0, y0, w, h;
  double y_min, y_max;
  double ypix(double v) const {
    v = std::clamp(v, y_min, y_max);
    return y0 + h - (v - y_min) / (y_max - y_min) * h;
  }
};

std::string open(const Chart& c) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(c.width) +
         "\" height=\"" + std::to_string(c.height) + "\" viewBox=\"0 0 " +
         std::to_string(c.width) + " " + std::to_string(c.height) +
         "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string axes(const Chart& c, const Frame& f) {
  std::string out;
  out += text(c.width / 2.0, 20, c.title, "middle", 13);
  out += line(f.x0, f.y0, f.x0, f.y0 + f.h, "black");
  out += line(f.x0, f.y0 + f.h, f.x0 + f.w, f.y0 + f.h, "black");
  for (int t = 0; t <= 4; ++t) {
    const double v = f.y_min + (f.y_max - f.y_min) * t / 4.0;
    const double y = f.ypix(v);
    out += line(f.x0 - 4, y, f.x0, y, "black");
    out += text(f.x0 - 6, y + 4, num(v), "end", 10);
  }
  out += text(f.x0 + f.w / 2, c.height - 8, c.x_label);
  const double ly = f.y0 + f.h / 2;
  out += text(14, ly, c.y_label, "middle", 11,
              " transform=\"rotate(-90 14 " + num(ly) + ")\"");
  return out;
}

Frame frame_of(const Chart& c) {
  const double hi = c.y_max > c.y_min ? c.y_max : c.y_min + 1.0;
  return {kLeft, kTop, c.width - kLeft - kRight, c.height - kTop - kBottom, c.y_min, hi};
}

}  // namespace

std::string bar_chart(const Chart& chart, std::span<const std::string> labels,
                      std::span<const double> values, const std::string& color) {
  const Frame f = frame_of(chart);
  std::string out = open(chart) + axes(chart, f);
  const std::size_t n = std::min(labels.size(), values.size());
  if (n) {
    const double slot = f.w / static_cast<double>(n);
    const double bw = slot * 0.7;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = f.x0 + slot * static_cast<double>(i) + (slot - bw) / 2;
      const double top = f.ypix(values[i]);
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(top) + "\" width=\"" + num(bw) +
             "\" height=\"" + num(f.y0 + f.h - top) + "\" fill=\"" + color + "\"/>\n";
      out += text(x + bw / 2, f.y0 + f.h + 14, labels[i], "middle", 10);
    }
  }
  return out + "</svg>\n";
}

std::string line_chart(const Chart& chart, std::span<const Series> series) {
  const Frame f = frame_of(chart);
  std::string out = open(chart) + axes(chart, f);
  double x_lo = 0.0, x_hi = 0.0;
  bool any = false;
  for (const auto& s : series)
    for (const double x : s.x) {
      x_lo = any ? std::min(x_lo, x) : x;
      x_hi = any ? std::max(x_hi, x) : x;
      any = true;
    }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  auto xpix = [&](double x) { return f.x0 + (x - x_lo) / (x_hi - x_lo) * f.w; };
  for (int t = 0; t <= 4; ++t) {
    const double v = x_lo + (x_hi - x_lo) * t / 4.0;
    out += line(xpix(v), f.y0 + f.h, xpix(v), f.y0 + f.h + 4, "black");
    out += text(xpix(v), f.y0 + f.h + 16, num(v), "middle", 10);
  }
  double legend_y = f.y0 + 12;
  for (const auto& s : series) {
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!pts.empty()) pts += ' ';
      pts += num(xpix(s.x[i])) + "," + num(f.ypix(s.y[i]));
    }
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\"" +
           (s.dashed ? " stroke-dasharray=\"5,4\"" : "") + " points=\"" + pts + "\"/>\n";
    if (!s.name.empty()) {
      out += line(f.x0 + 10, legend_y - 4, f.x0 + 30, legend_y - 4, s.color);
      out += text(f.x0 + 36, legend_y, s.name, "start", 10);
      legend_y += 14;
    }
  }
  return out + "</svg>\n";
}

std::string side_by_side(const std::string& left, const std::string& right, int width,
                         int height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(2 * width) +
         "\" height=\"" + std::to_string(height) + "\">\n<g>\n" + left +
         "</g>\n<g transform=\"translate(" + std::to_string(width) + ",0)\">\n" + right +
         "</g>\n</svg>\n";
}

}  // namespace pob::svg

#include "cic/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cic::io {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string header(double width, double height, const std::optional<std::string>& timestamp) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (timestamp) out << "<!-- generated " << *timestamp << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  return out.str();
}

}  // namespace

std::string flow_svg(const std::vector<trainer::FlowPanel>& panels, const std::optional<std::string>& timestamp) {
  constexpr double panel = 240.0;
  constexpr double pad = 20.0;
  const double width = pad + static_cast<double>(panels.size()) * (panel + pad);
  const double height = panel + 2.0 * pad + 20.0;
  std::ostringstream out;
  out << header(width, height, timestamp);
  out << "<defs><marker id=\"head\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" orient=\"auto\">"
         "<path d=\"M0,0 L6,3 L0,6 z\" fill=\"#1f4e79\"/></marker></defs>\n";

  double longest = 0.0;
  std::size_t per_panel = 1;
  for (const auto& p : panels) {
    per_panel = std::max(per_panel, p.arrows.size());
    for (const auto& a : p.arrows) longest = std::max(longest, std::hypot(a.dx, a.dy));
  }
  const double cells = std::max(1.0, std::sqrt(static_cast<double>(per_panel)));
  // Longest arrow spans 0.9 of a grid cell.
  const double scale = longest > 0.0 ? 0.9 * (2.0 / cells) / longest : 0.0;

  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double ox = pad + static_cast<double>(i) * (panel + pad);
    const double oy = pad + 20.0;
    const auto px = [&](double x) { return ox + (x + 1.0) * 0.5 * panel; };
    const auto py = [&](double y) { return oy + (1.0 - y) * 0.5 * panel; };
    out << "<g class=\"panel\" data-skill=\"" << num(panels[i].skill_value) << "\">\n";
    out << "<text x=\"" << num(ox) << "\" y=\"" << num(pad + 12.0) << "\" font-size=\"12\">z = "
        << num(panels[i].skill_value) << "</text>\n";
    out << "<rect x=\"" << num(ox) << "\" y=\"" << num(oy) << "\" width=\"" << num(panel) << "\" height=\""
        << num(panel) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (const auto& a : panels[i].arrows) {
      out << "<line class=\"arrow\" x1=\"" << num(px(a.x)) << "\" y1=\"" << num(py(a.y)) << "\" x2=\""
          << num(px(a.x + a.dx * scale)) << "\" y2=\"" << num(py(a.y + a.dy * scale)) << "\" data-dx=\""
          << num(a.dx) << "\" data-dy=\"" << num(a.dy)
          << "\" stroke=\"#1f4e79\" stroke-width=\"1.2\" marker-end=\"url(#head)\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string interval_svg(const std::vector<IntervalRow>& rows, const std::optional<std::string>& timestamp) {
  constexpr double width = 520.0;
  constexpr double row_h = 36.0;
  constexpr double left = 150.0;
  constexpr double right = 30.0;
  const double height = 40.0 + row_h * static_cast<double>(rows.size());
  double lo = 0.0;
  double hi = 1.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.lo);
    hi = std::max(hi, r.hi);
  }
  const double span = hi - lo > 0.0 ? hi - lo : 1.0;
  const auto sx = [&](double v) { return left + (v - lo) / span * (width - left - right); };
  std::ostringstream out;
  out << header(width, height, timestamp);
  out << "<text x=\"10\" y=\"18\" font-size=\"12\">desk-scale results, stratified bootstrap intervals</text>\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double y = 40.0 + row_h * static_cast<double>(i) + row_h / 2.0;
    out << "<g class=\"interval\" data-label=\"" << r.label << "\">\n";
    out << "<text x=\"10\" y=\"" << num(y + 4.0) << "\" font-size=\"12\">" << r.label << "</text>\n";
    out << "<rect x=\"" << num(sx(r.lo)) << "\" y=\"" << num(y - 8.0) << "\" width=\""
        << num(std::max(1.0, sx(r.hi) - sx(r.lo))) << "\" height=\"16\" fill=\"#9dc3e6\"/>\n";
    out << "<line x1=\"" << num(sx(r.point)) << "\" y1=\"" << num(y - 10.0) << "\" x2=\"" << num(sx(r.point))
        << "\" y2=\"" << num(y + 10.0) << "\" stroke=\"#1f4e79\" stroke-width=\"2\"/>\n";
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cic::io

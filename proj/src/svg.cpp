#include "eit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace eit {

namespace {

constexpr int kCanvas = 480;
constexpr int kMargin = 40;

std::string num(Scalar x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

// world (0,1)^2 to pixel coordinates, y flipped
Scalar px(Scalar x) { return kMargin + x * (kCanvas - 2 * kMargin); }
Scalar py(Scalar y) { return kCanvas - kMargin - y * (kCanvas - 2 * kMargin); }

std::string header() {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas
    << "\" height=\"" << kCanvas << "\" viewBox=\"0 0 " << kCanvas << " "
    << kCanvas << "\">\n";
  return s.str();
}

std::string polygon_path(const Polygon& p) {
  std::ostringstream s;
  for (size_t i = 0; i < p.vertices.size(); ++i)
    s << (i == 0 ? "M" : "L") << num(px(p.vertices[i].x())) << ","
      << num(py(p.vertices[i].y()));
  s << "Z";
  return s.str();
}

std::string domain_rect(std::ostringstream& s) {
  s << "<rect x=\"" << num(px(0)) << "\" y=\"" << num(py(1)) << "\" width=\""
    << num(px(1) - px(0)) << "\" height=\"" << num(px(1) - px(0))
    << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  return "";
}

// grayscale fill for a value on a log scale over [kSigmaMin, kSigmaMax]
std::string value_fill(Scalar v, Scalar background) {
  const Scalar r = std::log(v / background);
  const Scalar t = std::clamp(0.5 + r / (2 * std::log(10.0)), 0.0, 1.0);
  const int g = static_cast<int>(std::lround(230 - 160 * t));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)", g, g, 255 - g / 4);
  return buf;
}

Vec2 side_point_world(Side side, Scalar t) {
  switch (side) {
    case Side::bottom: return {t, 0.0};
    case Side::right: return {1.0, t};
    case Side::top: return {1.0 - t, 1.0};
    case Side::left: return {0.0, 1.0 - t};
  }
  return {0, 0};
}

}  // namespace

std::string svg_conductivity(const Conductivity& sigma,
                             const ElectrodeLayout& layout) {
  std::ostringstream s;
  s << header();
  domain_rect(s);
  for (size_t i = 0; i < sigma.partition.inclusions.size(); ++i) {
    s << "<path d=\"" << polygon_path(sigma.partition.inclusions[i])
      << "\" fill=\"" << value_fill(sigma.values[i], sigma.background)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    const Vec2 c = polygon_centroid(sigma.partition.inclusions[i]);
    s << "<text x=\"" << num(px(c.x())) << "\" y=\"" << num(py(c.y()))
      << "\" font-size=\"12\" text-anchor=\"middle\">" << sigma.values[i]
      << "</text>\n";
  }
  // electrodes drawn as thick gray strokes just outside the square
  const Scalar off = 6.0;
  for (const Electrode& e : layout.electrodes) {
    const Scalar shrink = 0.012;  // small gap between electrodes
    const Vec2 a = side_point_world(e.side, e.t0 + shrink);
    const Vec2 b = side_point_world(e.side, e.t1 - shrink);
    Vec2 n(0, 0);
    switch (e.side) {
      case Side::bottom: n = {0, -1}; break;
      case Side::right: n = {1, 0}; break;
      case Side::top: n = {0, 1}; break;
      case Side::left: n = {-1, 0}; break;
    }
    s << "<line x1=\"" << num(px(a.x()) + off * n.x()) << "\" y1=\""
      << num(py(a.y()) - off * n.y()) << "\" x2=\"" << num(px(b.x()) + off * n.x())
      << "\" y2=\"" << num(py(b.y()) - off * n.y())
      << "\" stroke=\"gray\" stroke-width=\"6\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_overlay(const Partition& reconstructed,
                        const Partition* truth) {
  std::ostringstream s;
  s << header();
  domain_rect(s);
  if (truth)
    for (const Polygon& p : truth->inclusions)
      s << "<path d=\"" << polygon_path(p)
        << "\" fill=\"none\" stroke=\"blue\" stroke-width=\"2\"/>\n";
  for (const Polygon& p : reconstructed.inclusions)
    s << "<path d=\"" << polygon_path(p)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  s << "</svg>\n";
  return s.str();
}

std::string svg_convergence(const ReconTrace& trace) {
  std::ostringstream s;
  s << header();
  if (trace.records.empty()) {
    s << "</svg>\n";
    return s.str();
  }
  Scalar jmin = 1e300, jmax = -1e300;
  for (const auto& r : trace.records) {
    if (r.j_value > 0) {
      jmin = std::min(jmin, std::log10(r.j_value));
      jmax = std::max(jmax, std::log10(r.j_value));
    }
  }
  if (jmax <= jmin) jmax = jmin + 1;
  const int n = static_cast<int>(trace.records.size());
  s << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
    << kCanvas - 2 * kMargin << "\" height=\"" << kCanvas - 2 * kMargin
    << "\" fill=\"none\" stroke=\"black\"/>\n<polyline fill=\"none\" "
       "stroke=\"black\" stroke-width=\"1.5\" points=\"";
  for (int i = 0; i < n; ++i) {
    const Scalar x = n > 1 ? static_cast<Scalar>(i) / (n - 1) : 0.0;
    const Scalar lj = trace.records[i].j_value > 0
                          ? std::log10(trace.records[i].j_value)
                          : jmin;
    const Scalar y = (lj - jmin) / (jmax - jmin);
    s << num(px(x)) << "," << num(py(y)) << " ";
  }
  s << "\"/>\n<text x=\"" << kCanvas / 2 << "\" y=\"" << kCanvas - 10
    << "\" font-size=\"12\" text-anchor=\"middle\">iteration (0.."
    << trace.records.back().iter << ")</text>\n<text x=\"12\" y=\""
    << kMargin - 8 << "\" font-size=\"12\">log10 J, range [" << num(jmin)
    << ", " << num(jmax) << "]</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace eit

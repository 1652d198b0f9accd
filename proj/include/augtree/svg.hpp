#pragma once

// SVG rendering of the cells at one level, grouped and colored by horizontal component.

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "augtree/tree_metric.hpp"

namespace augtree {

namespace detail {

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[i % 10];
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

// First two coordinates of B^{-level} v as doubles (second is 0 in dimension 1).
inline std::pair<double, double> project(const RatMatrix& scale, const RatVector& v) {
  const RatVector w = scale * v;
  return {static_cast<double>(w[0]), w.size() > 1 ? static_cast<double>(w[1]) : 0.0};
}

}  // namespace detail

inline std::string emit_svg(const Geometry& geo, std::size_t level) {
  const IfsSpec& spec = geo.spec();
  AugmentedTree tree(geo, std::max(level, spec.caps.max_depth));
  const auto ids = tree.components_at(level);
  const RatMatrix scale = power(inverse(to_rational(spec.matrix)), static_cast<unsigned>(level));
  const std::size_t d = spec.dimension;

  struct Shape {
    std::size_t component;
    std::string word;
    std::vector<std::pair<double, double>> outline;  // polygon, or a single point
  };
  std::vector<Shape> shapes;
  std::vector<std::pair<std::pair<double, double>, std::pair<double, double>>> edges;
  double lo_x = std::numeric_limits<double>::max(), lo_y = lo_x;
  double hi_x = std::numeric_limits<double>::lowest(), hi_y = hi_x;
  auto grow = [&](std::pair<double, double> p) {
    lo_x = std::min(lo_x, p.first);
    hi_x = std::max(hi_x, p.first);
    lo_y = std::min(lo_y, p.second);
    hi_y = std::max(hi_y, p.second);
  };

  for (std::size_t c = 0; c < ids.size(); ++c) {
    const Component& comp = tree.component(ids[c]);
    std::vector<std::pair<double, double>> centers;
    for (const auto& mem : comp.members) {
      Shape s{c, word_to_string(mem.word), {}};
      if (geo.box_backend()) {
        const RealizedBox box = geo.realize(mem.cell);
        RatVector corner = to_rational(box.lo);
        std::vector<RatVector> corners;
        if (d == 1) {
          corners = {corner, to_rational(box.hi)};
        } else {
          RatVector a = corner, b = corner, e = corner;
          a[0] = Rational(box.hi[0]);
          b[0] = Rational(box.hi[0]);
          b[1] = Rational(box.hi[1]);
          e[1] = Rational(box.hi[1]);
          corners = {corner, a, b, e};
        }
        for (const auto& v : corners) s.outline.push_back(detail::project(scale, v));
      } else {
        s.outline.push_back(detail::project(scale, to_rational(mem.cell.translation)));
      }
      double cx = 0, cy = 0;
      for (auto p : s.outline) {
        grow(p);
        cx += p.first;
        cy += p.second;
      }
      centers.emplace_back(cx / static_cast<double>(s.outline.size()), cy / static_cast<double>(s.outline.size()));
      shapes.push_back(std::move(s));
    }
    for (auto [i, j] : geo.adjacent_pairs(comp.cells())) edges.push_back({centers[i], centers[j]});
  }

  const double width = 800, height = d == 1 ? 200 : 800, margin = 20;
  const double span_x = std::max(hi_x - lo_x, 1e-12), span_y = std::max(hi_y - lo_y, 1e-12);
  const double unit = d == 1 ? (width - 2 * margin) / span_x
                             : std::min((width - 2 * margin) / span_x, (height - 2 * margin) / span_y);
  auto sx = [&](double x) { return margin + (x - lo_x) * unit; };
  auto sy = [&](double y) { return d == 1 ? height / 2 : height - margin - (y - lo_y) * unit; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<title>" << (spec.name.empty() ? "cells" : spec.name) << " level " << level << "</title>\n";
  std::size_t current = static_cast<std::size_t>(-1);
  for (const auto& s : shapes) {
    if (s.component != current) {
      if (current != static_cast<std::size_t>(-1)) out << "</g>\n";
      current = s.component;
      out << "<g class=\"component\" id=\"component-" << current + 1 << "\" fill=\"" << detail::palette(current)
          << "\" stroke=\"#000\" stroke-width=\"0.5\" fill-opacity=\"0.6\">\n";
    }
    if (s.outline.size() == 1) {
      out << "<circle cx=\"" << detail::fmt(sx(s.outline[0].first)) << "\" cy=\""
          << detail::fmt(sy(s.outline[0].second)) << "\" r=\"4\"><title>" << s.word << "</title></circle>\n";
    } else if (d == 1) {
      const double x0 = sx(s.outline[0].first), x1 = sx(s.outline[1].first);
      out << "<rect x=\"" << detail::fmt(std::min(x0, x1)) << "\" y=\"" << detail::fmt(height / 2 - 20)
          << "\" width=\"" << detail::fmt(std::abs(x1 - x0)) << "\" height=\"40\"><title>" << s.word
          << "</title></rect>\n";
    } else {
      out << "<polygon points=\"";
      for (std::size_t i = 0; i < s.outline.size(); ++i)
        out << (i ? " " : "") << detail::fmt(sx(s.outline[i].first)) << "," << detail::fmt(sy(s.outline[i].second));
      out << "\"><title>" << s.word << "</title></polygon>\n";
    }
  }
  if (current != static_cast<std::size_t>(-1)) out << "</g>\n";
  if (!geo.box_backend() && !edges.empty()) {
    out << "<g class=\"edges\" stroke=\"#333\" stroke-width=\"1\">\n";
    for (const auto& [a, b] : edges)
      out << "<line x1=\"" << detail::fmt(sx(a.first)) << "\" y1=\"" << detail::fmt(sy(a.second)) << "\" x2=\""
          << detail::fmt(sx(b.first)) << "\" y2=\"" << detail::fmt(sy(b.second)) << "\"/>\n";
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace augtree

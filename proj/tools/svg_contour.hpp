#pragma once

// Zero-level contour of a scanned g(k, r) grid as SVG line segments
// (marching squares, linear interpolation along cell edges). x is log10 k,
// y is r; cells with an undefined corner are skipped.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "freecontract/additivity.hpp"

namespace fc::tools {

inline std::string zero_contour_svg(const std::vector<int>& ks,
                                    const std::vector<double>& rs,
                                    const std::vector<ScanCell>& cells) {
  constexpr double W = 640.0, H = 480.0, pad = 40.0;
  const std::size_t nk = ks.size(), nr = rs.size();
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * pad
     << "\" height=\"" << H + 2 * pad << "\">\n";
  os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W << "\" height=\"" << H
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (nk < 2 || nr < 2) {
    os << "</svg>\n";
    return os.str();
  }
  const double x0 = std::log10(ks.front()), x1 = std::log10(ks.back());
  const double y0 = rs.front(), y1 = rs.back();
  auto px = [&](double lk) { return pad + (lk - x0) / (x1 - x0) * W; };
  auto py = [&](double r) { return pad + H - (r - y0) / (y1 - y0) * H; };

  struct P { double x, y; };
  for (std::size_t i = 0; i + 1 < nk; ++i) {
    for (std::size_t j = 0; j + 1 < nr; ++j) {
      const ScanCell* c[4] = {&cells[i * nr + j], &cells[(i + 1) * nr + j],
                              &cells[(i + 1) * nr + j + 1], &cells[i * nr + j + 1]};
      bool ok = true;
      for (auto* cc : c) ok = ok && cc->g.has_value();
      if (!ok) continue;
      std::vector<P> hits;
      for (int e = 0; e < 4; ++e) {
        const ScanCell& a = *c[e];
        const ScanCell& b = *c[(e + 1) % 4];
        const double ga = *a.g, gb = *b.g;
        if ((ga < 0.0) == (gb < 0.0)) continue;
        const double s = ga / (ga - gb);
        const double la = std::log10(a.k), lb = std::log10(b.k);
        hits.push_back({px(la + s * (lb - la)), py(a.r + s * (b.r - a.r))});
      }
      for (std::size_t h = 0; h + 1 < hits.size(); h += 2) {
        os << "<line x1=\"" << hits[h].x << "\" y1=\"" << hits[h].y << "\" x2=\""
           << hits[h + 1].x << "\" y2=\"" << hits[h + 1].y
           << "\" stroke=\"blue\" stroke-width=\"1\"/>\n";
      }
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace fc::tools

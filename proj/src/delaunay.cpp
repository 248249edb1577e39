#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bamg/chains.hpp"

namespace bamg {

namespace {

struct Triangle {
  std::array<Index, 3> v;
  double cx, cy, r2;
};

Triangle make_triangle(const Coordinates& p, Index a, Index b, Index c) {
  const double ax = p[a][0], ay = p[a][1];
  const double bx = p[b][0] - ax, by = p[b][1] - ay;
  const double cx = p[c][0] - ax, cy = p[c][1] - ay;
  const double d = 2.0 * (bx * cy - by * cx);
  Triangle t{{a, b, c}, ax, ay, 0.0};
  if (d == 0.0) {
    t.r2 = std::numeric_limits<double>::infinity();
    return t;
  }
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const double ux = (cy * b2 - by * c2) / d;
  const double uy = (bx * c2 - cx * b2) / d;
  t.cx = ax + ux;
  t.cy = ay + uy;
  t.r2 = ux * ux + uy * uy;
  return t;
}

bool in_circumcircle(const Triangle& t, double x, double y) {
  const double dx = x - t.cx;
  const double dy = y - t.cy;
  return dx * dx + dy * dy < t.r2 * (1.0 - 1e-12);
}

}  // namespace

std::vector<std::pair<Index, Index>> delaunay_edges(const Coordinates& points) {
  const Index n = points.size();
  if (n < 3) throw std::invalid_argument("delaunay_edges: need at least three points");
  Coordinates p = points;
  double xmin = p[0][0], xmax = p[0][0], ymin = p[0][1], ymax = p[0][1];
  for (const auto& q : p) {
    xmin = std::min(xmin, q[0]);
    xmax = std::max(xmax, q[0]);
    ymin = std::min(ymin, q[1]);
    ymax = std::max(ymax, q[1]);
  }
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double big = 200.0 * span;
  p.push_back({cx - big, cy - big});
  p.push_back({cx + big, cy - big});
  p.push_back({cx, cy + big});

  std::vector<Triangle> tris{make_triangle(p, n, n + 1, n + 2)};
  std::vector<Triangle> keep;
  std::vector<std::array<Index, 2>> edges;
  for (Index k = 0; k < n; ++k) {
    const double x = p[k][0], y = p[k][1];
    keep.clear();
    edges.clear();
    for (const auto& t : tris) {
      if (in_circumcircle(t, x, y)) {
        for (int e = 0; e < 3; ++e) {
          Index a = t.v[e], b = t.v[(e + 1) % 3];
          if (a > b) std::swap(a, b);
          edges.push_back({a, b});
        }
      } else {
        keep.push_back(t);
      }
    }
    std::sort(edges.begin(), edges.end());
    for (Index e = 0; e < edges.size();) {
      Index f = e + 1;
      while (f < edges.size() && edges[f] == edges[e]) ++f;
      if (f - e == 1) keep.push_back(make_triangle(p, edges[e][0], edges[e][1], k));
      e = f;
    }
    tris.swap(keep);
  }

  std::vector<std::pair<Index, Index>> out;
  for (const auto& t : tris) {
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    for (int e = 0; e < 3; ++e) {
      Index a = t.v[e], b = t.v[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      out.emplace_back(a, b);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace bamg

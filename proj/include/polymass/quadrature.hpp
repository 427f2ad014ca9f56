#pragma once

#include <array>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <vector>

#include "polymass/polyhedron.hpp"

namespace polymass {

/// Points-and-weights rule over one face or edge region. Weights are positive
/// and sum to the Euclidean volume of the region; all points lie inside it.
struct QuadratureRule {
  std::vector<Vector> points;
  std::vector<double> weights;
  int level = 0;
};

struct IntegrationResult {
  double value = 0.0;
  std::optional<double> error_estimate;  // |level - (level-1)| when available
};

namespace quad {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    const double ww = 2.0 / ((1.0 - t * t) * dp * dp);
    w[i] = ww;
    w[n - 1 - i] = ww;
  }
}

inline int nodes_per_axis(int level) { return 8 << level; }

/// Tensor-product Gauss rule over an axis-aligned box region (shared by box
/// faces and box edges; zero axes yields the single center point, weight 1).
inline QuadratureRule box_rule(const Vector& center, const std::vector<int>& axes,
                               const std::vector<double>& half_widths, int level) {
  const int d = static_cast<int>(axes.size());
  QuadratureRule rule;
  rule.level = level;
  if (d == 0) {
    rule.points.push_back(center);
    rule.weights.push_back(1.0);
    return rule;
  }
  std::vector<double> gx, gw;
  gauss_legendre(nodes_per_axis(level), gx, gw);
  const int npa = static_cast<int>(gx.size());
  std::vector<int> idx(d, 0);
  while (true) {
    Vector p = center;
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      p[axes[a]] += half_widths[a] * gx[idx[a]];
      w *= half_widths[a] * gw[idx[a]];
    }
    rule.points.push_back(std::move(p));
    rule.weights.push_back(w);
    int a = 0;
    for (; a < d; ++a) {
      if (++idx[a] < npa) break;
      idx[a] = 0;
    }
    if (a == d) break;
  }
  return rule;
}

/// Ear-clipping triangulation of a simple 2-D polygon given counterclockwise.
/// Handles the non-convex prism caps; returns index triples.
inline std::vector<std::array<int, 3>> triangulate(const std::vector<Eigen::Vector2d>& poly) {
  const int m = static_cast<int>(poly.size());
  if (m < 3) throw config_error("triangulate: polygon needs at least 3 vertices");
  double scale = 0.0;
  for (const auto& p : poly) scale = std::max({scale, std::abs(p.x()), std::abs(p.y())});
  const double eps = 1e-12 * scale * scale;

  auto cross2 = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() * b.y() - a.y() * b.x();
  };
  std::vector<int> remaining(m);
  std::iota(remaining.begin(), remaining.end(), 0);
  double signed_area = 0.0;
  for (int i = 0; i < m; ++i) signed_area += cross2(poly[i], poly[(i + 1) % m]);
  if (signed_area < 0.0) std::reverse(remaining.begin(), remaining.end());
  std::vector<std::array<int, 3>> tris;
  while (remaining.size() > 3) {
    const int r = static_cast<int>(remaining.size());
    bool clipped = false;
    for (int i = 0; i < r; ++i) {
      const int ia = remaining[(i + r - 1) % r], ib = remaining[i], ic = remaining[(i + 1) % r];
      const Eigen::Vector2d a = poly[ia], b = poly[ib], c = poly[ic];
      if (cross2(b - a, c - b) <= eps) continue;  // reflex or degenerate corner
      bool contains_other = false;
      for (int j = 0; j < r && !contains_other; ++j) {
        const int iv = remaining[j];
        if (iv == ia || iv == ib || iv == ic) continue;
        const Eigen::Vector2d& p = poly[iv];
        const double s1 = cross2(b - a, p - a), s2 = cross2(c - b, p - b),
                     s3 = cross2(a - c, p - c);
        if (s1 >= -eps && s2 >= -eps && s3 >= -eps) contains_other = true;
      }
      if (contains_other) continue;
      tris.push_back({ia, ib, ic});
      remaining.erase(remaining.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) throw numerical_error("triangulate: no ear found (non-simple polygon?)");
  }
  tris.push_back({remaining[0], remaining[1], remaining[2]});
  return tris;
}

/// Collapsed-square Gauss rule on one triangle: 5x5 nodes, positive weights,
/// exact for polynomials through degree 8.
inline void duffy_triangle(const Vector& v0, const Vector& v1, const Vector& v2,
                           QuadratureRule& rule) {
  static const int kN = 5;
  static const auto gauss5 = [] {
    std::pair<std::vector<double>, std::vector<double>> xw;
    gauss_legendre(kN, xw.first, xw.second);
    return xw;
  }();
  const auto& gx = gauss5.first;
  const auto& gw = gauss5.second;
  const Vector d01 = v1 - v0;
  const Vector d12 = v2 - v1;
  const double two_area = [&] {
    const Eigen::Vector3d u(d01[0], d01[1], d01[2]);
    const Eigen::Vector3d v(d12[0], d12[1], d12[2]);
    return u.cross(v).norm();
  }();
  for (int i = 0; i < kN; ++i) {
    const double a = 0.5 * (gx[i] + 1.0), wa = 0.5 * gw[i];
    for (int j = 0; j < kN; ++j) {
      const double b = 0.5 * (gx[j] + 1.0), wb = 0.5 * gw[j];
      rule.points.push_back(v0 + a * d01 + a * b * d12);
      rule.weights.push_back(wa * wb * two_area * a);
    }
  }
}

inline void subdivide_triangles(std::vector<std::array<Vector, 3>>& tris, int levels) {
  for (int l = 0; l < levels; ++l) {
    std::vector<std::array<Vector, 3>> next;
    next.reserve(4 * tris.size());
    for (const auto& t : tris) {
      const Vector m01 = 0.5 * (t[0] + t[1]);
      const Vector m12 = 0.5 * (t[1] + t[2]);
      const Vector m20 = 0.5 * (t[2] + t[0]);
      next.push_back({t[0], m01, m20});
      next.push_back({m01, t[1], m12});
      next.push_back({m20, m12, t[2]});
      next.push_back({m01, m12, m20});
    }
    tris.swap(next);
  }
}

}  // namespace quad

/// Quadrature rule covering a face at the given refinement level. Box faces
/// use tensor Gauss-Legendre with 8*2^level nodes per axis; polygon faces are
/// triangulated, subdivided 4^level-fold, with a degree-8 positive rule per
/// triangle.
inline QuadratureRule face_rule(const Face& face, int level) {
  if (level < 0) throw config_error("face_rule: level must be >= 0");
  if (face.kind == Face::Kind::box)
    return quad::box_rule(face.center, face.axes, face.half_widths, level);

  if (face.loop.size() < 3) throw config_error("face_rule: degenerate polygon face");
  const auto [t1, t2] = detail::face_plane_basis(face.unit_normal);
  std::vector<Eigen::Vector2d> chart(face.loop.size());
  for (std::size_t i = 0; i < face.loop.size(); ++i)
    chart[i] = {t1.dot(face.loop[i]), t2.dot(face.loop[i])};
  const auto tri_idx = quad::triangulate(chart);
  std::vector<std::array<Vector, 3>> tris;
  tris.reserve(tri_idx.size());
  for (const auto& t : tri_idx)
    tris.push_back({face.loop[t[0]], face.loop[t[1]], face.loop[t[2]]});
  quad::subdivide_triangles(tris, level);

  QuadratureRule rule;
  rule.level = level;
  for (const auto& t : tris) quad::duffy_triangle(t[0], t[1], t[2], rule);
  return rule;
}

/// Quadrature rule covering an edge region (box edges: tensor Gauss-Legendre;
/// segments: 1-D Gauss-Legendre; point edges of 2-D complexes: one node).
inline QuadratureRule edge_rule(const Edge& edge, int level) {
  if (level < 0) throw config_error("edge_rule: level must be >= 0");
  if (edge.kind == Edge::Kind::box)
    return quad::box_rule(edge.center, edge.axes, edge.half_widths, level);

  QuadratureRule rule;
  rule.level = level;
  std::vector<double> gx, gw;
  quad::gauss_legendre(quad::nodes_per_axis(level), gx, gw);
  const Vector mid = 0.5 * (edge.seg_a + edge.seg_b);
  const Vector half = 0.5 * (edge.seg_b - edge.seg_a);
  const double hlen = half.norm();
  for (std::size_t i = 0; i < gx.size(); ++i) {
    rule.points.push_back(mid + gx[i] * half);
    rule.weights.push_back(gw[i] * hlen);
  }
  return rule;
}

/// Product rule on the coordinate sphere |x| = radius in R^dim (polar angles
/// in [0, pi], azimuth in [0, 2 pi], 16*2^level Gauss nodes per angle).
inline QuadratureRule sphere_rule(int dim, double radius, int level) {
  if (dim < 3) throw config_error("sphere_rule: dimension must be at least 3");
  if (!(radius > 0.0)) throw config_error("sphere_rule: radius must be positive");
  const int m = dim - 1;  // number of angles
  const int npa = 16 << level;
  std::vector<double> gx, gw;
  quad::gauss_legendre(npa, gx, gw);

  QuadratureRule rule;
  rule.level = level;
  std::vector<int> idx(m, 0);
  while (true) {
    double w = std::pow(radius, dim - 1);
    std::vector<double> ang(m);
    for (int a = 0; a < m; ++a) {
      const bool azimuth = (a == m - 1);
      const double halfspan = azimuth ? kPi : 0.5 * kPi;
      ang[a] = halfspan * (gx[idx[a]] + 1.0);
      w *= halfspan * gw[idx[a]];
      if (!azimuth) w *= std::pow(std::sin(ang[a]), m - 1 - a);
    }
    Vector p(dim);
    double sines = 1.0;
    for (int a = 0; a < m; ++a) {
      p[a] = radius * sines * std::cos(ang[a]);
      sines *= std::sin(ang[a]);
    }
    p[dim - 1] = radius * sines;
    rule.points.push_back(std::move(p));
    rule.weights.push_back(w);
    int a = 0;
    for (; a < m; ++a) {
      if (++idx[a] < npa) break;
      idx[a] = 0;
    }
    if (a == m) break;
  }
  return rule;
}

/// Weighted sum over the rule nodes. Node evaluations are independent; with
/// threads > 1 they are evaluated in parallel chunks and always reduced in
/// node order, so the result does not depend on the thread count.
inline double integrate(const QuadratureRule& rule,
                        const std::function<double(const Vector&)>& f, int threads = 1) {
  const std::size_t n = rule.points.size();
  std::vector<double> vals(n);
  auto eval_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) vals[i] = f(rule.points[i]);
  };
  if (threads <= 1 || n < 64) {
    eval_range(0, n);
  } else {
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::future<void>> futs;
    for (std::size_t lo = 0; lo < n; lo += chunk)
      futs.push_back(std::async(std::launch::async, eval_range, lo, std::min(lo + chunk, n)));
    for (auto& fu : futs) fu.get();
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(vals[i])) {
      std::ostringstream msg;
      msg << "integrate: non-finite integrand value at node (";
      for (int k = 0; k < rule.points[i].size(); ++k)
        msg << (k ? ", " : "") << rule.points[i][k];
      msg << ")";
      throw numerical_error(msg.str());
    }
    acc += rule.weights[i] * vals[i];
  }
  return acc;
}

/// Integrate at `level` with the coarser level-1 pass as error estimate.
inline IntegrationResult integrate_refined(const Face& face,
                                           const std::function<double(const Vector&)>& f,
                                           int level, int threads = 1) {
  IntegrationResult res;
  res.value = integrate(face_rule(face, level), f, threads);
  if (level >= 1)
    res.error_estimate = std::abs(res.value - integrate(face_rule(face, level - 1), f, threads));
  return res;
}

inline IntegrationResult integrate_refined(const Edge& edge,
                                           const std::function<double(const Vector&)>& f,
                                           int level, int threads = 1) {
  IntegrationResult res;
  res.value = integrate(edge_rule(edge, level), f, threads);
  if (level >= 1)
    res.error_estimate = std::abs(res.value - integrate(edge_rule(edge, level - 1), f, threads));
  return res;
}

}  // namespace polymass

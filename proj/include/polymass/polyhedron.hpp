#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polymass/linalg.hpp"

namespace polymass {

/// One flat boundary piece of a polyhedron. Two region encodings are used:
///   box     - axis-aligned box in the coordinate hyperplane (hypercube faces,
///             any dimension); spanned by `axes` around `center`.
///   polygon - planar vertex loop in R^3, ordered counterclockwise as seen
///             from outside.
struct Face {
  enum class Kind { box, polygon };

  Kind kind = Kind::box;
  Vector unit_normal;  // outward
  double offset = 0.0;  // <unit_normal, x> on the face plane

  std::vector<int> axes;             // box: coordinate axes spanning the face
  Vector center;                     // box
  std::vector<double> half_widths;   // box, per axis

  std::vector<Vector> loop;  // polygon vertices

  double area_euclidean = 0.0;  // (n-1)-volume
};

/// Codimension-2 stratum where two faces meet. Box edges cover hypercube
/// complexes in any dimension (zero spanning axes encodes a vertex of a 2-D
/// complex); segment edges cover the 3-D polyhedra.
struct Edge {
  enum class Kind { box, segment };

  Kind kind = Kind::box;
  int face_a = -1, face_b = -1;
  Vector normal_a, normal_b;      // outward unit normals of the two faces
  Vector conormal_a, conormal_b;  // outward unit normal to the edge within each face
  double euclidean_angle = 0.0;   // interior dihedral angle
  bool convex = true;             // angle < pi

  std::vector<int> axes;            // box
  Vector center;                    // box
  std::vector<double> half_widths;  // box

  Vector seg_a, seg_b;  // segment endpoints

  double volume_euclidean = 1.0;  // (n-2)-volume; 1 for point edges
};

struct Polyhedron {
  int dim = 0;
  std::vector<Face> faces;
  std::vector<Edge> edges;
  double inner_radius = 0.0;  // min_{x in boundary} |x|
  std::string label;

  double total_face_area() const {
    double a = 0.0;
    for (const auto& f : faces) a += f.area_euclidean;
    return a;
  }
  double total_edge_volume() const {
    double v = 0.0;
    for (const auto& e : edges) v += e.volume_euclidean;
    return v;
  }
};

namespace detail {

/// Transfer the Euclidean dihedral data onto an edge from its two face
/// normals and the convexity flag. Conventions:
///   convex:     alpha = pi - theta,  (sin theta) n_A = -(cos theta) nu_A + nu_B
///   non-convex: alpha = pi + theta, -(sin theta) n_A = -(cos theta) nu_A + nu_B
inline void set_edge_angles(Edge& e) {
  const double ct = e.normal_a.dot(e.normal_b);
  const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  if (st < 1e-12) throw config_error("edge with parallel face normals (sin theta = 0)");
  const double theta = std::acos(std::clamp(ct, -1.0, 1.0));
  if (e.convex) {
    e.euclidean_angle = kPi - theta;
    e.conormal_a = (e.normal_b - ct * e.normal_a) / st;
    e.conormal_b = (e.normal_a - ct * e.normal_b) / st;
  } else {
    e.euclidean_angle = kPi + theta;
    e.conormal_a = (ct * e.normal_a - e.normal_b) / st;
    e.conormal_b = (ct * e.normal_b - e.normal_a) / st;
  }
}

inline Vector unit_axis(int n, int axis, double sign = 1.0) {
  Vector v = Vector::Zero(n);
  v[axis] = sign;
  return v;
}

/// Boundary complex of the coordinate cube [-L, L]^dim. Valid for dim >= 2;
/// for dim = 2 the edges degenerate to the four vertices (zero spanning axes).
inline Polyhedron box_complex(int dim, double half_width, std::string label) {
  if (dim < 2) throw config_error("box_complex: dimension must be at least 2");
  if (!(half_width > 0.0)) throw config_error("box_complex: half width must be positive");
  const double L = half_width;
  Polyhedron P;
  P.dim = dim;
  P.inner_radius = L;
  P.label = std::move(label);

  auto face_index = [dim](int axis, int sign) { return 2 * axis + (sign > 0 ? 0 : 1); };

  for (int axis = 0; axis < dim; ++axis)
    for (int sign : {+1, -1}) {
      Face f;
      f.kind = Face::Kind::box;
      f.unit_normal = unit_axis(dim, axis, sign);
      f.offset = L;
      f.center = unit_axis(dim, axis, sign * L);
      for (int a = 0; a < dim; ++a)
        if (a != axis) {
          f.axes.push_back(a);
          f.half_widths.push_back(L);
        }
      f.area_euclidean = std::pow(2.0 * L, dim - 1);
      P.faces.push_back(std::move(f));
    }

  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      for (int si : {+1, -1})
        for (int sj : {+1, -1}) {
          Edge e;
          e.kind = Edge::Kind::box;
          e.face_a = face_index(i, si);
          e.face_b = face_index(j, sj);
          e.normal_a = unit_axis(dim, i, si);
          e.normal_b = unit_axis(dim, j, sj);
          e.convex = true;
          e.center = unit_axis(dim, i, si * L) + unit_axis(dim, j, sj * L);
          for (int a = 0; a < dim; ++a)
            if (a != i && a != j) {
              e.axes.push_back(a);
              e.half_widths.push_back(L);
            }
          e.volume_euclidean = std::pow(2.0 * L, dim - 2);
          set_edge_angles(e);
          P.edges.push_back(std::move(e));
        }
  return P;
}

}  // namespace detail

/// Coordinate hypercube [-L, L]^n: 2n faces, 2n(n-1) edges, all dihedral
/// angles pi/2, inner radius L.
inline Polyhedron hypercube(int n, double half_width) {
  if (n < 3) throw config_error("hypercube: dimension must be at least 3");
  std::ostringstream label;
  label << "cube:" << n << ":" << format_g17(half_width);
  return detail::box_complex(n, half_width, label.str());
}

struct HalfSpace {
  Vector normal;
  double offset = 0.0;  // <normal, x> <= offset
};

namespace detail {

inline std::pair<Vector, Vector> face_plane_basis(const Vector& nu) {
  const Matrix T = hyperplane_basis(nu);
  return {T.col(0), T.col(1)};
}

/// Closest point of a planar polygon (3-D) to the origin; used for the inner
/// radius of H-representation solids.
inline double polygon_origin_distance(const Face& f) {
  const auto [t1, t2] = face_plane_basis(f.unit_normal);
  const Vector foot = f.offset * f.unit_normal;
  // 2-D coordinates relative to the foot point
  const int m = static_cast<int>(f.loop.size());
  std::vector<Eigen::Vector2d> poly(m);
  for (int i = 0; i < m; ++i)
    poly[i] = {t1.dot(f.loop[i] - foot), t2.dot(f.loop[i] - foot)};
  // point-in-polygon for the origin of the 2-D chart (crossing number)
  bool inside = false;
  for (int i = 0, j = m - 1; i < m; j = i++) {
    const auto& a = poly[j];
    const auto& b = poly[i];
    if ((b.y() > 0.0) != (a.y() > 0.0)) {
      const double xc = b.x() + (0.0 - b.y()) * (a.x() - b.x()) / (a.y() - b.y());
      if (xc > 0.0) inside = !inside;
    }
  }
  if (inside) return std::abs(f.offset);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0, j = m - 1; i < m; j = i++) {
    const Vector& a = f.loop[j];
    const Vector& b = f.loop[i];
    const Vector d = b - a;
    const double t = std::clamp(-a.dot(d) / d.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * d).norm());
  }
  return best;
}

inline double polygon_area(const std::vector<Vector>& loop, const Vector& nu) {
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  const int m = static_cast<int>(loop.size());
  for (int i = 0; i < m; ++i) {
    const Vector& a = loop[i];
    const Vector& b = loop[(i + 1) % m];
    acc += Eigen::Vector3d(a[0], a[1], a[2]).cross(Eigen::Vector3d(b[0], b[1], b[2]));
  }
  return 0.5 * (acc.x() * nu[0] + acc.y() * nu[1] + acc.z() * nu[2]);
}

}  // namespace detail

/// Convex polyhedron in R^3 from half-spaces <n_i, x> <= o_i that bound a
/// closed region strictly containing the origin. Faces are computed by vertex
/// enumeration over plane triples; edges from adjacent face pairs.
inline Polyhedron from_halfspaces_3d(std::vector<HalfSpace> planes, std::string label) {
  for (auto& hs : planes) {
    if (hs.normal.size() != 3) throw config_error("from_halfspaces_3d: normals must be 3-D");
    const double len = hs.normal.norm();
    if (len < 1e-14) throw config_error("from_halfspaces_3d: zero normal");
    hs.normal /= len;
    hs.offset /= len;
    if (!(hs.offset > 0.0))
      throw config_error("from_halfspaces_3d: origin not strictly inside (offset <= 0)");
  }
  const int np = static_cast<int>(planes.size());
  if (np < 4) throw config_error("from_halfspaces_3d: fewer than 4 half-spaces is degenerate");

  // Vertex enumeration: feasible triple intersections, deduplicated.
  std::vector<Vector> verts;
  double scale = 0.0;
  for (const auto& hs : planes) scale = std::max(scale, std::abs(hs.offset));
  for (int i = 0; i < np; ++i)
    for (int j = i + 1; j < np; ++j)
      for (int k = j + 1; k < np; ++k) {
        Matrix A(3, 3);
        A.row(0) = planes[i].normal.transpose();
        A.row(1) = planes[j].normal.transpose();
        A.row(2) = planes[k].normal.transpose();
        Eigen::FullPivLU<Matrix> lu(A);
        if (!lu.isInvertible()) continue;
        Vector rhs(3);
        rhs << planes[i].offset, planes[j].offset, planes[k].offset;
        const Vector v = lu.solve(rhs);
        const double tol = 1e-9 * (scale + v.norm());
        bool feasible = true;
        for (const auto& hs : planes)
          if (hs.normal.dot(v) > hs.offset + tol) {
            feasible = false;
            break;
          }
        if (!feasible) continue;
        bool dup = false;
        for (const auto& w : verts)
          if ((w - v).norm() < 1e-9 * (1.0 + v.norm())) {
            dup = true;
            break;
          }
        if (!dup) verts.push_back(v);
      }
  if (verts.size() < 4)
    throw config_error("from_halfspaces_3d: degenerate region (fewer than 4 vertices)");

  Polyhedron P;
  P.dim = 3;
  P.label = std::move(label);

  // Faces: vertices incident to each plane, ordered around the face centroid.
  std::vector<std::vector<int>> face_verts;
  for (int f = 0; f < np; ++f) {
    std::vector<int> on;
    for (int v = 0; v < static_cast<int>(verts.size()); ++v)
      if (std::abs(planes[f].normal.dot(verts[v]) - planes[f].offset) <
          1e-9 * (1.0 + verts[v].norm()))
        on.push_back(v);
    if (static_cast<int>(on.size()) < 3) continue;  // redundant plane

    Vector centroid = Vector::Zero(3);
    for (int v : on) centroid += verts[v];
    centroid /= static_cast<double>(on.size());
    const auto [t1, t2] = detail::face_plane_basis(planes[f].normal);
    std::sort(on.begin(), on.end(), [&](int a, int b) {
      const Vector da = verts[a] - centroid, db = verts[b] - centroid;
      return std::atan2(t2.dot(da), t1.dot(da)) < std::atan2(t2.dot(db), t1.dot(db));
    });

    Face face;
    face.kind = Face::Kind::polygon;
    face.unit_normal = planes[f].normal;
    face.offset = planes[f].offset;
    for (int v : on) face.loop.push_back(verts[v]);
    double area = detail::polygon_area(face.loop, face.unit_normal);
    if (area < 0.0) {
      std::reverse(face.loop.begin(), face.loop.end());
      area = -area;
    }
    face.area_euclidean = area;
    face_verts.push_back(on);
    P.faces.push_back(std::move(face));
  }
  if (P.faces.size() < 4)
    throw config_error("from_halfspaces_3d: degenerate region (fewer than 4 faces)");

  // Edges: face pairs sharing exactly two vertices.
  const int nf = static_cast<int>(P.faces.size());
  for (int a = 0; a < nf; ++a)
    for (int b = a + 1; b < nf; ++b) {
      std::vector<int> shared;
      for (int va : face_verts[a])
        for (int vb : face_verts[b])
          if (va == vb) shared.push_back(va);
      if (shared.size() != 2) continue;
      Edge e;
      e.kind = Edge::Kind::segment;
      e.face_a = a;
      e.face_b = b;
      e.normal_a = P.faces[a].unit_normal;
      e.normal_b = P.faces[b].unit_normal;
      e.convex = true;
      e.seg_a = verts[shared[0]];
      e.seg_b = verts[shared[1]];
      e.volume_euclidean = (e.seg_b - e.seg_a).norm();
      detail::set_edge_angles(e);
      P.edges.push_back(std::move(e));
    }

  // Closed-boundary check: each polygon side must appear in exactly one edge.
  std::size_t side_count = 0;
  for (const auto& f : P.faces) side_count += f.loop.size();
  if (side_count != 2 * P.edges.size())
    throw config_error("from_halfspaces_3d: half-spaces do not bound a closed polytope");

  double rp = std::numeric_limits<double>::infinity();
  for (const auto& f : P.faces) rp = std::min(rp, detail::polygon_origin_distance(f));
  P.inner_radius = rp;
  return P;
}

/// Regular octahedron |x|_1 <= R (vertex distance R from the origin).
inline Polyhedron octahedron(double R) {
  if (!(R > 0.0)) throw config_error("octahedron: R must be positive");
  std::vector<HalfSpace> planes;
  const double s3 = std::sqrt(3.0);
  for (int sx : {+1, -1})
    for (int sy : {+1, -1})
      for (int sz : {+1, -1}) {
        HalfSpace hs;
        hs.normal = Vector(3);
        hs.normal << sx / s3, sy / s3, sz / s3;
        hs.offset = R / s3;
        planes.push_back(hs);
      }
  return from_halfspaces_3d(std::move(planes), "octahedron:" + format_g17(R));
}

/// Regular tetrahedron with insphere radius R (face planes at distance R).
inline Polyhedron tetrahedron(double R) {
  if (!(R > 0.0)) throw config_error("tetrahedron: R must be positive");
  const double s3 = std::sqrt(3.0);
  const std::array<std::array<double, 3>, 4> dirs = {
      {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}};
  std::vector<HalfSpace> planes;
  for (const auto& d : dirs) {
    HalfSpace hs;
    hs.normal = Vector(3);
    hs.normal << d[0] / s3, d[1] / s3, d[2] / s3;
    hs.offset = R;
    planes.push_back(hs);
  }
  return from_halfspaces_3d(std::move(planes), "tetrahedron:" + format_g17(R));
}

/// Non-convex prism: the square cross-section [-outer, outer]^2 with the
/// rectangular bite {x >= notch, |y| <= notch} removed, extruded over
/// |z| <= height/2. Exactly two reflex vertical edges (angle 3 pi/2) at the
/// inner bite corners; every other dihedral angle is pi/2.
inline Polyhedron lshaped_prism_3d(double outer, double notch, double height) {
  if (!(notch > 0.0))
    throw config_error("lshaped_prism_3d: origin falls inside the notch (notch <= 0)");
  if (!(notch < outer)) throw config_error("lshaped_prism_3d: requires 0 < notch < outer");
  if (!(height > 0.0)) throw config_error("lshaped_prism_3d: height must be positive");
  const double a = outer, b = notch, h = 0.5 * height;

  Polyhedron P;
  P.dim = 3;
  {
    std::ostringstream label;
    label << "lprism:" << format_g17(outer) << ":" << format_g17(notch) << ":"
          << format_g17(height);
    P.label = label.str();
  }
  P.inner_radius = std::min(b, h);

  // Cross-section loop, counterclockwise; reflex corners at (b, -b) and (b, b).
  const std::vector<Eigen::Vector2d> cs = {{-a, -a}, {a, -a}, {a, -b}, {b, -b},
                                           {b, b},   {a, b},  {a, a},  {-a, a}};
  const std::vector<bool> reflex = {false, false, false, true, true, false, false, false};
  const int m = static_cast<int>(cs.size());

  auto v3 = [](double x, double y, double z) {
    Vector v(3);
    v << x, y, z;
    return v;
  };

  // Side faces: one rectangle per cross-section side, outward normal from the
  // clockwise rotation of the side direction.
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector2d p = cs[i], q = cs[(i + 1) % m];
    const Eigen::Vector2d d = (q - p).normalized();
    Face f;
    f.kind = Face::Kind::polygon;
    f.unit_normal = v3(d.y(), -d.x(), 0.0);
    f.offset = f.unit_normal.head(2).dot(p);
    f.loop = {v3(p.x(), p.y(), -h), v3(q.x(), q.y(), -h), v3(q.x(), q.y(), h),
              v3(p.x(), p.y(), h)};
    f.area_euclidean = (q - p).norm() * 2.0 * h;
    P.faces.push_back(std::move(f));
  }
  // Caps.
  {
    Face top;
    top.kind = Face::Kind::polygon;
    top.unit_normal = v3(0, 0, 1);
    top.offset = h;
    for (int i = 0; i < m; ++i) top.loop.push_back(v3(cs[i].x(), cs[i].y(), h));
    top.area_euclidean = detail::polygon_area(top.loop, top.unit_normal);
    Face bottom;
    bottom.kind = Face::Kind::polygon;
    bottom.unit_normal = v3(0, 0, -1);
    bottom.offset = h;
    for (int i = m - 1; i >= 0; --i) bottom.loop.push_back(v3(cs[i].x(), cs[i].y(), -h));
    bottom.area_euclidean = detail::polygon_area(bottom.loop, bottom.unit_normal);
    P.faces.push_back(std::move(top));
    P.faces.push_back(std::move(bottom));
  }
  const int top_idx = m, bottom_idx = m + 1;

  // Vertical edges between consecutive side faces.
  for (int i = 0; i < m; ++i) {
    const int prev = (i + m - 1) % m;
    Edge e;
    e.kind = Edge::Kind::segment;
    e.face_a = prev;
    e.face_b = i;
    e.normal_a = P.faces[prev].unit_normal;
    e.normal_b = P.faces[i].unit_normal;
    e.convex = !reflex[i];
    e.seg_a = v3(cs[i].x(), cs[i].y(), -h);
    e.seg_b = v3(cs[i].x(), cs[i].y(), h);
    e.volume_euclidean = 2.0 * h;
    detail::set_edge_angles(e);
    P.edges.push_back(std::move(e));
  }
  // Cap edges.
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector2d p = cs[i], q = cs[(i + 1) % m];
    for (int cap : {top_idx, bottom_idx}) {
      const double z = (cap == top_idx) ? h : -h;
      Edge e;
      e.kind = Edge::Kind::segment;
      e.face_a = i;
      e.face_b = cap;
      e.normal_a = P.faces[i].unit_normal;
      e.normal_b = P.faces[cap].unit_normal;
      e.convex = true;
      e.seg_a = v3(p.x(), p.y(), z);
      e.seg_b = v3(q.x(), q.y(), z);
      e.volume_euclidean = (q - p).norm();
      detail::set_edge_angles(e);
      P.edges.push_back(std::move(e));
    }
  }
  return P;
}

/// Homothety by r about the origin: lengths scale by r, angles and normals
/// are unchanged, face areas by r^{n-1}, edge volumes by r^{n-2}.
inline Polyhedron scale(const Polyhedron& P, double r) {
  if (!(r > 0.0)) throw config_error("scale: factor must be positive");
  Polyhedron Q = P;
  const int n = P.dim;
  Q.inner_radius *= r;
  {
    std::ostringstream label;
    label << "scale:" << P.label << ":" << format_g17(r);
    Q.label = label.str();
  }
  for (auto& f : Q.faces) {
    f.offset *= r;
    if (f.kind == Face::Kind::box) {
      f.center *= r;
      for (double& w : f.half_widths) w *= r;
    } else {
      for (auto& v : f.loop) v *= r;
    }
    f.area_euclidean *= std::pow(r, n - 1);
  }
  for (auto& e : Q.edges) {
    if (e.kind == Edge::Kind::box) {
      e.center *= r;
      for (double& w : e.half_widths) w *= r;
    } else {
      e.seg_a *= r;
      e.seg_b *= r;
    }
    e.volume_euclidean *= std::pow(r, n - 2);
  }
  return Q;
}

struct AngleValidation {
  bool ok = true;
  double constant = 0.0;
  std::vector<int> violating_edges;
};

/// Check |sin(dihedral angle)| >= c on every edge.
inline AngleValidation validate_angles(const Polyhedron& P, double c) {
  if (!(c > 0.0 && c < 1.0)) throw config_error("validate_angles: c must lie in (0, 1)");
  AngleValidation report;
  report.constant = c;
  for (int i = 0; i < static_cast<int>(P.edges.size()); ++i)
    if (std::abs(std::sin(P.edges[i].euclidean_angle)) < c) {
      report.ok = false;
      report.violating_edges.push_back(i);
    }
  return report;
}

struct GeometryCatalogEntry {
  std::string pattern;
  std::string example;
  std::string description;
};

inline std::vector<GeometryCatalogEntry> geometry_catalog() {
  return {
      {"cube:<n>:<L>", "cube:3:100", "coordinate hypercube [-L, L]^n"},
      {"octahedron:<R>", "octahedron:100", "regular octahedron |x|_1 <= R"},
      {"tetrahedron:<R>", "tetrahedron:100", "regular tetrahedron, insphere radius R"},
      {"lprism:<outer>:<notch>:<height>", "lprism:100:50:200",
       "non-convex notched prism with two reflex edges"},
      {"scale:<id>:<r>", "scale:octahedron:1:200", "homothety of another geometry by r"},
      {"sphere:<r>", "sphere:400", "coordinate sphere (flux method only)"},
  };
}

/// Parse a geometry id; "scale:<id>:<r>" nests.
inline Polyhedron polyhedron_from_id(const std::string& id) {
  const auto parts = detail::split_id(id);
  if (parts.empty()) throw config_error("unknown geometry id '" + id + "'");
  if (parts[0] == "cube" && parts.size() == 3)
    return hypercube(static_cast<int>(detail::parse_int(parts[1], id)),
                     detail::parse_real(parts[2], id));
  if (parts[0] == "octahedron" && parts.size() == 2)
    return octahedron(detail::parse_real(parts[1], id));
  if (parts[0] == "tetrahedron" && parts.size() == 2)
    return tetrahedron(detail::parse_real(parts[1], id));
  if (parts[0] == "lprism" && parts.size() == 4)
    return lshaped_prism_3d(detail::parse_real(parts[1], id), detail::parse_real(parts[2], id),
                            detail::parse_real(parts[3], id));
  if (parts[0] == "scale" && parts.size() >= 3) {
    const std::string inner = id.substr(6, id.rfind(':') - 6);
    const double r = detail::parse_real(parts.back(), id);
    return scale(polyhedron_from_id(inner), r);
  }
  throw config_error("unknown geometry id '" + id + "'");
}

}  // namespace polymass

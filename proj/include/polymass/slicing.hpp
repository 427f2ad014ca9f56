#pragma once

#include <sstream>

#include "polymass/mass.hpp"

namespace polymass {

/// Metric induced on the coordinate hyperplane {x_axis = t}: the (n-1)x(n-1)
/// minor of g omitting the dropped axis, with tangentially restricted
/// derivatives. Behaves as a MetricField of dimension n-1 with the parent's
/// decay order; its inner radius is the in-slice radius of the parent cutoff.
inline MetricField restrict_to_hyperplane(const MetricField& parent, int axis, double t) {
  const int n = parent.dim();
  if (n < 3) throw config_error("restrict_to_hyperplane: parent dimension must be at least 3");
  if (axis < 0 || axis >= n) throw config_error("restrict_to_hyperplane: axis out of range");
  const int m = n - 1;

  auto embed = [n, axis, t](const Vector& y) {
    Vector x(n);
    for (int a = 0, j = 0; a < n; ++a) x[a] = (a == axis) ? t : y[j++];
    return x;
  };
  auto lift = [axis](int a) { return a < axis ? a : a + 1; };

  auto coeff = [parent, embed, lift, m](const Vector& y) {
    const Matrix g = parent.metric(embed(y));
    Matrix out(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) out(a, b) = g(lift(a), lift(b));
    return out;
  };
  auto dcoeff = [parent, embed, lift, m](const Vector& y) {
    const Tensor3 dg = parent.metric_deriv(embed(y));
    Tensor3 out(m);
    for (int c = 0; c < m; ++c)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) out(c, a, b) = dg(lift(c), lift(a), lift(b));
    return out;
  };
  auto d2coeff = [parent, embed, lift, m](const Vector& y) {
    const Tensor4 d2g = parent.metric_deriv2(embed(y));
    Tensor4 out(m);
    for (int d = 0; d < m; ++d)
      for (int c = 0; c < m; ++c)
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) out(d, c, a, b) = d2g(lift(d), lift(c), lift(a), lift(b));
    return out;
  };

  const double r0 = parent.inner_radius();
  const double slice_r0 = std::max(1e-9, std::sqrt(std::max(r0 * r0 - t * t, 0.0)));
  std::ostringstream id;
  id << parent.id() << "|slice:" << (axis + 1) << ":" << format_g17(t);
  return MetricField(m, parent.decay_order(), slice_r0, coeff,
                     parent.has_analytic_derivatives() ? MetricField::DerivFn(dcoeff)
                                                       : MetricField::DerivFn(),
                     parent.has_analytic_derivatives() ? MetricField::Deriv2Fn(d2coeff)
                                                       : MetricField::Deriv2Fn(),
                     std::nullopt, id.str());
}

/// Per-slice quantity: face and edge integrals over the boundary of the
/// (n-1)-cube of half-width L inside {x_axis = t}, normalized so that
///   value = (face_integral + edge_integral) / ((n-2) omega_{n-2}).
struct SliceQuantity {
  int axis = 0;  // dropped axis, 0-based
  double t = 0.0;
  double half_width = 0.0;
  double face_integral = 0.0;
  double edge_integral = 0.0;
  double value = 0.0;
};

namespace detail {

/// Boundary assembly of the slice cube for any slice dimension >= 2; the
/// point edges of 2-D slices contribute vertex angle defects.
inline SliceQuantity slice_quantity_impl(const MetricField& field, int axis, double t, double L,
                                         const MassOptions& opts) {
  const int n = field.dim();
  if (std::abs(t) > L) throw config_error("slice_quantity: requires |t| <= L");
  const MetricField sliced = restrict_to_hyperplane(field, axis, t);
  std::ostringstream label;
  label << "slice-cube:" << (n - 1) << ":" << format_g17(L);
  const Polyhedron cube = box_complex(n - 1, L, label.str());

  SliceQuantity out;
  out.axis = axis;
  out.t = t;
  out.half_width = L;
  for (const auto& face : cube.faces) {
    auto f = [&](const Vector& y) {
      const FaceFrame fr = face_frame(sliced, face, y);
      return mean_curvature(sliced, fr) * fr.density;
    };
    out.face_integral -= integrate(face_rule(face, opts.level), f, opts.threads);
  }
  for (const auto& edge : cube.edges) {
    auto f = [&](const Vector& y) {
      return angle_defect(sliced, edge, y) * edge_density(sliced, edge, y);
    };
    out.edge_integral += integrate(edge_rule(edge, opts.level), f, opts.threads);
  }
  out.value =
      (out.face_integral + out.edge_integral) / ((n - 2) * sphere_volume(n - 2));
  return out;
}

}  // namespace detail

/// Slice quantity for n >= 4 (the slice cube has genuine faces and edges).
inline SliceQuantity slice_quantity(const MetricField& field, int axis, double t, double L,
                                    const MassOptions& opts = {}) {
  if (field.dim() < 4) throw config_error("slice_quantity: requires dimension >= 4");
  return detail::slice_quantity_impl(field, axis, t, L, opts);
}

/// Dimension-generic reading of the slice quantity (valid for n >= 3); for
/// n = 3 the slice square's segments act as faces and its vertices as edges.
/// Exposed so the 3-D closure between the two readings can be checked.
inline SliceQuantity slice_quantity_generic(const MetricField& field, int axis, double t,
                                            double L, const MassOptions& opts = {}) {
  if (field.dim() < 3) throw config_error("slice_quantity_generic: requires dimension >= 3");
  return detail::slice_quantity_impl(field, axis, t, L, opts);
}

/// n = 3 slice quantity via the curve formulation: the raw angle defect
///   2 pi - int kappa ds - beta
/// of the slice square, with kappa the geodesic curvature of the segments
/// with respect to the inward g-unit normal (computed from restricted
/// Christoffels) and beta the sum of the four g-turning angles
/// (pi minus the interior angle between adjacent segment directions).
/// Stored as face_integral = -int kappa ds, edge_integral = 2 pi - beta,
/// value = (face + edge) / (2 pi), so the raw defect is face + edge.
inline SliceQuantity slice_quantity_3d(const MetricField& field, int axis, double t, double L,
                                       const MassOptions& opts = {}) {
  if (field.dim() != 3) throw config_error("slice_quantity_3d: requires dimension 3");
  if (std::abs(t) > L) throw config_error("slice_quantity_3d: requires |t| <= L");
  const MetricField sliced = restrict_to_hyperplane(field, axis, t);

  SliceQuantity out;
  out.axis = axis;
  out.t = t;
  out.half_width = L;

  auto v2 = [](double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
  };
  // Segments of the square [-L, L]^2, counterclockwise; interior on the left.
  const std::array<Vector, 4> corners = {v2(L, -L), v2(L, L), v2(-L, L), v2(-L, -L)};
  std::vector<double> gx, gw;
  quad::gauss_legendre(quad::nodes_per_axis(opts.level), gx, gw);

  double total_curvature = 0.0;
  for (int s = 0; s < 4; ++s) {
    const Vector a = corners[s];
    const Vector b = corners[(s + 1) % 4];
    const Vector mid = 0.5 * (a + b);
    const Vector half = 0.5 * (b - a);
    const double hlen = half.norm();
    const Vector tang = half / hlen;          // Euclidean unit tangent
    const Vector inward = v2(-tang[1], tang[0]);  // left of travel = inward

    for (std::size_t i = 0; i < gx.size(); ++i) {
      const Vector y = mid + gx[i] * half;
      const Matrix g = sliced.metric(y);
      const Matrix ginv = spd_inverse(g, "slice_quantity_3d");
      const Tensor3 gamma = sliced.christoffel(y);
      // g-unit inward normal: raise the Euclidean normal covector, normalize.
      Vector ng = ginv * inward;
      ng /= std::sqrt(inward.dot(ng));
      // kappa = Gamma^k_ij T^i T^j (g n)_k / g(T, T)
      const Vector w = g * ng;
      double num = 0.0;
      for (int k = 0; k < 2; ++k) {
        double acc = 0.0;
        for (int ii = 0; ii < 2; ++ii)
          for (int jj = 0; jj < 2; ++jj) acc += gamma(k, ii, jj) * tang[ii] * tang[jj];
        num += acc * w[k];
      }
      const double gtt = tang.dot(g * tang);
      const double kappa = num / gtt;
      const double ds = std::sqrt(gtt);  // g-arclength density
      total_curvature += gw[i] * hlen * kappa * ds;
    }
  }

  double beta = 0.0;
  for (int s = 0; s < 4; ++s) {
    const Vector v = corners[s];
    const Vector prev = corners[(s + 3) % 4];
    const Vector next = corners[(s + 1) % 4];
    const Vector d1 = (prev - v).normalized();
    const Vector d2 = (next - v).normalized();
    const Matrix g = sliced.metric(v);
    const double q = d1.dot(g * d2) / std::sqrt(d1.dot(g * d1) * d2.dot(g * d2));
    const double interior = std::acos(std::clamp(q, -1.0, 1.0));
    beta += kPi - interior;
  }

  out.face_integral = -total_curvature;
  out.edge_integral = 2.0 * kPi - beta;
  out.value = (out.face_integral + out.edge_integral) / (2.0 * kPi);
  return out;
}

/// Slicing mass formula: Gauss-Legendre integration of the slice quantity in
/// t over [-L, L] for every axis,
///   mass = omega_{n-2} / ((n-1) omega_{n-1}) * sum_k int value dt.
inline double slice_mass_integral(const MetricField& field, double L, const MassOptions& opts = {},
                                  int t_nodes = 32) {
  const int n = field.dim();
  if (n < 3) throw config_error("slice_mass_integral: requires dimension >= 3");
  if (!(L > field.inner_radius()))
    throw config_error("slice_mass_integral: cube must strictly contain the cutoff ball");
  if (t_nodes < 2) throw config_error("slice_mass_integral: need at least 2 t-nodes");

  std::vector<double> gx, gw;
  quad::gauss_legendre(t_nodes, gx, gw);
  double total = 0.0;
  for (int axis = 0; axis < n; ++axis) {
    for (int i = 0; i < t_nodes; ++i) {
      const double t = L * gx[i];
      const SliceQuantity q = (n == 3) ? slice_quantity_3d(field, axis, t, L, opts)
                                       : detail::slice_quantity_impl(field, axis, t, L, opts);
      total += L * gw[i] * q.value;
    }
  }
  return total * sphere_volume(n - 2) / ((n - 1) * sphere_volume(n - 1));
}

// ---------------------------------------------------------------------------
// Pointwise consistency residuals between slice-cube quantities and full-cube
// quantities (used by property tests and the verification suites).
// ---------------------------------------------------------------------------

/// | sum_{k != i} H-tilde_i^(k) - (n-2) H_i | at a point x of the cube face
/// {x_i = L}; each H-tilde is the mean curvature of the corresponding slice
/// cube face in the restricted metric at t = x_k.
inline double slice_face_sum_residual(const MetricField& field, double L, int face_axis,
                                      const Vector& x) {
  const int n = field.dim();
  const Polyhedron cube = detail::box_complex(n, L, "cube");
  const Face* full_face = nullptr;
  for (const auto& f : cube.faces)
    if (f.unit_normal[face_axis] > 0.5) full_face = &f;
  if (!full_face) throw config_error("slice_face_sum_residual: face not found");
  const double H_full = mean_curvature(field, *full_face, x);

  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k == face_axis) continue;
    const MetricField sliced = restrict_to_hyperplane(field, k, x[k]);
    const int slice_face_axis = face_axis < k ? face_axis : face_axis - 1;
    const Polyhedron slice_cube = detail::box_complex(n - 1, L, "slice-cube");
    const Face* sface = nullptr;
    for (const auto& f : slice_cube.faces)
      if (f.unit_normal[slice_face_axis] > 0.5) sface = &f;
    if (!sface) throw config_error("slice_face_sum_residual: slice face not found");
    Vector y(n - 1);
    for (int a = 0, j = 0; a < n; ++a)
      if (a != k) y[j++] = x[a];
    sum += mean_curvature(sliced, *sface, y);
  }
  return std::abs(sum - (n - 2) * H_full);
}

/// | alpha-tilde^(k) - alpha | at a point x of the cube edge {x_i = x_j = L},
/// comparing the slice-cube dihedral angle in the restricted metric at
/// t = x_k with the full-cube dihedral angle.
inline double slice_angle_residual(const MetricField& field, double L, int edge_axis_i,
                                   int edge_axis_j, int k, const Vector& x) {
  const int n = field.dim();
  const Polyhedron cube = detail::box_complex(n, L, "cube");
  const Edge* full_edge = nullptr;
  for (const auto& e : cube.edges)
    if ((e.normal_a[edge_axis_i] > 0.5 && e.normal_b[edge_axis_j] > 0.5) ||
        (e.normal_a[edge_axis_j] > 0.5 && e.normal_b[edge_axis_i] > 0.5))
      full_edge = &e;
  if (!full_edge) throw config_error("slice_angle_residual: edge not found");
  const double alpha_full = g_dihedral_angle(field, *full_edge, x).alpha;

  const MetricField sliced = restrict_to_hyperplane(field, k, x[k]);
  const int si = edge_axis_i < k ? edge_axis_i : edge_axis_i - 1;
  const int sj = edge_axis_j < k ? edge_axis_j : edge_axis_j - 1;
  const Polyhedron slice_cube = detail::box_complex(n - 1, L, "slice-cube");
  const Edge* sedge = nullptr;
  for (const auto& e : slice_cube.edges)
    if ((e.normal_a[si] > 0.5 && e.normal_b[sj] > 0.5) ||
        (e.normal_a[sj] > 0.5 && e.normal_b[si] > 0.5))
      sedge = &e;
  if (!sedge) throw config_error("slice_angle_residual: slice edge not found");
  Vector y(n - 1);
  for (int a = 0, j = 0; a < n; ++a)
    if (a != k) y[j++] = x[a];
  const double alpha_slice = g_dihedral_angle(sliced, *sedge, y).alpha;
  return std::abs(alpha_slice - alpha_full);
}

}  // namespace polymass

#pragma once

#include <utility>

#include "polymass/metric_field.hpp"
#include "polymass/quadrature.hpp"

namespace polymass {

/// Pointwise frame data on a face: Euclidean tangent basis and normal, the
/// g-unit normal on the same side, the induced metric and the area density
/// d sigma / d sigma-bar.
struct FaceFrame {
  Vector point;
  Vector normal_euclid;  // nu-bar
  Vector normal_g;       // nu, with g(nu,nu) = 1 and <nu, nu-bar> > 0
  Matrix tangent;        // n x (n-1), Euclidean-orthonormal columns
  Matrix metric;         // ambient g at the point
  Matrix induced;        // gamma_ab = g(e_a, e_b)
  Matrix induced_inv;
  double density = 1.0;  // sqrt(det gamma)
};

/// g-unit normal of the hyperplane with Euclidean unit normal nu_bar:
/// nu^i = g^{ij} nu_bar_j / (nu_bar_i nu_bar_j g^{ij})^{1/2}.
inline Vector g_unit_normal(const MetricField& field, const Vector& nu_bar, const Vector& x) {
  const Matrix ginv = field.metric_inverse(x);
  const Vector raised = ginv * nu_bar;
  const double norm_sq = nu_bar.dot(raised);
  if (!(norm_sq > 0.0)) throw numerical_error("g_unit_normal: degenerate metric");
  return raised / std::sqrt(norm_sq);
}

inline Vector g_unit_normal(const MetricField& field, const Face& face, const Vector& x) {
  return g_unit_normal(field, face.unit_normal, x);
}

/// Frame with an explicitly supplied tangent basis (columns Euclidean-orthonormal,
/// spanning the hyperplane of nu_bar). Used directly by the frame-independence
/// checks; face evaluation goes through face_frame below.
inline FaceFrame face_frame_with_basis(const MetricField& field, const Vector& nu_bar,
                                       const Matrix& tangent, const Vector& x) {
  FaceFrame fr;
  fr.point = x;
  fr.normal_euclid = nu_bar;
  fr.tangent = tangent;
  fr.metric = field.metric(x);
  fr.normal_g = g_unit_normal(field, nu_bar, x);
  fr.induced = tangent.transpose() * fr.metric * tangent;
  fr.induced_inv = spd_inverse(fr.induced, "face_frame");
  fr.density = std::sqrt(fr.induced.determinant());
  return fr;
}

inline FaceFrame face_frame(const MetricField& field, const Face& face, const Vector& x) {
  return face_frame_with_basis(field, face.unit_normal, hyperplane_basis(face.unit_normal), x);
}

/// Second fundamental form A_ab = -Gamma^k_ij e_a^i e_b^j (g nu)_k in the face
/// tangent basis (faces are flat, so the embedding has no second-derivative
/// term). Symmetric in (a, b).
inline Matrix second_fundamental_form(const MetricField& field, const FaceFrame& fr) {
  const int n = field.dim();
  const Tensor3 gamma = field.christoffel(fr.point);
  const Vector w = fr.metric * fr.normal_g;  // covector g(nu, .)
  const int d = n - 1;
  Matrix A(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        double gk = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) gk += gamma(k, i, j) * fr.tangent(i, a) * fr.tangent(j, b);
        s += gk * w[k];
      }
      A(a, b) = -s;
      A(b, a) = -s;
    }
  return A;
}

inline Matrix second_fundamental_form(const MetricField& field, const Face& face, const Vector& x) {
  return second_fundamental_form(field, face_frame(field, face, x));
}

/// Mean curvature H = gamma^{ab} A_ab with respect to the outward g-unit normal.
inline double mean_curvature(const MetricField& field, const FaceFrame& fr) {
  const Matrix A = second_fundamental_form(field, fr);
  return (fr.induced_inv * A).trace();
}

inline double mean_curvature(const MetricField& field, const Face& face, const Vector& x) {
  return mean_curvature(field, face_frame(field, face, x));
}

/// Area density d sigma / d sigma-bar at a face point.
inline double face_density(const MetricField& field, const Face& face, const Vector& x) {
  const Matrix T = hyperplane_basis(face.unit_normal);
  const Matrix induced = T.transpose() * field.metric(x) * T;
  return std::sqrt(induced.determinant());
}

namespace detail {

/// Euclidean-orthonormal tangent frame of an edge region (n x (n-2) columns;
/// empty for the point edges of 2-D complexes).
inline Matrix edge_tangent_basis(const Edge& edge, int dim) {
  if (edge.kind == Edge::Kind::box) {
    Matrix T = Matrix::Zero(dim, static_cast<int>(edge.axes.size()));
    for (int a = 0; a < static_cast<int>(edge.axes.size()); ++a) T(edge.axes[a], a) = 1.0;
    return T;
  }
  Matrix T(dim, 1);
  Vector d = edge.seg_b - edge.seg_a;
  T.col(0) = d / d.norm();
  return T;
}

}  // namespace detail

/// Volume density d mu / d mu-bar on an edge (1 for point edges).
inline double edge_density(const MetricField& field, const Edge& edge, const Vector& x) {
  const Matrix T = detail::edge_tangent_basis(edge, field.dim());
  if (T.cols() == 0) return 1.0;
  const Matrix induced = T.transpose() * field.metric(x) * T;
  return std::sqrt(induced.determinant());
}

/// Dihedral angle of g along an edge: cos theta is the normalized g^{-1}
/// pairing of the two face normals; alpha follows from the stored convexity
/// (convex: alpha = pi - theta; non-convex: alpha = pi + theta). Quotients
/// beyond [-1, 1] by more than 1e-12 are hard errors.
struct DihedralAngle {
  double theta = 0.0;
  double alpha = 0.0;
};

inline DihedralAngle g_dihedral_angle(const MetricField& field, const Edge& edge,
                                      const Vector& x) {
  const Matrix ginv = field.metric_inverse(x);
  const Vector ra = ginv * edge.normal_a;
  const Vector rb = ginv * edge.normal_b;
  const double na = edge.normal_a.dot(ra);
  const double nb = edge.normal_b.dot(rb);
  double q = edge.normal_a.dot(rb) / std::sqrt(na * nb);
  if (std::abs(q) > 1.0 + 1e-12)
    throw numerical_error("g_dihedral_angle: cosine quotient " + std::to_string(q) +
                          " outside [-1, 1] beyond round-off");
  q = std::clamp(q, -1.0, 1.0);
  DihedralAngle out;
  out.theta = std::acos(q);
  out.alpha = edge.convex ? kPi - out.theta : kPi + out.theta;
  return out;
}

/// Signed angle defect alpha - alpha_bar at an edge point.
inline double angle_defect(const MetricField& field, const Edge& edge, const Vector& x) {
  return g_dihedral_angle(field, edge, x).alpha - edge.euclidean_angle;
}

// ---------------------------------------------------------------------------
// Expansion residuals (flat faces in flat background). Each returns the
// pointwise residual magnitude; decay-order fitting over radius ladders lives
// in residuals.hpp.
// ---------------------------------------------------------------------------

/// First-order mean-curvature law on a flat face:
///   2H = (d tr h - div h)(nu-bar) - div_gamma X + O(|Dh| |h|),
/// with X the tangential field dual to h(nu-bar, .).
inline double residual_mean_curvature_expansion(const MetricField& field, const Face& face,
                                                const Vector& x) {
  const int n = field.dim();
  const FaceFrame fr = face_frame(field, face, x);
  const double H = mean_curvature(field, fr);
  const Tensor3 dh = field.metric_deriv(x);
  const Vector& nu = face.unit_normal;

  double dtr = 0.0, divh = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      dtr += nu[k] * dh(k, i, i);
      divh += dh(i, i, k) * nu[k];
    }
  double divX = 0.0;
  for (int a = 0; a < n - 1; ++a)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          divX += fr.tangent(k, a) * dh(k, i, j) * nu[i] * fr.tangent(j, a);

  return std::abs(2.0 * H - (dtr - divh - divX));
}

/// Exact divergence identity on a flat face in flat background:
///   (div h)(nu-bar) = d_nu h(nu-bar, nu-bar) + div_gamma X.
/// Residual is pure floating-point noise when derivatives are analytic.
inline double residual_divergence_identity(const MetricField& field, const Face& face,
                                           const Vector& x) {
  const int n = field.dim();
  const Matrix T = hyperplane_basis(face.unit_normal);
  const Tensor3 dh = field.metric_deriv(x);
  const Vector& nu = face.unit_normal;

  double divh = 0.0, dnu_hnn = 0.0, divX = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) divh += dh(i, i, j) * nu[j];
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dnu_hnn += nu[k] * dh(k, i, j) * nu[i] * nu[j];
  for (int a = 0; a < n - 1; ++a)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) divX += T(k, a) * dh(k, i, j) * nu[i] * T(j, a);

  return std::abs(divh - dnu_hnn - divX);
}

/// First-order normal expansion: |nu - nu_bar + X + 1/2 h(nu_bar, nu_bar) nu_bar|
/// is quadratic in h.
inline double residual_normal_expansion(const MetricField& field, const Face& face,
                                        const Vector& x) {
  const int n = field.dim();
  const Matrix T = hyperplane_basis(face.unit_normal);
  const Vector nu_g = g_unit_normal(field, face, x);
  const Matrix h = field.deviation(x);
  const Vector& nu = face.unit_normal;

  Vector X = Vector::Zero(n);
  for (int a = 0; a < n - 1; ++a) X += (nu.transpose() * h * T.col(a)).value() * T.col(a);
  const double hnn = nu.dot(h * nu);
  return (nu_g - nu + X + 0.5 * hnn * nu).norm();
}

/// First-order dihedral-cosine expansion along an edge:
///   cos theta - cos theta_bar = 1/2 cos theta_bar (a.a.h + b.b.h) - a.b.h + O(|h|^2).
inline double residual_cos_angle_expansion(const MetricField& field, const Edge& edge,
                                           const Vector& x) {
  const Matrix ginv = field.metric_inverse(x);
  const Vector& a = edge.normal_a;
  const Vector& b = edge.normal_b;
  const double na = a.dot(ginv * a);
  const double nb = b.dot(ginv * b);
  const double cos_theta = a.dot(ginv * b) / std::sqrt(na * nb);
  const double cos_theta_bar = a.dot(b);

  const Matrix h = field.deviation(x);
  const double aah = a.dot(h * a), bbh = b.dot(h * b), abh = a.dot(h * b);
  const double first_order = 0.5 * cos_theta_bar * (aah + bbh) - abh;
  return std::abs((cos_theta - cos_theta_bar) - first_order);
}

}  // namespace polymass

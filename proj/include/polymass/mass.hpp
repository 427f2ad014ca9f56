#pragma once

#include <string>
#include <vector>

#include "polymass/extrinsic.hpp"
#include "polymass/fitting.hpp"

namespace polymass {

enum class MassMethod { flux_sphere, flux_polyhedron, polyhedral };

inline const char* method_name(MassMethod m) {
  switch (m) {
    case MassMethod::flux_sphere: return "flux_sphere";
    case MassMethod::flux_polyhedron: return "flux_polyhedron";
    case MassMethod::polyhedral: return "polyhedral";
  }
  return "?";
}

/// One mass evaluation. For the polyhedral method,
///   mass_estimate = (face_integral + edge_integral) / ((n-1) omega_{n-1});
/// for flux methods face_integral holds the full flux and edge_integral is 0.
struct MassReport {
  MassMethod method = MassMethod::polyhedral;
  std::string geometry;
  double scale = 0.0;  // inner radius of the surface
  double face_integral = 0.0;
  double edge_integral = 0.0;
  double mass_estimate = 0.0;
  std::optional<double> quad_error;
  int dim = 0;
  double normalization = 0.0;  // omega_{n-1}
};

struct MassOptions {
  int level = 1;          // quadrature refinement level
  double angle_constant = 0.5;  // required lower bound on |sin(dihedral angle)|
  int threads = 1;
};

namespace detail {

/// Flux integrand (g_ij,i - g_ii,j) nu^j of the mass definition, evaluated
/// from coordinate partials of g directly (never via Christoffels, so the
/// flux and polyhedral routes stay independent).
inline double flux_integrand(const MetricField& field, const Vector& nu, const Vector& x) {
  const int n = field.dim();
  const Tensor3 dg = field.metric_deriv(x);
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += dg(i, i, j) - dg(j, i, i);
    s += t * nu[j];
  }
  return s;
}

inline void check_surface_clear(const MetricField& field, double surface_inner_radius,
                                const char* what) {
  if (!(surface_inner_radius > field.inner_radius()))
    throw config_error(std::string(what) + ": surface intersects the inner cutoff radius");
}

}  // namespace detail

/// ADM flux integral over a coordinate sphere, normalized by 2(n-1) omega_{n-1}.
inline MassReport adm_flux_mass(const MetricField& field, double sphere_radius,
                                const MassOptions& opts = {}) {
  detail::check_surface_clear(field, sphere_radius, "adm_flux_mass");
  const int n = field.dim();
  auto flux_at = [&](int level) {
    const QuadratureRule rule = sphere_rule(n, sphere_radius, level);
    auto f = [&](const Vector& x) { return detail::flux_integrand(field, x / x.norm(), x); };
    return integrate(rule, f, opts.threads);
  };
  const double omega = sphere_volume(n - 1);
  MassReport rep;
  rep.method = MassMethod::flux_sphere;
  rep.geometry = "sphere:" + format_g17(sphere_radius);
  rep.scale = sphere_radius;
  rep.dim = n;
  rep.normalization = omega;
  rep.face_integral = flux_at(opts.level);
  rep.edge_integral = 0.0;
  rep.mass_estimate = rep.face_integral / (2.0 * (n - 1) * omega);
  if (opts.level >= 1)
    rep.quad_error =
        std::abs(rep.mass_estimate - flux_at(opts.level - 1) / (2.0 * (n - 1) * omega));
  return rep;
}

/// ADM flux integral over a polyhedron boundary (Euclidean measure, no edge term).
inline MassReport adm_flux_mass(const MetricField& field, const Polyhedron& P,
                                const MassOptions& opts = {}) {
  detail::check_surface_clear(field, P.inner_radius, "adm_flux_mass");
  if (P.dim != field.dim()) throw config_error("adm_flux_mass: dimension mismatch");
  const int n = field.dim();
  auto flux_at = [&](int level) {
    double s = 0.0;
    for (const auto& face : P.faces) {
      auto f = [&](const Vector& x) { return detail::flux_integrand(field, face.unit_normal, x); };
      s += integrate(face_rule(face, level), f, opts.threads);
    }
    return s;
  };
  const double omega = sphere_volume(n - 1);
  MassReport rep;
  rep.method = MassMethod::flux_polyhedron;
  rep.geometry = P.label;
  rep.scale = P.inner_radius;
  rep.dim = n;
  rep.normalization = omega;
  rep.face_integral = flux_at(opts.level);
  rep.edge_integral = 0.0;
  rep.mass_estimate = rep.face_integral / (2.0 * (n - 1) * omega);
  if (opts.level >= 1)
    rep.quad_error =
        std::abs(rep.mass_estimate - flux_at(opts.level - 1) / (2.0 * (n - 1) * omega));
  return rep;
}

namespace detail {

struct BoundaryIntegrals {
  double face = 0.0;  // -sum_F int H dsigma
  double edge = 0.0;  // +sum_E int (alpha - alpha_bar) dmu
};

inline BoundaryIntegrals boundary_integrals(const MetricField& field, const Polyhedron& P,
                                            int level, int threads) {
  BoundaryIntegrals out;
  for (const auto& face : P.faces) {
    auto f = [&](const Vector& x) {
      const FaceFrame fr = face_frame(field, face, x);
      return mean_curvature(field, fr) * fr.density;
    };
    out.face -= integrate(face_rule(face, level), f, threads);
  }
  for (const auto& edge : P.edges) {
    auto f = [&](const Vector& x) {
      return angle_defect(field, edge, x) * edge_density(field, edge, x);
    };
    out.edge += integrate(edge_rule(edge, level), f, threads);
  }
  return out;
}

}  // namespace detail

/// Polyhedral mass: (total face mean-curvature integral, negated, plus total
/// dihedral angle defect) normalized by (n-1) omega_{n-1}. Both integrals use
/// the measures induced by g.
inline MassReport polyhedral_mass(const MetricField& field, const Polyhedron& P,
                                  const MassOptions& opts = {}) {
  detail::check_surface_clear(field, P.inner_radius, "polyhedral_mass");
  if (P.dim != field.dim()) throw config_error("polyhedral_mass: dimension mismatch");
  const auto validation = validate_angles(P, opts.angle_constant);
  if (!validation.ok) {
    std::string msg = "polyhedral_mass: angle validation failed, |sin(angle)| < " +
                      format_g17(opts.angle_constant) + " on edge(s)";
    for (int e : validation.violating_edges) msg += " " + std::to_string(e);
    throw config_error(msg);
  }
  const int n = field.dim();
  const double omega = sphere_volume(n - 1);
  const double norm = (n - 1) * omega;

  const auto fine = detail::boundary_integrals(field, P, opts.level, opts.threads);
  MassReport rep;
  rep.method = MassMethod::polyhedral;
  rep.geometry = P.label;
  rep.scale = P.inner_radius;
  rep.dim = n;
  rep.normalization = omega;
  rep.face_integral = fine.face;
  rep.edge_integral = fine.edge;
  rep.mass_estimate = (fine.face + fine.edge) / norm;
  if (opts.level >= 1) {
    const auto coarse = detail::boundary_integrals(field, P, opts.level - 1, opts.threads);
    rep.quad_error = std::abs(rep.mass_estimate - (coarse.face + coarse.edge) / norm);
  }
  return rep;
}

/// Un-normalized boundary quantity -int H dsigma + int (alpha - alpha_bar) dmu;
/// nonnegative for the nonnegative-scalar-curvature catalog fields once the
/// polyhedron is large.
inline double boundary_defect(const MetricField& field, const Polyhedron& P,
                              const MassOptions& opts = {}) {
  const MassReport rep = polyhedral_mass(field, P, opts);
  return rep.face_integral + rep.edge_integral;
}

/// Mass evaluations over a scaled polyhedron family, with fitted convergence
/// orders and extrapolated limits per method.
struct ConvergenceTable {
  std::vector<double> scales;
  std::vector<MassReport> polyhedral;
  std::vector<MassReport> flux;
  ExtrapolationResult polyhedral_fit;
  ExtrapolationResult flux_fit;
};

inline ConvergenceTable convergence_study(const MetricField& field, const Polyhedron& base,
                                          const std::vector<double>& scales,
                                          const MassOptions& opts = {}) {
  if (scales.empty()) throw config_error("convergence_study: empty scale list");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] > scales[i - 1]))
      throw config_error("convergence_study: scales must be strictly increasing");

  ConvergenceTable table;
  table.scales = scales;
  std::vector<double> poly_vals, flux_vals;
  for (double s : scales) {
    const Polyhedron P = scale(base, s);
    table.polyhedral.push_back(polyhedral_mass(field, P, opts));
    table.flux.push_back(adm_flux_mass(field, P, opts));
    poly_vals.push_back(table.polyhedral.back().mass_estimate);
    flux_vals.push_back(table.flux.back().mass_estimate);
  }
  table.polyhedral_fit = extrapolate_limit(scales, poly_vals);
  table.flux_fit = extrapolate_limit(scales, flux_vals);
  return table;
}

}  // namespace polymass

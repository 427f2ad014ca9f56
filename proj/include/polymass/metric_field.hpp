#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "polymass/linalg.hpp"

namespace polymass {

/// An asymptotically flat Riemannian metric g = delta + h given by closed-form
/// coefficient functions on |x| > inner_radius. Immutable after construction;
/// all evaluation is pure and thread safe.
///
/// decay_order is the declared falloff exponent p of h (nullopt encodes an
/// exactly flat field: no finite decay rate participates in arithmetic).
class MetricField {
 public:
  using CoeffFn = std::function<Matrix(const Vector&)>;
  using DerivFn = std::function<Tensor3(const Vector&)>;
  using Deriv2Fn = std::function<Tensor4(const Vector&)>;

  MetricField(int dim, std::optional<double> decay_order, double inner_radius, CoeffFn coeff,
              DerivFn dcoeff = {}, Deriv2Fn d2coeff = {},
              std::optional<double> analytic_mass = std::nullopt, std::string id = {})
      : dim_(dim),
        decay_order_(decay_order),
        inner_radius_(inner_radius),
        coeff_(std::move(coeff)),
        dcoeff_(std::move(dcoeff)),
        d2coeff_(std::move(d2coeff)),
        analytic_mass_(analytic_mass),
        id_(std::move(id)) {
    if (dim_ < 2) throw config_error("MetricField: dimension must be at least 2");
    if (inner_radius_ <= 0.0) throw config_error("MetricField: inner radius must be positive");
  }

  int dim() const { return dim_; }
  std::optional<double> decay_order() const { return decay_order_; }
  bool has_finite_decay() const { return decay_order_.has_value(); }
  double inner_radius() const { return inner_radius_; }
  std::optional<double> analytic_mass() const { return analytic_mass_; }
  const std::string& id() const { return id_; }
  bool has_analytic_derivatives() const { return static_cast<bool>(dcoeff_); }

  /// g_ij(x). Only defined for |x| > inner_radius.
  Matrix metric(const Vector& x) const {
    check_point(x);
    return coeff_(x);
  }

  /// g^{ij}(x).
  Matrix metric_inverse(const Vector& x) const {
    return spd_inverse(metric(x), "metric_inverse");
  }

  /// d_k g_ij(x); analytic when available, else central differences with a
  /// step proportional to |x| (h varies on scale |x|).
  Tensor3 metric_deriv(const Vector& x) const {
    check_point(x);
    if (dcoeff_) return dcoeff_(x);
    const double step = x.norm() * 1e-4;
    Tensor3 d(dim_);
    Vector xp = x, xm = x;
    for (int k = 0; k < dim_; ++k) {
      xp[k] = x[k] + step;
      xm[k] = x[k] - step;
      const Matrix gp = coeff_(xp);
      const Matrix gm = coeff_(xm);
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) d(k, i, j) = (gp(i, j) - gm(i, j)) / (2.0 * step);
      xp[k] = x[k];
      xm[k] = x[k];
    }
    return d;
  }

  /// d_l d_k g_ij(x).
  Tensor4 metric_deriv2(const Vector& x) const {
    check_point(x);
    if (d2coeff_) return d2coeff_(x);
    const double step = x.norm() * 1e-4;
    Tensor4 d2(dim_);
    Vector xp = x, xm = x;
    for (int l = 0; l < dim_; ++l) {
      xp[l] = x[l] + step;
      xm[l] = x[l] - step;
      const Tensor3 dp = metric_deriv(xp);
      const Tensor3 dm = metric_deriv(xm);
      for (int k = 0; k < dim_; ++k)
        for (int i = 0; i < dim_; ++i)
          for (int j = 0; j < dim_; ++j)
            d2(l, k, i, j) = (dp(k, i, j) - dm(k, i, j)) / (2.0 * step);
      xp[l] = x[l];
      xm[l] = x[l];
    }
    return d2;
  }

  /// Christoffel symbols Gamma^k_ij = 1/2 g^{kl} (d_i g_lj + d_j g_il - d_l g_ij).
  Tensor3 christoffel(const Vector& x) const {
    const Matrix ginv = metric_inverse(x);
    const Tensor3 dg = metric_deriv(x);
    Tensor3 gamma(dim_);
    for (int k = 0; k < dim_; ++k)
      for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
          double s = 0.0;
          for (int l = 0; l < dim_; ++l)
            s += ginv(k, l) * (dg(i, l, j) + dg(j, i, l) - dg(l, i, j));
          gamma(k, i, j) = 0.5 * s;
          gamma(k, j, i) = 0.5 * s;
        }
    return gamma;
  }

  /// Deviation h = g - delta.
  Matrix deviation(const Vector& x) const {
    Matrix h = metric(x);
    for (int i = 0; i < dim_; ++i) h(i, i) -= 1.0;
    return h;
  }

  /// Frobenius norm |h| (flat-background tensor norm).
  double deviation_norm(const Vector& x) const { return deviation(x).norm(); }

 private:
  void check_point(const Vector& x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw config_error("MetricField: point dimension mismatch");
    if (!(x.norm() > inner_radius_))
      throw config_error("MetricField: point inside the inner cutoff radius");
  }

  int dim_;
  std::optional<double> decay_order_;
  double inner_radius_;
  CoeffFn coeff_;
  DerivFn dcoeff_;
  Deriv2Fn d2coeff_;
  std::optional<double> analytic_mass_;
  std::string id_;
};

/// Flat background metric: identity coefficients, zero derivatives.
inline MetricField make_euclidean(int n) {
  if (n < 3) throw config_error("make_euclidean: dimension must be at least 3");
  auto coeff = [n](const Vector&) { return Matrix::Identity(n, n); };
  auto dcoeff = [n](const Vector&) { return Tensor3(n); };
  auto d2coeff = [n](const Vector&) { return Tensor4(n); };
  return MetricField(n, std::nullopt, 1e-6, coeff, dcoeff, d2coeff, 0.0,
                     "euclidean:" + std::to_string(n));
}

/// Conformally flat test metric g = u^{4/(n-2)} delta with u = 1 + m/(2 |x|^{n-2}).
/// Declared decay order n-2; ADM mass equals the parameter m.
inline MetricField make_schwarzschild_isotropic(int n, double m) {
  if (n < 3) throw config_error("make_schwarzschild_isotropic: dimension must be at least 3");
  if (m < 0.0) throw config_error("make_schwarzschild_isotropic: mass parameter must be >= 0");
  const double q = 4.0 / (n - 2);
  const double c = 0.5 * m;

  // u derivatives in closed form:
  //   u_k  = c (2-n) x_k r^{-n}
  //   u_kl = c (2-n) (delta_kl r^{-n} - n x_k x_l r^{-n-2})
  auto u_of = [c, n](const Vector& x) { return 1.0 + c * std::pow(x.norm(), 2.0 - n); };

  auto coeff = [n, q, u_of](const Vector& x) {
    return std::pow(u_of(x), q) * Matrix::Identity(n, n);
  };
  auto dcoeff = [n, q, c, u_of](const Vector& x) {
    const double r = x.norm();
    const double u = u_of(x);
    const double a = q * std::pow(u, q - 1.0) * c * (2.0 - n) * std::pow(r, -static_cast<double>(n));
    Tensor3 d(n);
    for (int k = 0; k < n; ++k) {
      const double Uk = a * x[k];
      for (int i = 0; i < n; ++i) d(k, i, i) = Uk;
    }
    return d;
  };
  auto d2coeff = [n, q, c, u_of](const Vector& x) {
    const double r = x.norm();
    const double u = u_of(x);
    const double rn = std::pow(r, -static_cast<double>(n));
    const double b = c * (2.0 - n);
    Tensor4 d2(n);
    for (int k = 0; k < n; ++k) {
      const double uk = b * x[k] * rn;
      for (int l = 0; l < n; ++l) {
        const double ul = b * x[l] * rn;
        const double ukl = b * ((k == l ? rn : 0.0) - n * x[k] * x[l] * rn / (r * r));
        const double Ukl =
            q * (q - 1.0) * std::pow(u, q - 2.0) * uk * ul + q * std::pow(u, q - 1.0) * ukl;
        for (int i = 0; i < n; ++i) d2(l, k, i, i) = Ukl;
      }
    }
    return d2;
  };

  const double r0 = std::max(1.0, 4.0 * std::pow(c, 1.0 / (n - 2)));
  std::ostringstream id;
  id << "schwarzschild:" << n << ":" << format_g17(m);
  return MetricField(n, static_cast<double>(n - 2), r0, coeff, dcoeff, d2coeff, m, id.str());
}

namespace detail {

/// Quadratic angular profile s_ij(u) = c0_ij + c1_ijk u_k + c2_ijkl u_k u_l,
/// symmetric in (i,j), with coefficients drawn from a counter-based stream and
/// normalized so that sup_u |s|_F <= 1.
struct AngularProfile {
  int n = 0;
  std::vector<double> c0, c1, c2;

  static AngularProfile seeded(int n, std::uint64_t seed) {
    AngularProfile p;
    p.n = n;
    p.c0.assign(static_cast<std::size_t>(n) * n, 0.0);
    p.c1.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    p.c2.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
    std::uint64_t ctr = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = counter_uniform(seed, ctr++);
        p.at0(i, j) = v;
        p.at0(j, i) = v;
      }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double v = counter_uniform(seed, ctr++);
          p.at1(i, j, k) = v;
          p.at1(j, i, k) = v;
        }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = k; l < n; ++l) {
            const double v = counter_uniform(seed, ctr++);
            p.at2(i, j, k, l) = v;
            p.at2(i, j, l, k) = v;
            p.at2(j, i, k, l) = v;
            p.at2(j, i, l, k) = v;
          }
    // Entrywise bound sup_u |s_ij(u)| <= |c0| + sum_k |c1| + sum_kl |c2| on |u| = 1.
    double bound_sq = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double b = std::abs(p.at0(i, j));
        for (int k = 0; k < n; ++k) b += std::abs(p.at1(i, j, k));
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) b += std::abs(p.at2(i, j, k, l));
        bound_sq += b * b;
      }
    const double scale = 1.0 / std::sqrt(bound_sq);
    for (double& v : p.c0) v *= scale;
    for (double& v : p.c1) v *= scale;
    for (double& v : p.c2) v *= scale;
    return p;
  }

  double& at0(int i, int j) { return c0[static_cast<std::size_t>(i) * n + j]; }
  double at0(int i, int j) const { return c0[static_cast<std::size_t>(i) * n + j]; }
  double& at1(int i, int j, int k) { return c1[(static_cast<std::size_t>(i) * n + j) * n + k]; }
  double at1(int i, int j, int k) const { return c1[(static_cast<std::size_t>(i) * n + j) * n + k]; }
  double& at2(int i, int j, int k, int l) {
    return c2[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  }
  double at2(int i, int j, int k, int l) const {
    return c2[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  }

  double value(int i, int j, const Vector& u) const {
    double s = at0(i, j);
    for (int k = 0; k < n; ++k) s += at1(i, j, k) * u[k];
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) s += at2(i, j, k, l) * u[k] * u[l];
    return s;
  }
  double grad(int i, int j, int m, const Vector& u) const {
    double s = at1(i, j, m);
    for (int l = 0; l < n; ++l) s += 2.0 * at2(i, j, m, l) * u[l];
    return s;
  }
  double hess(int i, int j, int m, int q) const { return 2.0 * at2(i, j, m, q); }
};

}  // namespace detail

/// Generic non-conformally-flat perturbation h_ij = amplitude * s_ij(x/|x|) * |x|^{-p}
/// with a seeded quadratic angular profile. Closed-form first and second
/// derivatives via the chain rule through u = x/r.
inline MetricField make_perturbation(int n, double p, double amplitude, std::uint64_t seed) {
  if (n < 3) throw config_error("make_perturbation: dimension must be at least 3");
  if (!(p > 0.5 * (n - 2)))
    throw config_error("make_perturbation: decay order must exceed (n-2)/2");
  if (amplitude < 0.0) throw config_error("make_perturbation: amplitude must be >= 0");
  const double r0 = 1.0;
  if (!(amplitude < smallness_bound(n)))
    throw config_error(
        "make_perturbation: amplitude violates the smallness bound |h| < 1/(2(n-1)) beyond the "
        "inner radius");

  const auto prof = detail::AngularProfile::seeded(n, seed);
  const double A = amplitude;

  auto coeff = [n, p, A, prof](const Vector& x) {
    const double r = x.norm();
    const Vector u = x / r;
    const double f = std::pow(r, -p);
    Matrix g = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double hij = A * prof.value(i, j, u) * f;
        g(i, j) += hij;
        if (j != i) g(j, i) += hij;
      }
    return g;
  };

  auto dcoeff = [n, p, A, prof](const Vector& x) {
    const double r = x.norm();
    const Vector u = x / r;
    const double f = std::pow(r, -p);
    const double fp = -p * std::pow(r, -p - 1.0);
    Tensor3 d(n);
    // du_m/dx_k = (delta_mk - u_m u_k)/r
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) {
            const double dudx = ((m == k ? 1.0 : 0.0) - u[m] * u[k]) / r;
            s += prof.grad(i, j, m, u) * dudx;
          }
          const double v = A * (s * f + prof.value(i, j, u) * fp * u[k]);
          d(k, i, j) = v;
          d(k, j, i) = v;
        }
      }
    return d;
  };

  auto d2coeff = [n, p, A, prof](const Vector& x) {
    const double r = x.norm();
    const Vector u = x / r;
    const double f = std::pow(r, -p);
    const double fp = -p * std::pow(r, -p - 1.0);
    const double fpp = p * (p + 1.0) * std::pow(r, -p - 2.0);
    Tensor4 d2(n);
    auto dudx = [&](int m, int k) { return ((m == k ? 1.0 : 0.0) - u[m] * u[k]) / r; };
    auto d2udx = [&](int m, int k, int l) {
      const double dml = (m == l ? 1.0 : 0.0), dkl = (k == l ? 1.0 : 0.0),
                   dmk = (m == k ? 1.0 : 0.0);
      return (-dml * u[k] - dkl * u[m] - dmk * u[l] + 3.0 * u[m] * u[k] * u[l]) / (r * r);
    };
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double s = prof.value(i, j, u);
        std::vector<double> sg(n);
        for (int m = 0; m < n; ++m) sg[m] = prof.grad(i, j, m, u);
        for (int k = 0; k < n; ++k)
          for (int l = k; l < n; ++l) {
            double acc = 0.0;
            for (int m = 0; m < n; ++m) {
              for (int q = 0; q < n; ++q)
                acc += prof.hess(i, j, m, q) * dudx(q, l) * dudx(m, k) * f;
              acc += sg[m] * d2udx(m, k, l) * f;
              acc += sg[m] * (dudx(m, k) * u[l] + dudx(m, l) * u[k]) * fp;
            }
            acc += s * fpp * u[k] * u[l] + s * fp * dudx(k, l);
            const double v = A * acc;
            d2(l, k, i, j) = v;
            d2(l, k, j, i) = v;
            d2(k, l, i, j) = v;
            d2(k, l, j, i) = v;
          }
      }
    return d2;
  };

  std::ostringstream id;
  id << "perturb:" << n << ":" << format_g17(p) << ":" << format_g17(amplitude) << ":" << seed;
  return MetricField(n, p, r0, coeff, dcoeff, d2coeff, std::nullopt, id.str());
}

struct FieldCatalogEntry {
  std::string pattern;
  std::string example;
  std::string description;
};

inline std::vector<FieldCatalogEntry> field_catalog() {
  return {
      {"euclidean:<n>", "euclidean:3", "flat background metric in dimension n"},
      {"schwarzschild:<n>:<m>", "schwarzschild:3:1",
       "conformally flat metric u^{4/(n-2)} delta, u = 1 + m/(2|x|^{n-2}); ADM mass m"},
      {"perturb:<n>:<p>:<amp>:<seed>", "perturb:3:1:0.1:7",
       "seeded angular perturbation h = amp * s(x/|x|) |x|^{-p}"},
  };
}

namespace detail {

inline std::vector<std::string> split_id(const std::string& id) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : id) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

inline double parse_real(const std::string& s, const std::string& id) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("malformed numeric component '" + s + "' in id '" + id + "'");
  }
}

inline long long parse_int(const std::string& s, const std::string& id) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("malformed integer component '" + s + "' in id '" + id + "'");
  }
}

}  // namespace detail

/// Parse a catalog field id: "euclidean:n", "schwarzschild:n:m",
/// "perturb:n:p:amp:seed".
inline MetricField field_from_id(const std::string& id) {
  const auto parts = detail::split_id(id);
  if (parts.empty()) throw config_error("unknown field id '" + id + "'");
  if (parts[0] == "euclidean" && parts.size() == 2)
    return make_euclidean(static_cast<int>(detail::parse_int(parts[1], id)));
  if (parts[0] == "schwarzschild" && parts.size() == 3)
    return make_schwarzschild_isotropic(static_cast<int>(detail::parse_int(parts[1], id)),
                                        detail::parse_real(parts[2], id));
  if (parts[0] == "perturb" && parts.size() == 5)
    return make_perturbation(static_cast<int>(detail::parse_int(parts[1], id)),
                             detail::parse_real(parts[2], id), detail::parse_real(parts[3], id),
                             static_cast<std::uint64_t>(detail::parse_int(parts[4], id)));
  throw config_error("unknown field id '" + id + "'");
}

}  // namespace polymass

#pragma once

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "polymass/residuals.hpp"
#include "polymass/table.hpp"

namespace polymass::cli {

// Exit codes: 0 success, 1 verification failure, 2 config/validation error,
// 3 numerical error.

struct RunConfig {
  std::string field_id;
  std::string geometry_id;
  std::vector<double> scales;
  int quad_level = 1;
  double angle_constant = 0.5;
  std::string format = "csv";
  std::string out_path;
  int threads = 1;

  std::string method = "polyhedral";  // mass: polyhedral | flux | all

  double half_width = 100.0;  // slice
  std::string axis = "all";
  int t_nodes = 32;
  bool profile = false;
  bool do_integral = false;

  std::vector<double> ladder = {25.0, 50.0, 100.0, 200.0};  // verify
  bool inject_derivative_error = false;

  MassOptions mass_options() const {
    MassOptions o;
    o.level = quad_level;
    o.angle_constant = angle_constant;
    o.threads = threads;
    return o;
  }
};

namespace detail_cli {

inline std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw config_error(std::string(what) + ": malformed number '" + item + "'");
    }
  }
  if (out.empty()) throw config_error(std::string(what) + ": empty list");
  return out;
}

inline void emit(const Table& table, const RunConfig& cfg, std::ostream& out) {
  if (!cfg.out_path.empty()) {
    std::ofstream file(cfg.out_path, std::ios::binary);
    if (!file) throw config_error("cannot open output path '" + cfg.out_path + "'");
    cfg.format == "json" ? write_json(table, file) : write_csv(table, file);
    return;
  }
  cfg.format == "json" ? write_json(table, out) : write_csv(table, out);
}

inline MetricField load_field(const RunConfig& cfg) {
  MetricField field = field_from_id(cfg.field_id);
  if (!cfg.inject_derivative_error) return field;
  // Fault-injection hook for the verify suite: corrupt one derivative entry.
  const int n = field.dim();
  auto broken = [field, n](const Vector& x) {
    Tensor3 d = field.metric_deriv(x);
    d(0, 0, 0) += 1e-4 / x.norm();
    return d;
  };
  return MetricField(
      n, field.decay_order(), field.inner_radius(),
      [field](const Vector& x) { return field.metric(x); }, broken,
      [field](const Vector& x) { return field.metric_deriv2(x); }, field.analytic_mass(),
      field.id() + "|corrupted");
}

inline Table mass_table() {
  Table t;
  t.columns = {"method", "geometry", "scale", "face_integral", "edge_integral", "mass",
               "quad_error"};
  return t;
}

inline void append_report(Table& t, const MassReport& rep) {
  t.add_row({std::string(method_name(rep.method)), rep.geometry, rep.scale, rep.face_integral,
             rep.edge_integral, rep.mass_estimate,
             rep.quad_error ? Table::Cell(*rep.quad_error) : Table::Cell(std::string())});
}

struct SphereSpec {
  bool is_sphere = false;
  double radius = 0.0;
};

inline SphereSpec sphere_spec(const std::string& geometry_id) {
  const auto parts = polymass::detail::split_id(geometry_id);
  SphereSpec s;
  if (!parts.empty() && parts[0] == "sphere") {
    if (parts.size() != 2) throw config_error("unknown geometry id '" + geometry_id + "'");
    s.is_sphere = true;
    s.radius = polymass::detail::parse_real(parts[1], geometry_id);
  }
  return s;
}

}  // namespace detail_cli

inline int cmd_mass(const RunConfig& cfg, std::ostream& out) {
  const MetricField field = detail_cli::load_field(cfg);
  const MassOptions opts = cfg.mass_options();
  Table t = detail_cli::mass_table();

  const auto sphere = detail_cli::sphere_spec(cfg.geometry_id);
  if (sphere.is_sphere) {
    if (cfg.method == "polyhedral")
      throw config_error("polyhedral method is not defined on spheres; use --method flux");
    detail_cli::append_report(t, adm_flux_mass(field, sphere.radius, opts));
  } else {
    const Polyhedron P = polyhedron_from_id(cfg.geometry_id);
    if (cfg.method == "polyhedral" || cfg.method == "all")
      detail_cli::append_report(t, polyhedral_mass(field, P, opts));
    if (cfg.method == "flux" || cfg.method == "all")
      detail_cli::append_report(t, adm_flux_mass(field, P, opts));
  }
  detail_cli::emit(t, cfg, out);
  return 0;
}

inline int cmd_converge(const RunConfig& cfg, std::ostream& out) {
  const MetricField field = detail_cli::load_field(cfg);
  const Polyhedron base = polyhedron_from_id(cfg.geometry_id);
  const ConvergenceTable table = convergence_study(field, base, cfg.scales, cfg.mass_options());

  Table t;
  t.columns = {"method", "geometry", "scale",      "face_integral", "edge_integral",
               "mass",   "quad_error", "fitted_order", "extrapolated"};
  auto row = [&](const MassReport& rep, const ExtrapolationResult& fit) {
    t.add_row({std::string(method_name(rep.method)), rep.geometry, rep.scale, rep.face_integral,
               rep.edge_integral, rep.mass_estimate,
               rep.quad_error ? Table::Cell(*rep.quad_error) : Table::Cell(std::string()),
               fit.order ? Table::Cell(*fit.order) : Table::Cell(std::string()),
               Table::Cell(fit.limit)});
  };
  for (const auto& rep : table.polyhedral) row(rep, table.polyhedral_fit);
  for (const auto& rep : table.flux) row(rep, table.flux_fit);
  detail_cli::emit(t, cfg, out);
  return 0;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const MetricField field = detail_cli::load_field(cfg);
  const auto reports = run_residual_suite(field, cfg.ladder);

  Table t;
  t.columns = {"test",      "radii",           "max_residual", "fitted_order",
               "predicted_order", "tolerance", "status"};
  bool all_pass = true;
  for (const auto& rep : reports) {
    all_pass = all_pass && rep.pass;
    std::string radii;
    for (std::size_t i = 0; i < rep.radii.size(); ++i)
      radii += (i ? " " : "") + format_g17(rep.radii[i]);
    double worst = 0.0;
    for (double v : rep.residuals) worst = std::max(worst, std::abs(v));
    t.add_row({rep.name, radii, worst,
               rep.fitted_order ? Table::Cell(*rep.fitted_order) : Table::Cell(std::string()),
               rep.predicted_order ? Table::Cell(*rep.predicted_order)
                                   : Table::Cell(std::string(rep.exact_identity ? "exact" : "")),
               rep.tolerance,
               std::string(rep.pass ? (rep.trivially_zero ? "pass(zero)" : "pass") : "fail")});
  }
  detail_cli::emit(t, cfg, out);
  return all_pass ? 0 : 1;
}

inline int cmd_slice(const RunConfig& cfg, std::ostream& out) {
  const MetricField field = detail_cli::load_field(cfg);
  const MassOptions opts = cfg.mass_options();
  const int n = field.dim();

  std::vector<int> axes;
  if (cfg.axis == "all") {
    for (int a = 0; a < n; ++a) axes.push_back(a);
  } else {
    const long long k = polymass::detail::parse_int(cfg.axis, "--axis " + cfg.axis);
    if (k < 1 || k > n) throw config_error("--axis must be 'all' or in 1..n");
    axes.push_back(static_cast<int>(k - 1));
  }

  if (cfg.do_integral) {
    const double total = slice_mass_integral(field, cfg.half_width, opts, cfg.t_nodes);
    const MassReport flux = adm_flux_mass(field, cfg.half_width, opts);
    Table t;
    t.columns = {"quantity", "value"};
    t.add_row({std::string("slice_mass"), total});
    t.add_row({std::string("flux_mass_sphere"), flux.mass_estimate});
    t.add_row({std::string("abs_difference"), std::abs(total - flux.mass_estimate)});
    detail_cli::emit(t, cfg, out);
    return 0;
  }

  std::vector<double> gx, gw;
  quad::gauss_legendre(cfg.t_nodes, gx, gw);
  Table t;
  t.columns = {"axis", "t", "L", "face_integral", "edge_integral", "value"};
  for (int a : axes)
    for (int i = 0; i < cfg.t_nodes; ++i) {
      const double tval = cfg.half_width * gx[i];
      const SliceQuantity q = (n == 3)
                                  ? slice_quantity_3d(field, a, tval, cfg.half_width, opts)
                                  : slice_quantity(field, a, tval, cfg.half_width, opts);
      t.add_row({static_cast<long long>(a + 1), q.t, q.half_width, q.face_integral,
                 q.edge_integral, q.value});
    }
  detail_cli::emit(t, cfg, out);
  return 0;
}

inline int cmd_catalog(const RunConfig& cfg, std::ostream& out) {
  Table t;
  t.columns = {"kind", "id", "example", "description"};
  for (const auto& e : field_catalog())
    t.add_row({std::string("field"), e.pattern, e.example, e.description});
  for (const auto& e : geometry_catalog())
    t.add_row({std::string("geometry"), e.pattern, e.example, e.description});
  detail_cli::emit(t, cfg, out);
  return 0;
}

/// Parse and run one CLI invocation; returns the process exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"polyhedral mass toolkit for asymptotically flat metrics"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--quad-level", cfg.quad_level, "quadrature refinement level")
        ->check(CLI::Range(0, 6));
    sub->add_option("--c", cfg.angle_constant, "required lower bound on |sin(dihedral angle)|");
    sub->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out_path, "output file (default: stdout)");
    sub->add_option("--threads", cfg.threads, "worker threads for quadrature")
        ->check(CLI::Range(1, 256));
  };

  std::string scales_text = "25,50,100,200";
  std::string ladder_text = "25,50,100,200";

  CLI::App* mass = app.add_subcommand("mass", "mass of a field over one surface");
  mass->add_option("--field", cfg.field_id, "field id")->required();
  mass->add_option("--geometry", cfg.geometry_id, "geometry id")->required();
  mass->add_option("--method", cfg.method, "polyhedral | flux | all")
      ->check(CLI::IsMember({"polyhedral", "flux", "all"}));
  add_common(mass);

  CLI::App* converge = app.add_subcommand("converge", "mass over a scaled polyhedron family");
  converge->add_option("--field", cfg.field_id, "field id")->required();
  converge->add_option("--geometry", cfg.geometry_id, "base geometry id")->required();
  converge->add_option("--scales", scales_text, "comma separated scale factors");
  add_common(converge);

  CLI::App* verify = app.add_subcommand("verify", "expansion/decay residual suite");
  verify->add_option("--field", cfg.field_id, "field id")->required();
  verify->add_option("--ladder", ladder_text, "comma separated ladder radii");
  verify
      ->add_flag("--inject-derivative-error", cfg.inject_derivative_error,
                 "corrupt one metric derivative (fault-injection hook)")
      ->group("");  // hidden
  add_common(verify);

  CLI::App* slice = app.add_subcommand("slice", "hyperplane slice quantities");
  slice->add_option("--field", cfg.field_id, "field id")->required();
  slice->add_option("--L", cfg.half_width, "cube half width")->required();
  slice->add_option("--axis", cfg.axis, "slice axis (1..n) or 'all'");
  slice->add_option("--t-nodes", cfg.t_nodes, "Gauss nodes for the t integral")
      ->check(CLI::Range(2, 4096));
  slice->add_flag("--profile", cfg.profile, "emit (t, value) rows per axis");
  slice->add_flag("--integrate", cfg.do_integral, "emit the slicing mass integral");
  add_common(slice);

  CLI::App* catalog = app.add_subcommand("catalog", "list field and geometry ids");
  add_common(catalog);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (mass->parsed()) return cmd_mass(cfg, out);
    if (converge->parsed()) {
      cfg.scales = detail_cli::parse_number_list(scales_text, "--scales");
      return cmd_converge(cfg, out);
    }
    if (verify->parsed()) {
      cfg.ladder = detail_cli::parse_number_list(ladder_text, "--ladder");
      return cmd_verify(cfg, out);
    }
    if (slice->parsed()) {
      if (cfg.profile && cfg.do_integral)
        throw config_error("--profile and --integrate are mutually exclusive");
      return cmd_slice(cfg, out);
    }
    if (catalog->parsed()) return cmd_catalog(cfg, out);
    err << "error: no subcommand\n";
    return 2;
  } catch (const config_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace polymass::cli

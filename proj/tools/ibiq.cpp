// ibiq: command line front end for tabulation, evaluation and convergence studies.
#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <iostream>

#include "ibiq/errors.hpp"
#include "ibiq/harness.hpp"
#include "ibiq/regularization.hpp"

using namespace ibiq;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(std::stod(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Vec3 parse_vec3(const std::string& s) {
  auto v = parse_list(s);
  if (v.size() != 3) throw ParameterError("expected x,y,z: " + s);
  return Vec3(v[0], v[1], v[2]);
}

JacobianMode parse_jacobian(const std::string& s) {
  if (s == "default") return JacobianMode::Default;
  if (s == "analytic") return JacobianMode::Analytic;
  if (s == "fd") return JacobianMode::FiniteDifference;
  throw ParameterError("jacobian mode must be default, analytic or fd");
}

// "const:<c>" is the only density family the CLI exposes.
Density parse_density(const std::string& s) {
  if (s.rfind("const:", 0) != 0) throw ParameterError("density must be const:<value>");
  double c = std::stod(s.substr(6));
  return [c](const Vec3&) { return c; };
}

struct SurfaceOpts {
  std::string surface = "sphere";
  double reach = 0.1;
  void add(CLI::App* app) {
    app->add_option("--surface", surface, "sphere, torus or field:<path>");
    app->add_option("--reach", reach, "reach bound for sampled fields");
  }
  ImplicitSurface make() const { return make_surface(surface, reach); }
};

struct TargetOpts {
  std::string param, point;
  void add(CLI::App* app) {
    app->add_option("--target-param", param, "torus angles theta,phi");
    app->add_option("--target", point, "target point x,y,z (projected onto the surface)");
  }
  bool given() const { return !param.empty() || !point.empty(); }
  TargetPoint make(const ImplicitSurface& s) const {
    if (!param.empty()) {
      auto v = parse_list(param);
      if (v.size() != 2) throw ParameterError("--target-param needs theta,phi");
      return torus_target(s, v[0], v[1]);
    }
    if (!point.empty()) {
      TargetPoint t;
      t.x = s.closest_point(parse_vec3(point));
      t.params = {t.x[0], t.x[1], t.x[2]};
      return t;
    }
    return gen_targets(s, 1, 7).front();
  }
};

void print_table(const CsvTable& t) { std::cout << to_csv_string(t); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implicit boundary integral quadrature"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  // tabulate
  auto* tab = app.add_subcommand("tabulate", "tabulate correction weights");
  int tab_n = 22, tab_nab = 101;
  double tab_tol = 1e-9;
  std::string tab_out;
  tab->add_option("--n", tab_n, "Fourier order N");
  tab->add_option("--nab", tab_nab, "shift samples per axis");
  tab->add_option("--tol", tab_tol, "convergence tolerance of the delta limit");
  tab->add_option("--out", tab_out, "output file")->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "evaluate a layer potential at one target");
  SurfaceOpts ev_surf;
  TargetOpts ev_target;
  std::string ev_kernel = "dl", ev_method = "corrected", ev_weights, ev_density = "const:1", ev_jac = "default";
  double ev_h = 0.02, ev_eps = 0.1, ev_r0 = 2.0;
  int ev_axis = -1;
  ev_surf.add(ev);
  ev_target.add(ev);
  ev->add_option("--kernel", ev_kernel, "sl, dl, dlc or helm2");
  ev->add_option("--method", ev_method, "corrected, const, cappuccio or punctured");
  ev->add_option("--h", ev_h, "grid spacing");
  ev->add_option("--eps", ev_eps, "tube half width");
  ev->add_option("--r0-coeff", ev_r0, "regularization radius coefficient, r0 = c sqrt(eps h)");
  ev->add_option("--weights", ev_weights, "weight table file");
  ev->add_option("--density", ev_density, "const:<value>");
  ev->add_option("--jacobian", ev_jac, "default, analytic or fd");
  ev->add_option("--axis", ev_axis, "splitting axis, -1 picks the dominant normal component");

  // convergence
  auto* cv = app.add_subcommand("convergence", "convergence study with density 1");
  SurfaceOpts cv_surf;
  std::string cv_kernel = "dl", cv_methods = "corrected", cv_h = "0.04,0.028,0.02", cv_eps = "const:0.1",
              cv_weights, cv_out, cv_summary, cv_jac = "default";
  int cv_targets = 20;
  std::uint64_t cv_seed = 7;
  double cv_r0 = 2.0;
  bool cv_verbose = false;
  cv_surf.add(cv);
  cv->add_option("--kernel", cv_kernel, "sl, dl or dlc");
  cv->add_option("--method", cv_methods, "comma separated methods");
  cv->add_option("--h", cv_h, "strictly decreasing h list");
  cv->add_option("--eps-law", cv_eps, "const:e0, pow:coeff,gamma or lin:c");
  cv->add_option("--targets", cv_targets, "number of random targets");
  cv->add_option("--seed", cv_seed, "RNG seed");
  cv->add_option("--weights", cv_weights, "weight table file");
  cv->add_option("--r0-coeff", cv_r0, "regularization radius coefficient");
  cv->add_option("--jacobian", cv_jac, "default, analytic or fd");
  cv->add_option("--out", cv_out, "per-record CSV");
  cv->add_option("--summary", cv_summary, "per-h mean error CSV");
  cv->add_flag("--verbose", cv_verbose, "progress on stderr");

  // diagnose-planes
  auto* dp = app.add_subcommand("diagnose-planes", "per-plane error diagnostics");
  SurfaceOpts dp_surf;
  dp_surf.surface = "torus";
  TargetOpts dp_target;
  std::string dp_kernel = "dl", dp_weights, dp_out;
  double dp_h = 0.0046, dp_eps = 0.1, dp_tol = 1e-11;
  dp_surf.add(dp);
  dp_target.add(dp);
  dp->add_option("--kernel", dp_kernel, "sl, dl or dlc");
  dp->add_option("--h", dp_h, "grid spacing");
  dp->add_option("--eps", dp_eps, "tube half width");
  dp->add_option("--weights", dp_weights, "weight table file")->required();
  dp->add_option("--ref-tol", dp_tol, "reference quadrature tolerance");
  dp->add_option("--out", dp_out, "per-plane CSV");

  // sample-surface
  auto* ss = app.add_subcommand("sample-surface", "write a sampled distance field");
  SurfaceOpts ss_surf;
  double ss_spacing = 0.01, ss_margin = 0.15;
  std::string ss_out;
  ss_surf.add(ss);
  ss->add_option("--spacing", ss_spacing, "sample spacing");
  ss->add_option("--margin", ss_margin, "margin around the bounding box");
  ss->add_option("--out", ss_out, "output file")->required();

  // dump-tube
  auto* dt = app.add_subcommand("dump-tube", "write the tube nodes as CSV");
  SurfaceOpts dt_surf;
  double dt_h = 0.04, dt_eps = 0.1;
  std::string dt_out, dt_jac = "default";
  dt_surf.add(dt);
  dt->add_option("--h", dt_h, "grid spacing");
  dt->add_option("--eps", dt_eps, "tube half width");
  dt->add_option("--jacobian", dt_jac, "default, analytic or fd");
  dt->add_option("--out", dt_out, "output CSV")->required();

  // weight-study
  auto* ws = app.add_subcommand("weight-study", "mean error for reduced weight tables");
  SurfaceOpts ws_surf;
  ws_surf.surface = "torus";
  double ws_h = 0.02, ws_eps = 0.1;
  int ws_targets = 20;
  std::uint64_t ws_seed = 7;
  std::string ws_weights;
  ws_surf.add(ws);
  ws->add_option("--h", ws_h, "grid spacing");
  ws->add_option("--eps", ws_eps, "tube half width");
  ws->add_option("--targets", ws_targets, "number of random targets");
  ws->add_option("--seed", ws_seed, "RNG seed");
  ws->add_option("--weights", ws_weights, "full weight table")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (tab->parsed()) {
      auto t0 = std::chrono::steady_clock::now();
      WeightTable t = tabulate(tab_n, tab_nab, tab_tol);
      t.write(tab_out);
      std::fprintf(stderr, "tabulated N=%d Nab=%d in %.1fs\n", tab_n, tab_nab,
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    } else if (ev->parsed()) {
      ImplicitSurface s = ev_surf.make();
      TargetPoint t = ev_target.make(s);
      KernelKind kind = parse_kernel(ev_kernel);
      Method m = parse_method(ev_method);
      std::unique_ptr<WeightTable> table;
      if (m == Method::Corrected) {
        if (ev_weights.empty()) throw ParameterError("corrected method needs --weights");
        table = std::make_unique<WeightTable>(WeightTable::read(ev_weights));
      }
      TubeGrid tube = build_tube_grid(s, ev_h, ev_eps, parse_jacobian(ev_jac));
      double q = evaluate_method(m, kind, tube, s, t.x, parse_density(ev_density), table.get(), ev_r0, ev_axis);
      std::printf("target %.17g %.17g %.17g\nvalue %.17g\n", t.x[0], t.x[1], t.x[2], q);
      if (auto ex = exact_constant_density(s, kind); ex && ev_density == "const:1")
        std::printf("error %.6e\n", std::abs(q - *ex));
    } else if (cv->parsed()) {
      QuadratureConfig cfg;
      cfg.surface = cv_surf.surface;
      cfg.field_reach = cv_surf.reach;
      cfg.kernel = parse_kernel(cv_kernel);
      cfg.methods.clear();
      for (std::size_t start = 0;;) {
        auto comma = cv_methods.find(',', start);
        cfg.methods.push_back(parse_method(cv_methods.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      cfg.hs = parse_list(cv_h);
      cfg.eps = EpsLaw::parse(cv_eps);
      cfg.targets = cv_targets;
      cfg.seed = cv_seed;
      cfg.weights_path = cv_weights;
      cfg.r0_coeff = cv_r0;
      cfg.jacobian = parse_jacobian(cv_jac);
      cfg.verbose = cv_verbose;
      ConvergenceResult res = convergence_run(cfg);
      if (!cv_out.empty()) emit_csv(res.records, cv_out);
      if (!cv_summary.empty()) write_csv(summary_table(res.summaries), cv_summary);
      print_table(summary_table(res.summaries));
    } else if (dp->parsed()) {
      ImplicitSurface s = dp_surf.make();
      TargetPoint t = dp_target.make(s);
      WeightTable table = WeightTable::read(dp_weights);
      TubeGrid tube = build_tube_grid(s, dp_h, dp_eps);
      TargetContext ctx = build_target_context(s, t.x);
      ReferenceOptions opt;
      opt.tol = dp_tol;
      PlaneDiagnostics d = plane_diagnostics(parse_kernel(dp_kernel), ctx, tube, table,
                                             [](const Vec3&) { return 1.0; }, opt);
      if (!dp_out.empty()) write_csv(planes_table(d), dp_out);
      std::printf("h %.17g\nmean_E_over_h2 %.6e\nmax_abs_E_over_h2 %.6e\nvariance %.6e\nD %.6e\n", d.h,
                  d.mean_scaled, d.max_abs_scaled, d.variance_scaled, d.D);
    } else if (ss->parsed()) {
      sample_surface(ss_surf.make(), ss_spacing, ss_margin).write(ss_out);
    } else if (dt->parsed()) {
      ImplicitSurface s = dt_surf.make();
      TubeGrid tube = build_tube_grid(s, dt_h, dt_eps, parse_jacobian(dt_jac));
      tube.write_csv(dt_out);
      std::printf("nodes %zu\nsurface_measure %.17g\n", tube.nodes.size(), tube.surface_measure());
    } else if (ws->parsed()) {
      ImplicitSurface s = ws_surf.make();
      QuadratureConfig cfg;
      cfg.surface = ws_surf.surface;
      cfg.hs = {ws_h};
      cfg.eps = EpsLaw{EpsLaw::Kind::Const, ws_eps, 1};
      cfg.targets = ws_targets;
      cfg.seed = ws_seed;
      WeightTable full = WeightTable::read(ws_weights);
      std::printf("N,Nab,mean_error\n");
      for (const auto& r : weight_resolution_study(cfg, s, full))
        std::printf("%d,%d,%.17g\n", r.N, r.Nab, r.mean_error);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

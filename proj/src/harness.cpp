#include "ibiq/harness.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "ibiq/errors.hpp"
#include "ibiq/parallel.hpp"
#include "ibiq/regularization.hpp"

namespace ibiq {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw ParameterError("not a number: " + s);
  return v;
}

// Uniform in [0, 1) from the top 53 bits, independent of the standard library.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::array<double, 2> box_muller(std::mt19937_64& rng) {
  double u1 = 1.0 - uniform01(rng);  // (0, 1]
  double u2 = uniform01(rng);
  double rad = std::sqrt(-2.0 * std::log(u1));
  return {rad * std::cos(2 * kPi * u2), rad * std::sin(2 * kPi * u2)};
}

double mean_of(const std::vector<double>& v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return v.empty() ? 0.0 : s.value() / static_cast<double>(v.size());
}

RegularizationKind const_reg_for(KernelKind kind) {
  switch (kind) {
    case KernelKind::DL:
      return RegularizationKind::ConstDL;
    case KernelKind::DLC:
      return RegularizationKind::ConstDLC;
    case KernelKind::HelmSecondary:
      return RegularizationKind::ConstHelmSecondary;
    default:
      throw ParameterError("no constant regularization for kernel " + kernel_name(kind));
  }
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "punctured") return Method::Punctured;
  if (s == "const" || s == "const-reg") return Method::ConstReg;
  if (s == "cappuccio") return Method::Cappuccio;
  if (s == "corrected") return Method::Corrected;
  throw ParameterError("unknown method: " + s);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Punctured:
      return "punctured";
    case Method::ConstReg:
      return "const-reg";
    case Method::Cappuccio:
      return "cappuccio";
    case Method::Corrected:
      return "corrected";
  }
  return "?";
}

double EpsLaw::operator()(double h) const {
  switch (kind) {
    case Kind::Const:
      return a;
    case Kind::Power:
      return a * std::pow(h, b);
    case Kind::Linear:
      return a * h;
  }
  return a;
}

std::string EpsLaw::str() const {
  switch (kind) {
    case Kind::Const:
      return "const:" + format_double(a);
    case Kind::Power:
      return "pow:" + format_double(a) + "," + format_double(b);
    case Kind::Linear:
      return "lin:" + format_double(a);
  }
  return "";
}

EpsLaw EpsLaw::parse(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ParameterError("eps law needs a kind prefix: " + s);
  std::string kind = s.substr(0, colon);
  auto args = split(s.substr(colon + 1), ',');
  EpsLaw law;
  try {
    if (kind == "const" && args.size() == 1) {
      law.kind = Kind::Const;
      law.a = to_double(args[0]);
    } else if (kind == "pow" && args.size() == 2) {
      law.kind = Kind::Power;
      law.a = to_double(args[0]);
      law.b = to_double(args[1]);
    } else if (kind == "lin" && args.size() == 1) {
      law.kind = Kind::Linear;
      law.a = to_double(args[0]);
    } else {
      throw ParameterError("bad eps law: " + s);
    }
  } catch (const std::invalid_argument&) {
    throw ParameterError("bad eps law: " + s);
  }
  if (!(law.a > 0)) throw ParameterError("eps law coefficient must be positive");
  return law;
}

Vec3 fixture_center() { return Vec3(0.05475547095598521, 0.06864792402110276, 0.03502726366462485); }

ImplicitSurface sphere_fixture() { return ImplicitSurface::sphere(fixture_center(), 0.7); }

Mat3 torus_fixture_rotation() {
  return rotation_z(2.219760487439292) * rotation_y(0.7454097947651017) * rotation_x(0.2440241225550843);
}

ImplicitSurface torus_fixture() { return ImplicitSurface::torus(fixture_center(), 0.7, 0.2, torus_fixture_rotation()); }

ImplicitSurface make_surface(const std::string& spec, double field_reach) {
  if (spec == "sphere") return sphere_fixture();
  if (spec == "torus") return torus_fixture();
  if (spec.rfind("field:", 0) == 0) {
    auto field = std::make_shared<SampledField>(SampledField::read(spec.substr(6)));
    return ImplicitSurface::sampled(field, field_reach);
  }
  throw ParameterError("unknown surface: " + spec);
}

const std::vector<std::array<double, 2>>& highlighted_torus_targets() {
  static const std::vector<std::array<double, 2>> t{{0.674795533436653, 1.5287503395568336},
                                                    {5.5902567180364535, 3.0915183172680867},
                                                    {3.0463292511788698, 5.738447188350594}};
  return t;
}

std::string TargetPoint::params_str() const {
  std::string out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ' ';
    out += format_double(params[i]);
  }
  return out;
}

TargetPoint torus_target(const ImplicitSurface& s, double theta, double phi, int id) {
  if (s.kind() != ImplicitSurface::Kind::Torus) throw ParameterError("surface is not a torus");
  TargetPoint t;
  t.id = id;
  t.x = s.torus_point(theta, phi);
  t.params = {theta, phi};
  return t;
}

std::vector<TargetPoint> gen_targets(const ImplicitSurface& s, int count, std::uint64_t seed) {
  if (count < 0) throw ParameterError("target count must be non-negative");
  std::mt19937_64 rng(seed);
  std::vector<TargetPoint> out;
  for (int i = 0; i < count; ++i) {
    if (s.kind() == ImplicitSurface::Kind::Torus) {
      double theta = 2 * kPi * uniform01(rng);
      double phi = 2 * kPi * uniform01(rng);
      out.push_back(torus_target(s, theta, phi, i));
    } else if (s.kind() == ImplicitSurface::Kind::Sphere) {
      Vec3 g;
      double nrm = 0;
      while (nrm < 1e-8) {
        auto g01 = box_muller(rng);
        auto g23 = box_muller(rng);
        g = Vec3(g01[0], g01[1], g23[0]);
        nrm = g.norm();
      }
      Vec3 u = g / nrm;
      TargetPoint t;
      t.id = i;
      t.x = s.center() + s.radius() * u;
      t.params = {u[0], u[1], u[2]};
      out.push_back(t);
    } else {
      throw ParameterError("random targets need an analytic surface; pass explicit targets");
    }
  }
  return out;
}

void QuadratureConfig::validate(const ImplicitSurface& s) const {
  if (hs.empty()) throw ParameterError("empty h list");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0)) throw ParameterError("h must be positive");
    if (i && !(hs[i] < hs[i - 1])) throw ParameterError("h list must be strictly decreasing");
    double e = eps(hs[i]);
    if (!(e < s.reach())) throw ValidityError("eps(h) = " + format_double(e) + " is not below the reach");
  }
  if (methods.empty()) throw ParameterError("no methods selected");
  if (!(r0_coeff > 0)) throw ParameterError("r0 coefficient must be positive");
}

const MethodSummary& ConvergenceResult::summary(Method m) const {
  for (const auto& s : summaries)
    if (s.method == method_name(m)) return s;
  throw ParameterError("no summary for method " + method_name(m));
}

std::optional<double> exact_constant_density(const ImplicitSurface& s, KernelKind kind) {
  if (kind == KernelKind::DL) return -0.5;
  if (s.kind() == ImplicitSurface::Kind::Sphere) {
    if (kind == KernelKind::SL) return s.radius();
    if (kind == KernelKind::DLC) return -0.5;
  }
  return std::nullopt;
}

double fitted_order(const std::vector<double>& hs, const std::vector<double>& errors) {
  if (hs.size() != errors.size()) throw ParameterError("size mismatch in order fit");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < hs.size(); ++i)
    if (errors[i] > 0 && std::isfinite(errors[i])) {
      x.push_back(std::log(hs[i]));
      y.push_back(std::log(errors[i]));
    }
  if (x.size() < 2) return std::nan("");
  double mx = mean_of(x), my = mean_of(y);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double evaluate_method(Method m, KernelKind kind, const TubeGrid& tube, const ImplicitSurface& s,
                       const Vec3& target, const Density& density, const WeightTable* table, double r0_coeff,
                       int axis) {
  switch (m) {
    case Method::Punctured:
      return punctured_quad(tube, kind, build_target_context(s, target, axis), density);
    case Method::Corrected:
      if (!table) throw ParameterError("corrected method needs a weight table");
      return corrected_quad(tube, kind, build_target_context(s, target, axis), density, *table);
    case Method::ConstReg:
      return quad_regularized(tube, s, const_reg_for(kind), target, default_r0(tube.h, tube.eps, r0_coeff),
                              density);
    case Method::Cappuccio:
      if (kind != KernelKind::DL) throw ParameterError("cappuccio regularization is for the double layer");
      return quad_regularized(tube, s, RegularizationKind::Cappuccio, target,
                              default_r0(tube.h, tube.eps, r0_coeff), density);
  }
  return 0;
}

ConvergenceResult convergence_run(const QuadratureConfig& cfg, const ImplicitSurface& s, const WeightTable* table) {
  cfg.validate(s);
  auto exact = exact_constant_density(s, cfg.kernel);
  if (!exact) throw ParameterError("no exact value for kernel " + kernel_name(cfg.kernel) + " on this surface");
  std::vector<TargetPoint> targets =
      cfg.explicit_targets.empty() ? gen_targets(s, cfg.targets, cfg.seed) : cfg.explicit_targets;
  Density one = [](const Vec3&) { return 1.0; };

  ConvergenceResult res;
  for (double h : cfg.hs) {
    double eps = cfg.eps(h);
    TubeGrid tube = build_tube_grid(s, h, eps, cfg.jacobian, cfg.lattice_origin);
    for (const auto& t : targets)
      for (Method m : cfg.methods) {
        ConvergenceRecord r;
        r.h = h;
        r.eps = eps;
        r.target_id = t.id;
        r.target_params = t.params_str();
        r.method = method_name(m);
        auto t0 = std::chrono::steady_clock::now();
        try {
          r.value = evaluate_method(m, cfg.kernel, tube, s, t.x, one, table, cfg.r0_coeff);
          r.error = std::abs(r.value - *exact);
        } catch (const std::exception& e) {
          r.value = std::nan("");
          r.error = std::nan("");
          r.status = e.what();
        }
        r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (cfg.verbose)
          std::fprintf(stderr, "h=%g target=%d %s E=%.3e (%.2fs)\n", h, t.id, r.method.c_str(), r.error,
                       r.wall_time);
        res.records.push_back(r);
      }
  }

  for (Method m : cfg.methods) {
    MethodSummary sum;
    sum.method = method_name(m);
    int failures = 0;
    for (double h : cfg.hs) {
      std::vector<double> errs;
      for (const auto& r : res.records)
        if (r.h == h && r.method == sum.method) {
          if (r.status == "ok")
            errs.push_back(r.error);
          else
            ++failures;
        }
      sum.hs.push_back(h);
      sum.mean_error.push_back(errs.empty() ? std::nan("") : mean_of(errs));
    }
    if (failures)
      std::cerr << "warning: " << failures << " failed evaluation(s) for " << sum.method
                << " excluded from the fit\n";
    sum.fitted_order = fitted_order(sum.hs, sum.mean_error);
    res.summaries.push_back(sum);
  }
  return res;
}

ConvergenceResult convergence_run(const QuadratureConfig& cfg) {
  ImplicitSurface s = make_surface(cfg.surface, cfg.field_reach);
  std::unique_ptr<WeightTable> table;
  for (Method m : cfg.methods)
    if (m == Method::Corrected) {
      if (cfg.weights_path.empty()) throw ParameterError("corrected method needs --weights");
      table = std::make_unique<WeightTable>(WeightTable::read(cfg.weights_path));
      break;
    }
  return convergence_run(cfg, s, table.get());
}

std::vector<WeightStudyRow> weight_resolution_study(const QuadratureConfig& cfg, const ImplicitSurface& s,
                                                    const WeightTable& full) {
  if (full.Nab % 2 == 0) throw ParameterError("weight study needs an odd shift resolution");
  std::vector<WeightTable> tables{full, full.subset(full.N, 2), full.subset(full.N / 2, 1)};
  QuadratureConfig c = cfg;
  c.methods = {Method::Corrected};
  c.hs = {cfg.hs.front()};
  c.validate(s);
  auto exact = exact_constant_density(s, c.kernel);
  if (!exact) throw ParameterError("no exact value for this kernel and surface");
  std::vector<TargetPoint> targets =
      c.explicit_targets.empty() ? gen_targets(s, c.targets, c.seed) : c.explicit_targets;
  double h = c.hs.front();
  TubeGrid tube = build_tube_grid(s, h, c.eps(h), c.jacobian, c.lattice_origin);
  Density one = [](const Vec3&) { return 1.0; };
  std::vector<WeightStudyRow> rows;
  for (const auto& tab : tables) {
    std::vector<double> errs;
    for (const auto& t : targets) {
      double q = corrected_quad(tube, c.kernel, build_target_context(s, t.x), one, tab);
      errs.push_back(std::abs(q - *exact));
    }
    rows.push_back({tab.N, tab.Nab, mean_of(errs)});
  }
  return rows;
}

double plane_reference(KernelKind kind, const TargetContext& ctx, double z, double eps, const Density& density,
                       const ReferenceOptions& opt, bool* converged) {
  const ImplicitSurface& s = *ctx.surface;
  Vec3 y0 = ctx.target_p + (z - ctx.target_p[2]) * ctx.n_scaled;
  auto [lo, hi] = s.bounding_box();
  double rmax = 0;
  for (int c = 0; c < 8; ++c) {
    Vec3 corner((c & 1) ? hi[0] + eps : lo[0] - eps, (c & 2) ? hi[1] + eps : lo[1] - eps,
                (c & 4) ? hi[2] + eps : lo[2] - eps);
    Vec3 cp = ctx.to_permuted(corner);
    rmax = std::max(rmax, std::hypot(cp[0] - y0[0], cp[1] - y0[1]));
  }
  const bool target_normal = uses_target_normal(kind);
  auto point = [&](double r, double psi) {
    return ctx.from_permuted(Vec3(y0[0] + r * std::cos(psi), y0[1] + r * std::sin(psi), z));
  };
  auto integrand = [&](double r, double psi) {
    Vec3 y = point(r, psi);
    double d = s.distance(y);
    if (std::abs(d) >= eps) return 0.0;
    Vec3 p = s.closest_point(y);
    Vec3 rr = ctx.target - p;
    double k = kernel_from_difference(kind, rr, target_normal ? ctx.frame.n : s.normal(p));
    return r * k * density(p) * s.level_set_jacobian(y) * delta_eps(d, eps);
  };
  // Support of the tube weight along a ray is found by sampling the
  // distance and refining sign changes of eps - |d|. The piece touching the
  // singular point uses fixed Gauss panels: the kernel numerator cancels
  // catastrophically for r below ~1e-6, so nodes must stay away from r = 0.
  const double sample = eps / 8;
  const int nsamp = static_cast<int>(std::ceil(rmax / sample));
  const double near = eps / 4;
  bool ok = true;
  auto radial = [&](double psi) {
    auto inside = [&](double r) { return eps - std::abs(s.distance(point(r, psi))); };
    auto f = [&](double r) { return integrand(r, psi); };
    std::vector<double> cuts;
    double prev_r = 0, prev_g = inside(0.0);
    bool in = prev_g > 0;
    if (in) cuts.push_back(0.0);
    for (int i = 1; i <= nsamp; ++i) {
      double r = std::min(rmax, i * sample);
      double g = inside(r);
      if ((g > 0) != in) {
        std::uintmax_t iters = 60;
        auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
        auto br = boost::math::tools::toms748_solve(inside, prev_r, r, prev_g, g, tol, iters);
        cuts.push_back(0.5 * (br.first + br.second));
        in = !in;
      }
      prev_r = r;
      prev_g = g;
    }
    if (in) cuts.push_back(rmax);
    CompensatedSum acc;
    boost::math::quadrature::tanh_sinh<double> ts;
    for (std::size_t c = 0; c + 1 < cuts.size(); c += 2) {
      double a = cuts[c], b = cuts[c + 1];
      if (a == 0.0) {
        double m = std::min(b, near);
        for (int q = 0; q < 4; ++q)
          acc.add(boost::math::quadrature::gauss<double, 30>::integrate(f, q * m / 4, (q + 1) * m / 4));
        a = m;
        if (a >= b) continue;
      }
      double err = 0, l1 = 0;
      double v = ts.integrate(f, a, b, 1e-13, &err, &l1);
      if (err > 1e-11 * std::max(1.0, l1)) ok = false;
      acc.add(v);
    }
    return acc.value();
  };

  int M = opt.min_angles;
  std::vector<double> vals(M);
  for (int i = 0; i < M; ++i) vals[i] = radial(2 * kPi * i / M);
  auto trap = [&]() {
    CompensatedSum t;
    for (double v : vals) t.add(v);
    return 2 * kPi * t.value() / static_cast<double>(vals.size());
  };
  double prev = trap();
  bool conv = false;
  while (2 * M <= opt.max_angles) {
    std::vector<double> odd(M);
    parallel_for(M, [&](std::size_t i) { odd[i] = radial(2 * kPi * (2 * i + 1) / (2 * M)); });
    std::vector<double> merged(2 * M);
    for (int i = 0; i < M; ++i) {
      merged[2 * i] = vals[i];
      merged[2 * i + 1] = odd[i];
    }
    vals.swap(merged);
    M *= 2;
    double cur = trap();
    bool done = std::abs(cur - prev) <= opt.tol * std::max(1.0, std::abs(cur));
    prev = cur;
    if (done) {
      conv = true;
      break;
    }
  }
  if (converged) *converged = conv && ok;
  return prev;
}

PlaneDiagnostics plane_diagnostics(KernelKind kind, const TargetContext& ctx, const TubeGrid& tube,
                                   const WeightTable& table, const Density& density, const ReferenceOptions& opt) {
  if (!ctx.surface) throw ParameterError("target context has no surface");
  PlaneDiagnostics out;
  out.h = tube.h;
  out.eps = tube.eps;
  const double h = tube.h;
  const Vec3 origin_p = ctx.to_permuted(tube.origin);
  const bool target_normal = uses_target_normal(kind);
  // In-plane position of the singular point on the plane z = 0.
  const double x00 = ctx.target_p[0] - ctx.target_p[2] * ctx.n_scaled[0];
  const double y00 = ctx.target_p[1] - ctx.target_p[2] * ctx.n_scaled[1];
  auto frac = [](double x) { return x - std::floor(x + 0.5); };

  for (int k : correction_planes(ctx, tube)) {
    PlaneCorrection pc = correction_plane(kind, ctx, tube, table, k, density);
    PlaneRecord rec;
    rec.k = k;
    rec.z = pc.z;
    rec.alpha = pc.shift.alpha;
    rec.beta = pc.shift.beta;
    rec.alpha_formula = frac((pc.z * ctx.n_scaled[0] + x00 - origin_p[0]) / h);
    rec.beta_formula = frac((pc.z * ctx.n_scaled[1] + y00 - origin_p[1]) / h);
    rec.eta = pc.eta;
    rec.corrected = pc.in_tube;
    if (!pc.in_tube) {
      out.planes.push_back(rec);
      continue;
    }
    CompensatedSum plane_sum;
    if (k >= tube.k_first && k <= tube.k_last() && ctx.axis == 2) {
      for (std::size_t i = tube.plane_offsets[k - tube.k_first]; i < tube.plane_offsets[k - tube.k_first + 1]; ++i) {
        const TubeNode& nd = tube.nodes[i];
        if (nd.index == pc.node_index || nd.deltaw == 0) continue;
        Vec3 r = ctx.target - nd.proj;
        plane_sum.add(kernel_from_difference(kind, r, target_normal ? ctx.frame.n : nd.normal) * density(nd.proj) *
                      nd.deltaw);
      }
    } else {
      for (const TubeNode& nd : tube.nodes) {
        if (nd.index[ctx.axis] != k || nd.index == pc.node_index || nd.deltaw == 0) continue;
        Vec3 r = ctx.target - nd.proj;
        plane_sum.add(kernel_from_difference(kind, r, target_normal ? ctx.frame.n : nd.normal) * density(nd.proj) *
                      nd.deltaw);
      }
    }
    rec.quad = h * h * plane_sum.value() + h * pc.V * pc.R;
    bool conv = true;
    rec.reference = plane_reference(kind, ctx, pc.z, tube.eps, density, opt, &conv);
    rec.flagged = !conv;
    rec.error = rec.quad - rec.reference;
    rec.scaled = rec.error / (h * h);
    out.planes.push_back(rec);
  }

  std::vector<double> sc;
  for (const auto& p : out.planes)
    if (p.corrected && !p.flagged) sc.push_back(p.scaled);
  if (!sc.empty()) {
    out.mean_scaled = mean_of(sc);
    double var = 0;
    for (double v : sc) {
      var += (v - out.mean_scaled) * (v - out.mean_scaled);
      out.max_abs_scaled = std::max(out.max_abs_scaled, std::abs(v));
    }
    out.variance_scaled = var / static_cast<double>(sc.size());
    CompensatedSum d;
    for (double v : sc) d.add(h * v);
    out.D = d.value();
  }
  return out;
}

CsvTable records_table(const std::vector<ConvergenceRecord>& records) {
  CsvTable t;
  t.header = {"h", "eps", "target_id", "target_params", "method", "value", "error", "wall_time", "status"};
  for (const auto& r : records)
    t.rows.push_back({format_double(r.h), format_double(r.eps), std::to_string(r.target_id), r.target_params,
                      r.method, format_double(r.value), format_double(r.error), format_double(r.wall_time),
                      r.status});
  return t;
}

std::vector<ConvergenceRecord> records_from_table(const CsvTable& t) {
  std::vector<ConvergenceRecord> out;
  for (const auto& row : t.rows) {
    if (row.size() != 9) throw ParameterError("convergence CSV row has wrong width");
    ConvergenceRecord r;
    r.h = std::stod(row[0]);
    r.eps = std::stod(row[1]);
    r.target_id = std::stoi(row[2]);
    r.target_params = row[3];
    r.method = row[4];
    r.value = std::stod(row[5]);
    r.error = std::stod(row[6]);
    r.wall_time = std::stod(row[7]);
    r.status = row[8];
    out.push_back(r);
  }
  return out;
}

void emit_csv(const std::vector<ConvergenceRecord>& records, const std::string& path) {
  write_csv(records_table(records), path);
}

CsvTable summary_table(const std::vector<MethodSummary>& summaries) {
  CsvTable t;
  t.header = {"method", "h", "mean_error", "fitted_order"};
  for (const auto& s : summaries)
    for (std::size_t i = 0; i < s.hs.size(); ++i)
      t.rows.push_back({s.method, format_double(s.hs[i]), format_double(s.mean_error[i]),
                        format_double(s.fitted_order)});
  return t;
}

CsvTable planes_table(const PlaneDiagnostics& diag) {
  CsvTable t;
  t.header = {"k", "z", "alpha", "beta", "alpha_formula", "beta_formula", "eta", "corrected",
              "quad", "reference", "error", "error_over_h2", "flagged"};
  for (const auto& p : diag.planes)
    t.rows.push_back({std::to_string(p.k), format_double(p.z), format_double(p.alpha), format_double(p.beta),
                      format_double(p.alpha_formula), format_double(p.beta_formula), format_double(p.eta),
                      p.corrected ? "1" : "0", format_double(p.quad), format_double(p.reference),
                      format_double(p.error), format_double(p.scaled), p.flagged ? "1" : "0"});
  return t;
}

}  // namespace ibiq

#include "ibiq/corrquad.hpp"

#include <algorithm>
#include <cmath>

#include "ibiq/errors.hpp"
#include "ibiq/parallel.hpp"

namespace ibiq {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Per-target samples of the angular factors at the Fourier nodes.
struct AngularSamples {
  std::vector<double> psi;
  std::vector<std::array<double, 2>> p;
  std::vector<double> s_n;
  FourierCoeffs s_coeffs;  // Fourier coefficients of S_n alone
};

AngularSamples angular_samples(const TargetContext& ctx, int N) {
  AngularSamples a;
  a.psi = fourier_nodes(N);
  for (double psi : a.psi) {
    a.p.push_back(p_transform(ctx, psi));
    a.s_n.push_back(in_plane_S(ctx, psi));
  }
  a.s_coeffs = fourier_coeffs(a.s_n);
  return a;
}

struct PlaneExclusion {
  int k_first = 0;
  std::vector<std::array<long, 2>> node;  // permuted in-plane index per plane
  std::vector<char> active;
};

PlaneCorrection plane_correction(KernelKind kind, const TargetContext& ctx, const TubeGrid& tube,
                                 const WeightTable& table, int k, const Density& density,
                                 const AngularSamples& ang) {
  PlaneCorrection pc;
  pc.k = k;
  double h = tube.h;
  Vec3 origin_p = ctx.to_permuted(tube.origin);
  pc.z = origin_p[2] + k * h;
  PlaneSingularity ps = plane_singularity(ctx, pc.z, h, tube.origin);
  pc.y0 = ps.y0;
  pc.y_delta = ps.y_delta;
  pc.shift = ps.shift;
  std::array<long, 3> pidx{ps.node[0], ps.node[1], k};
  for (int i = 0; i < 3; ++i) pc.node_index[ctx.perm[i]] = static_cast<int>(pidx[i]);
  pc.eta = ctx.surface->distance(ctx.from_permuted(pc.y0));
  // Past this offset y_delta cannot be a tube node.
  if (std::abs(pc.eta) > tube.eps + h * ctx.n_scaled.norm()) return pc;

  const TubeNode* nd = tube.find(pc.node_index);
  if (!nd || nd->deltaw == 0) return pc;
  pc.in_tube = true;
  pc.V = density(nd->proj) * nd->deltaw;

  // Paraboloid picture: offset along n is -d.
  double eta_p = -pc.eta;
  int M = static_cast<int>(ang.psi.size());
  std::vector<double> samples(M);
  for (int i = 0; i < M; ++i)
    samples[i] = ang.s_n[i] * ell_closed_form(kind, ctx.k1, ctx.k2, ang.p[i][0], ang.p[i][1], eta_p);
  pc.omega_s = compose_weight(table, fourier_coeffs(samples), pc.shift);

  if (pc.shift.alpha == 0 && pc.shift.beta == 0) {
    pc.R = pc.omega_s;
    return pc;
  }
  pc.omega_S = compose_weight(table, ang.s_coeffs, pc.shift);
  Vec3 offset = pc.y_delta - pc.y0;
  Vec3 r = ctx.target - nd->proj;
  Vec3 normal = uses_target_normal(kind) ? ctx.frame.n : nd->normal;
  double kbar = kernel_from_difference(kind, r, normal);
  double psi = std::atan2(offset[1], offset[0]);
  pc.hatv_term = kbar / S_factor(offset, ctx.n_scaled) - ell(kind, ctx, psi, eta_p);
  pc.R = pc.omega_s + pc.omega_S * pc.hatv_term;
  return pc;
}

PlaneExclusion exclusion_set(const TargetContext& ctx, const TubeGrid& tube, const std::vector<int>& planes) {
  PlaneExclusion ex;
  if (planes.empty()) return ex;
  ex.k_first = planes.front();
  std::size_t span = static_cast<std::size_t>(planes.back() - planes.front() + 1);
  ex.node.assign(span, {0, 0});
  ex.active.assign(span, 0);
  Vec3 origin_p = ctx.to_permuted(tube.origin);
  for (int k : planes) {
    PlaneSingularity ps = plane_singularity(ctx, origin_p[2] + k * tube.h, tube.h, tube.origin);
    ex.node[k - ex.k_first] = ps.node;
    ex.active[k - ex.k_first] = 1;
  }
  return ex;
}

double bulk_sum(const TubeGrid& tube, KernelKind kind, const TargetContext& ctx, const Density& density,
                const PlaneExclusion& ex) {
  const bool target_normal = uses_target_normal(kind);
  const int ax = ctx.axis, pu = ctx.perm[0], pv = ctx.perm[1];
  const long span = static_cast<long>(ex.active.size());
  double sum = deterministic_sum(tube.nodes.size(), [&](std::size_t i) {
    const TubeNode& nd = tube.nodes[i];
    if (nd.deltaw == 0) return 0.0;
    long slot = static_cast<long>(nd.index[ax]) - ex.k_first;
    if (slot >= 0 && slot < span && ex.active[slot] && nd.index[pu] == ex.node[slot][0] &&
        nd.index[pv] == ex.node[slot][1])
      return 0.0;
    Vec3 r = ctx.target - nd.proj;
    if (r.squaredNorm() == 0) throw SingularityError("tube node projects onto the target but is not excluded");
    return kernel_from_difference(kind, r, target_normal ? ctx.frame.n : nd.normal) * density(nd.proj) *
           nd.deltaw;
  });
  return sum * tube.h * tube.h * tube.h;
}

}  // namespace

TargetContext make_target_context(const Vec3& target, const LocalFrame& frame, int axis) {
  TargetContext ctx;
  ctx.target = target;
  ctx.frame = frame;
  if (axis < 0) {
    axis = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(frame.n[i]) > std::abs(frame.n[axis])) axis = i;
  }
  if (axis > 2) throw ParameterError("splitting axis must be 0, 1 or 2");
  if (std::abs(frame.n[axis]) < 1e-12) throw ParameterError("normal is parallel to the splitting planes");
  ctx.axis = axis;
  ctx.perm = axis == 2 ? std::array<int, 3>{0, 1, 2}
                       : axis == 0 ? std::array<int, 3>{1, 2, 0} : std::array<int, 3>{2, 0, 1};
  ctx.target_p = ctx.to_permuted(target);
  ctx.n_p = ctx.to_permuted(frame.n);
  ctx.tau1_p = ctx.to_permuted(frame.tau1);
  ctx.tau2_p = ctx.to_permuted(frame.tau2);
  ctx.n_scaled = ctx.n_p / ctx.n_p[2];
  ctx.k1 = -frame.kappa1;
  ctx.k2 = -frame.kappa2;
  ctx.a = ctx.tau1_p[2];
  ctx.b = ctx.tau2_p[2];
  ctx.c = ctx.n_p[2];
  ctx.theta = std::acos(std::clamp(ctx.c, -1.0, 1.0));
  ctx.xi = std::atan2(ctx.b, ctx.a);
  ctx.theta0 = std::atan2(ctx.tau2_p[0], ctx.tau1_p[0]);
  return ctx;
}

TargetContext build_target_context(const ImplicitSurface& s, const Vec3& target, int axis) {
  if (std::abs(s.distance(target)) > 1e-10) throw ParameterError("target is not on the surface");
  TargetContext ctx = make_target_context(target, hessian_frame(s, target), axis);
  ctx.surface = &s;
  return ctx;
}

PlaneSingularity plane_singularity(const TargetContext& ctx, double z, double h, const Vec3& lattice_origin) {
  PlaneSingularity ps;
  Vec3 o = ctx.to_permuted(lattice_origin);
  ps.y0 = ctx.target_p + (z - ctx.target_p[2]) * ctx.n_scaled;
  double u = (ps.y0[0] - o[0]) / h, v = (ps.y0[1] - o[1]) / h;
  double mu = std::floor(u + 0.5), mv = std::floor(v + 0.5);
  ps.shift = {u - mu, v - mv};
  ps.node = {static_cast<long>(mu), static_cast<long>(mv)};
  ps.y_delta = Vec3(o[0] + mu * h, o[1] + mv * h, z);
  return ps;
}

std::array<double, 2> p_transform(const TargetContext& ctx, double psi) {
  double q1 = std::cos(psi), q2 = std::sin(psi);
  double a = ctx.a, b = ctx.b, c = ctx.c;
  if (c == 0) throw ParameterError("normal lies in the splitting planes");
  double ct = std::cos(ctx.theta0), st = std::sin(ctx.theta0);
  double lean = (a * ct + b * st) / c;
  double den = std::sqrt(1 + lean * lean);
  double p1 = (q1 * ct - q2 / c * (a * b * ct + (b * b + c * c) * st)) / den;
  double p2 = (q1 * st + q2 / c * (a * b * st + (a * a + c * c) * ct)) / den;
  double len = std::hypot(p1, p2);
  return {p1 / len, p2 / len};
}

double ell_closed_form(KernelKind kind, double k1, double k2, double p1, double p2, double eta) {
  double f1 = 1 - k1 * eta, f2 = 1 - k2 * eta;
  if (std::abs(f1) < 1e-12 || std::abs(f2) < 1e-12)
    throw SingularityError("offset sits at a focal point of the osculating paraboloid");
  double A1 = p1 * p1 / (f1 * f1), A2 = p2 * p2 / (f2 * f2);
  double A = A1 + A2;
  switch (kind) {
    case KernelKind::SL:
      return kInvFourPi / std::sqrt(A);
    case KernelKind::DL:
    case KernelKind::DLC:
      return (k1 * A1 + k2 * A2) / (8 * kPi * A * std::sqrt(A));
    default:
      throw ParameterError("no closed-form angular limit for kernel " + kernel_name(kind));
  }
}

double ell(KernelKind kind, const TargetContext& ctx, double psi, double eta) {
  auto p = p_transform(ctx, psi);
  return ell_closed_form(kind, ctx.k1, ctx.k2, p[0], p[1], eta);
}

double S_factor(const Vec3& r, const Vec3& n) {
  double cross = r.cross(n).norm();
  if (cross <= 1e-15 * r.norm() * n.norm()) throw SingularityError("direction is parallel to the normal line");
  return n.norm() / cross;
}

double in_plane_S(const TargetContext& ctx, double psi) {
  double n1 = ctx.n_scaled[0], n2 = ctx.n_scaled[1];
  double mix = std::cos(psi) * n2 - std::sin(psi) * n1;
  return std::sqrt(1 + n1 * n1 + n2 * n2) / std::sqrt(1 + mix * mix);
}

std::function<double(double)> singular_profile(KernelKind kind, const TargetContext& ctx, double eta) {
  return [kind, ctx, eta](double psi) { return in_plane_S(ctx, psi) * ell(kind, ctx, psi, eta); };
}

Vec3 project_to_paraboloid(double k1, double k2, const Vec3& y) {
  auto height = [&](double u, double v) { return 0.5 * (k1 * u * u + k2 * v * v); };
  auto objective = [&](double u, double v) {
    Vec3 X(u, v, height(u, v));
    return 0.5 * (X - y).squaredNorm();
  };
  double u = y[0], v = y[1];
  if (std::abs(1 - k1 * y[2]) > 0.1) u /= 1 - k1 * y[2];
  if (std::abs(1 - k2 * y[2]) > 0.1) v /= 1 - k2 * y[2];
  double scale = std::max(1e-300, y.norm());
  for (int it = 0; it < 200; ++it) {
    Vec3 X(u, v, height(u, v));
    Vec3 r = X - y;
    Vec3 Xu(1, 0, k1 * u), Xv(0, 1, k2 * v);
    Eigen::Vector2d g(r.dot(Xu), r.dot(Xv));
    Eigen::Matrix2d H;
    H << Xu.dot(Xu) + r[2] * k1, Xu.dot(Xv), Xu.dot(Xv), Xv.dot(Xv) + r[2] * k2;
    Eigen::Vector2d step;
    Eigen::LDLT<Eigen::Matrix2d> ldlt(H);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && H.determinant() > 0)
      step = -ldlt.solve(g);
    else
      step = -g;
    double f0 = objective(u, v);
    double lambda = 1;
    while (lambda > 1e-12 && objective(u + lambda * step[0], v + lambda * step[1]) > f0 + 1e-300) lambda /= 2;
    if (lambda <= 1e-12) lambda = 0;
    u += lambda * step[0];
    v += lambda * step[1];
    if (lambda * step.norm() <= 1e-15 * scale) return Vec3(u, v, height(u, v));
  }
  throw ConvergenceError("paraboloid projection did not converge", 0.0);
}

double numerical_ell_oracle(KernelKind kind, const TargetContext& ctx, double psi, double eta,
                            const std::vector<double>& t_sequence) {
  if (t_sequence.size() < 2) throw ParameterError("need at least two t values");
  Vec3 q(std::cos(psi), std::sin(psi), 0);
  Vec3 q_frame(q.dot(ctx.tau1_p), q.dot(ctx.tau2_p), q.dot(ctx.n_p));
  auto ratio = [&](double t) {
    Vec3 y(t * q_frame[0], t * q_frame[1], eta + t * q_frame[2]);
    Vec3 X = project_to_paraboloid(ctx.k1, ctx.k2, y);
    Vec3 ny = Vec3(-ctx.k1 * X[0], -ctx.k2 * X[1], 1).normalized();
    Vec3 r = -X;  // target at the origin
    double kval = kernel_from_difference(kind, r, uses_target_normal(kind) ? Vec3::UnitZ() : ny);
    return kval / S_factor(std::abs(t) * q, ctx.n_scaled);
  };
  // Averaging q and -q removes the odd powers of t.
  std::vector<double> tab;
  for (double t : t_sequence) tab.push_back(0.5 * (ratio(t) + ratio(-t)));
  for (std::size_t level = 1; level < tab.size(); ++level)
    for (std::size_t i = tab.size() - 1; i >= level; --i) {
      double ratio_sq = (t_sequence[i - level] / t_sequence[i]);
      ratio_sq *= ratio_sq;
      tab[i] = (ratio_sq * tab[i] - tab[i - 1]) / (ratio_sq - 1);
    }
  return tab.back();
}

std::vector<int> correction_planes(const TargetContext& ctx, const TubeGrid& tube) {
  if (!ctx.surface) throw ParameterError("target context has no surface");
  double ns = ctx.n_scaled.norm();
  double reach_z = (tube.eps + tube.h * ns) / ns;
  double oz = ctx.to_permuted(tube.origin)[2];
  int lo = static_cast<int>(std::ceil((ctx.target_p[2] - reach_z - oz) / tube.h));
  int hi = static_cast<int>(std::floor((ctx.target_p[2] + reach_z - oz) / tube.h));
  lo = std::max(lo, tube.index_min[ctx.axis]);
  hi = std::min(hi, tube.index_max[ctx.axis]);
  std::vector<int> planes;
  for (int k = lo; k <= hi; ++k) planes.push_back(k);
  return planes;
}

PlaneCorrection correction_plane(KernelKind kind, const TargetContext& ctx, const TubeGrid& tube,
                                 const WeightTable& table, int k, const Density& density) {
  if (!ctx.surface) throw ParameterError("target context has no surface");
  return plane_correction(kind, ctx, tube, table, k, density, angular_samples(ctx, table.N));
}

QuadratureBreakdown corrected_quad_detailed(const TubeGrid& tube, KernelKind kind, const TargetContext& ctx,
                                            const Density& density, const WeightTable& table) {
  std::vector<int> planes = correction_planes(ctx, tube);
  AngularSamples ang = angular_samples(ctx, table.N);
  QuadratureBreakdown out;
  CompensatedSum corr;
  for (int k : planes) {
    PlaneCorrection pc = plane_correction(kind, ctx, tube, table, k, density, ang);
    if (pc.in_tube) corr.add(pc.V * pc.R);
    out.planes.push_back(pc);
  }
  out.bulk = bulk_sum(tube, kind, ctx, density, exclusion_set(ctx, tube, planes));
  out.correction = tube.h * tube.h * corr.value();
  out.value = out.bulk + out.correction;
  return out;
}

double corrected_quad(const TubeGrid& tube, KernelKind kind, const TargetContext& ctx, const Density& density,
                      const WeightTable& table) {
  return corrected_quad_detailed(tube, kind, ctx, density, table).value;
}

double punctured_quad(const TubeGrid& tube, KernelKind kind, const TargetContext& ctx, const Density& density) {
  return bulk_sum(tube, kind, ctx, density, exclusion_set(ctx, tube, correction_planes(ctx, tube)));
}

}  // namespace ibiq

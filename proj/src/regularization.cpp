#include "ibiq/regularization.hpp"

#include <cmath>
#include <cstdio>

#include "ibiq/errors.hpp"
#include "ibiq/parallel.hpp"

namespace ibiq {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double c_const_dl(double k1, double k2, double r0) {
  double s = k1 + k2;
  double k1s = k1 * k1, k2s = k2 * k2;
  double cubic = (k1s + k2s) * (5 * k1s - 2 * k1 * k2 + 5 * k2s) / (4096 * kPi) +
                 (k1s * k1s + 2 * k1s * k2s + k2s * k2s) / (512 * kPi);
  return s / (8 * kPi * r0) - s * (13 * k1s - 2 * k1 * k2 + 13 * k2s) * r0 / (512 * kPi) +
         s * cubic * r0 * r0 * r0;
}

double c_const_dlc(double k1, double k2, double r0) {
  double s = k1 + k2;
  return s / (8 * kPi * r0) - 5.0 / 1536.0 * s / kPi * (3 * k1 * k1 + 2 * k1 * k2 + 3 * k2 * k2) * r0;
}

double c_tilde_helm(double k1, double k2, double r0) {
  double s = k1 + k2;
  return s / 4 - s * (-13 * k1 * k1 + 2 * k1 * k2 - 13 * k2 * k2) * r0 * r0 / 256;
}

std::pair<double, double> cappuccio_coeffs(double k1, double k2, double r0) {
  double s = k1 + k2;
  double a0 = -3 * s / (16 * kPi * r0) + 3 * s * (21 * k1 * k1 - 2 * k1 * k2 + 21 * k2 * k2) * r0 / (5120 * kPi);
  double a1 = s / (4 * kPi * r0) - 3 * s * (23 * k1 * k1 - 6 * k1 * k2 + 23 * k2 * k2) * r0 / (2560 * kPi);
  return {a0, a1};
}

KernelKind regularized_kernel(RegularizationKind kind) {
  switch (kind) {
    case RegularizationKind::ConstDLC: return KernelKind::DLC;
    case RegularizationKind::ConstHelmSecondary: return KernelKind::HelmSecondary;
    default: return KernelKind::DL;
  }
}

double regularization_value(RegularizationKind kind, const LocalFrame& fr, double dist, double r0) {
  double k1 = -fr.kappa1, k2 = -fr.kappa2;
  switch (kind) {
    case RegularizationKind::ConstDL: return c_const_dl(k1, k2, r0);
    case RegularizationKind::ConstDLC: return c_const_dlc(k1, k2, r0);
    case RegularizationKind::ConstHelmSecondary: return c_tilde_helm(k1, k2, r0);
    case RegularizationKind::Cappuccio: {
      auto [a0, a1] = cappuccio_coeffs(k1, k2, r0);
      return a0 * dist / r0 + a1;
    }
  }
  return 0;
}

double eval_regularized(RegularizationKind kind, const ImplicitSurface& s, const LocalFrame& fr,
                        const Vec3& x, const Vec3& y, double r0) {
  if (!(r0 > 0)) throw ParameterError("regularization radius must be positive");
  Vec3 p = s.closest_point(y);
  Vec3 r = x - p;
  double dist = r.norm();
  if (dist >= r0) {
    KernelKind kk = regularized_kernel(kind);
    Vec3 n = uses_target_normal(kk) ? fr.n : s.normal(y);
    return kernel_from_difference(kk, r, n);
  }
  return regularization_value(kind, fr, dist, r0);
}

double quad_regularized(const TubeGrid& tube, const ImplicitSurface& s, RegularizationKind kind,
                        const Vec3& target, double r0, const Density& density) {
  if (!(r0 > 0)) throw ParameterError("regularization radius must be positive");
  if (r0 <= tube.h)
    std::fprintf(stderr, "warning: r0 = %g <= h = %g, the regularized ball may contain no nodes\n", r0, tube.h);
  LocalFrame fr = hessian_frame(s, target);
  KernelKind kk = regularized_kernel(kind);
  bool target_normal = uses_target_normal(kk);
  double inner = regularization_value(kind, fr, 0.0, r0);
  double slope = kind == RegularizationKind::Cappuccio ? regularization_value(kind, fr, r0, r0) - inner : 0.0;
  double sum = deterministic_sum(tube.nodes.size(), [&](std::size_t i) {
    const TubeNode& nd = tube.nodes[i];
    if (nd.deltaw == 0) return 0.0;
    Vec3 r = target - nd.proj;
    double dist = r.norm();
    double k = dist >= r0 ? kernel_from_difference(kk, r, target_normal ? fr.n : nd.normal)
                          : inner + slope * dist / r0;
    return k * density(nd.proj) * nd.deltaw;
  });
  return sum * tube.h * tube.h * tube.h;
}

}  // namespace ibiq

#pragma once

#include <complex>
#include <string>

#include "ibiq/geometry.hpp"

namespace ibiq {

// HelmSecondary is (x-y).n_y / |x-y|^2, the extra term of the Helmholtz
// double layer, without the 1/(4pi) factor.
enum class KernelKind { SL, DL, DLC, HelmSecondary };

KernelKind parse_kernel(const std::string& name);
std::string kernel_name(KernelKind kind);

constexpr double kInvFourPi = 0.079577471545947667884;

// Kernel value from r = x - y and the relevant unit normal (at y for DL and
// HelmSecondary, at x for DLC; unused for SL). No coincidence check.
inline double kernel_from_difference(KernelKind kind, const Vec3& r, const Vec3& normal) {
  double r2 = r.squaredNorm();
  switch (kind) {
    case KernelKind::SL:
      return kInvFourPi / std::sqrt(r2);
    case KernelKind::DL:
      return kInvFourPi * r.dot(normal) / (r2 * std::sqrt(r2));
    case KernelKind::DLC:
      return -kInvFourPi * r.dot(normal) / (r2 * std::sqrt(r2));
    case KernelKind::HelmSecondary:
      return r.dot(normal) / r2;
  }
  return 0;
}

// True when the kernel uses the normal at the target rather than at the source.
inline bool uses_target_normal(KernelKind kind) { return kind == KernelKind::DLC; }

double eval_kernel(KernelKind kind, const Vec3& x, const Vec3& y, const Vec3& n_at);
// K(x, P y) with the normal taken at P y (or at x for DLC).
double restricted_kernel(const ImplicitSurface& s, KernelKind kind, const Vec3& x, const Vec3& y);
std::complex<double> helmholtz_dl(const Vec3& x, const Vec3& y, const Vec3& n_y, double wavenumber);

}  // namespace ibiq

#include <functional>

namespace ibiq {
// Density on the surface, evaluated at closest points.
using Density = std::function<double(const Vec3&)>;
}  // namespace ibiq

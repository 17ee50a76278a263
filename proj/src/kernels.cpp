#include "ibiq/kernels.hpp"

#include <cmath>

#include "ibiq/errors.hpp"

namespace ibiq {

KernelKind parse_kernel(const std::string& name) {
  if (name == "sl") return KernelKind::SL;
  if (name == "dl") return KernelKind::DL;
  if (name == "dlc") return KernelKind::DLC;
  if (name == "helm2") return KernelKind::HelmSecondary;
  throw ParameterError("unknown kernel '" + name + "' (expected sl|dl|dlc|helm2)");
}

std::string kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::SL: return "sl";
    case KernelKind::DL: return "dl";
    case KernelKind::DLC: return "dlc";
    case KernelKind::HelmSecondary: return "helm2";
  }
  return "?";
}

double eval_kernel(KernelKind kind, const Vec3& x, const Vec3& y, const Vec3& n_at) {
  Vec3 r = x - y;
  if (r.squaredNorm() == 0) throw SingularityError("kernel evaluated at coincident points");
  return kernel_from_difference(kind, r, n_at);
}

double restricted_kernel(const ImplicitSurface& s, KernelKind kind, const Vec3& x, const Vec3& y) {
  Vec3 p = s.closest_point(y);
  Vec3 r = x - p;
  if (r.norm() <= 1e-14 * std::max(1.0, x.norm()))
    throw SingularityError("source lies on the normal line through the target");
  Vec3 n = uses_target_normal(kind) ? s.normal(x) : s.normal(y);
  return kernel_from_difference(kind, r, n);
}

std::complex<double> helmholtz_dl(const Vec3& x, const Vec3& y, const Vec3& n_y, double wavenumber) {
  Vec3 r = x - y;
  double r2 = r.squaredNorm();
  if (r2 == 0) throw SingularityError("kernel evaluated at coincident points");
  double dist = std::sqrt(r2);
  double flux = r.dot(n_y);
  std::complex<double> bracket(kInvFourPi * flux / (r2 * dist), -wavenumber * kInvFourPi * flux / r2);
  return std::polar(1.0, wavenumber * dist) * bracket;
}

}  // namespace ibiq

#pragma once

#include <string>
#include <utility>

#include "ibiq/geometry.hpp"
#include "ibiq/kernels.hpp"
#include "ibiq/tube.hpp"

namespace ibiq {

enum class RegularizationKind { ConstDL, ConstDLC, Cappuccio, ConstHelmSecondary };

// The closed forms below take curvatures of the osculating paraboloid
// z = (k1 x^2 + k2 y^2)/2 written along the kernel normal. With the outward
// normal of LocalFrame this is k = -kappa; eval_regularized does the flip.
double c_const_dl(double k1, double k2, double r0);
double c_const_dlc(double k1, double k2, double r0);
double c_tilde_helm(double k1, double k2, double r0);
// (a0, a1) of the linear replacement a0*r/r0 + a1.
std::pair<double, double> cappuccio_coeffs(double k1, double k2, double r0);

KernelKind regularized_kernel(RegularizationKind kind);

// Replacement value inside the ball at distance dist from the target.
double regularization_value(RegularizationKind kind, const LocalFrame& frame_at_x, double dist, double r0);

double eval_regularized(RegularizationKind kind, const ImplicitSurface& s, const LocalFrame& frame_at_x,
                        const Vec3& x, const Vec3& y, double r0);

// h^3 sum of the regularized restricted kernel times density(P y) deltaw(y).
double quad_regularized(const TubeGrid& tube, const ImplicitSurface& s, RegularizationKind kind,
                        const Vec3& target, double r0, const Density& density);

// Default regularization radius coeff*sqrt(eps*h).
inline double default_r0(double h, double eps, double coeff = 2.0) { return coeff * std::sqrt(eps * h); }

}  // namespace ibiq

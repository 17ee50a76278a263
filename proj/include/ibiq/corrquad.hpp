#pragma once

#include <array>
#include <functional>
#include <vector>

#include "ibiq/corrweights.hpp"
#include "ibiq/geometry.hpp"
#include "ibiq/kernels.hpp"
#include "ibiq/tube.hpp"

namespace ibiq {

// Target data for the plane-by-plane rule. Quantities suffixed _p are in
// permuted coordinates where the splitting axis comes last; the permutation
// is cyclic so orientation is preserved.
struct TargetContext {
  const ImplicitSurface* surface = nullptr;
  Vec3 target = Vec3::Zero();
  LocalFrame frame;
  int axis = 2;
  std::array<int, 3> perm{0, 1, 2};  // permuted coordinate i is original coordinate perm[i]
  Vec3 target_p = Vec3::Zero();
  Vec3 n_p = Vec3::UnitZ(), tau1_p = Vec3::UnitX(), tau2_p = Vec3::UnitY();
  Vec3 n_scaled = Vec3::UnitZ();
  // Curvatures of the osculating paraboloid written along n, i.e. -kappa.
  double k1 = 0, k2 = 0;
  double theta = 0, xi = 0, theta0 = 0;
  double a = 0, b = 0, c = 1;

  Vec3 to_permuted(const Vec3& x) const { return Vec3(x[perm[0]], x[perm[1]], x[perm[2]]); }
  Vec3 from_permuted(const Vec3& p) const {
    Vec3 x;
    for (int i = 0; i < 3; ++i) x[perm[i]] = p[i];
    return x;
  }
};

// axis < 0 picks the coordinate where |n| is largest.
TargetContext make_target_context(const Vec3& target, const LocalFrame& frame, int axis = -1);
TargetContext build_target_context(const ImplicitSurface& s, const Vec3& target, int axis = -1);

struct PlaneSingularity {
  Vec3 y0;       // permuted coordinates
  Vec3 y_delta;  // nearest lattice node in the plane, permuted coordinates
  std::array<long, 2> node{};
  ShiftParams shift;
};

// Singular point of plane z (permuted third coordinate) and its nearest node on
// the lattice origin + h Z^3 (origin given in original coordinates).
PlaneSingularity plane_singularity(const TargetContext& ctx, double z, double h,
                                   const Vec3& lattice_origin = Vec3::Zero());

// Unit tangent-plane direction (p1, p2) in the (tau1, tau2) basis matching the
// in-plane direction (cos psi, sin psi).
std::array<double, 2> p_transform(const TargetContext& ctx, double psi);

double ell_closed_form(KernelKind kind, double k1, double k2, double p1, double p2, double eta);
// eta is the offset along n in the paraboloid picture of ctx.k1, ctx.k2.
double ell(KernelKind kind, const TargetContext& ctx, double psi, double eta);

double S_factor(const Vec3& r, const Vec3& n);
// Angular part of S for in-plane directions: S(rho e_psi, n) = in_plane_S(psi)/rho.
double in_plane_S(const TargetContext& ctx, double psi);
std::function<double(double)> singular_profile(KernelKind kind, const TargetContext& ctx, double eta);

// Closest point on z = (k1 u^2 + k2 v^2)/2 to a point given in (tau1, tau2, n)
// coordinates, by damped Newton on the optimality system. Returns (u, v, w).
Vec3 project_to_paraboloid(double k1, double k2, const Vec3& y);

// Limit of K(x*, P(y0 + t q)) / S(t q, n) as t -> 0 for the osculating
// paraboloid of ctx, q = (cos psi, sin psi, 0) in permuted coordinates.
double numerical_ell_oracle(KernelKind kind, const TargetContext& ctx, double psi, double eta,
                            const std::vector<double>& t_sequence = {0.02, 0.01, 0.005, 0.0025, 0.00125, 0.000625});

struct PlaneCorrection {
  int k = 0;
  double z = 0;
  Vec3 y0 = Vec3::Zero();
  Vec3 y_delta = Vec3::Zero();
  std::array<int, 3> node_index{};  // original lattice index of y_delta
  ShiftParams shift;
  double eta = 0;  // signed distance of y0
  bool in_tube = false;
  double V = 0;  // density * deltaw at y_delta
  double omega_s = 0;
  double omega_S = 0;
  double hatv_term = 0;
  double R = 0;
};

PlaneCorrection correction_plane(KernelKind kind, const TargetContext& ctx, const TubeGrid& tube,
                                 const WeightTable& table, int k, const Density& density);

// Planes whose singular point lies on the normal segment within the tube.
std::vector<int> correction_planes(const TargetContext& ctx, const TubeGrid& tube);

struct QuadratureBreakdown {
  double value = 0;
  double bulk = 0;        // h^3 punctured sum
  double correction = 0;  // h^2 sum of V R
  std::vector<PlaneCorrection> planes;
};

QuadratureBreakdown corrected_quad_detailed(const TubeGrid& tube, KernelKind kind, const TargetContext& ctx,
                                            const Density& density, const WeightTable& table);
double corrected_quad(const TubeGrid& tube, KernelKind kind, const TargetContext& ctx, const Density& density,
                      const WeightTable& table);
// h^3 sum over the tube excluding the per-plane nearest nodes, no correction.
double punctured_quad(const TubeGrid& tube, KernelKind kind, const TargetContext& ctx, const Density& density);

}  // namespace ibiq

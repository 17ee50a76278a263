#pragma once

#include <array>
#include <string>
#include <vector>

#include "ibiq/geometry.hpp"

namespace ibiq {

// Normalization constant of the averaging bump, computed once to machine precision.
double phi_normalization();
// Unit-mass bump a*exp(2/(x^2-1)) supported on (-1, 1).
double phi(double x);
// Scaled bump phi(eta/eps)/eps.
double delta_eps(double eta, double eps);

enum class JacobianMode { Default, Analytic, FiniteDifference };

struct TubeNode {
  std::array<int, 3> index{};
  double d = 0;
  Vec3 proj = Vec3::Zero();
  Vec3 normal = Vec3::Zero();  // outward normal at proj
  double jacobian = 1;
  double deltaw = 0;  // jacobian * delta_eps(d)
};

struct TubeGrid {
  double h = 0;
  double eps = 0;
  Vec3 origin = Vec3::Zero();
  // Sorted by (k, j, i).
  std::vector<TubeNode> nodes;
  // nodes of plane k occupy [plane_offsets[k - k_first], plane_offsets[k - k_first + 1]).
  int k_first = 0;
  std::vector<std::size_t> plane_offsets;
  // Per-axis extent of the stored lattice indices.
  std::array<int, 3> index_min{}, index_max{};

  Vec3 position(const TubeNode& nd) const {
    return origin + h * Vec3(nd.index[0], nd.index[1], nd.index[2]);
  }
  int k_last() const { return k_first + static_cast<int>(plane_offsets.size()) - 2; }
  // Node with the given lattice index, or nullptr if it is not in the tube.
  const TubeNode* find(const std::array<int, 3>& index) const;
  // Sum of deltaw*h^3, the discrete surface measure.
  double surface_measure() const;
  void write_csv(const std::string& path) const;
};

TubeGrid build_tube_grid(const ImplicitSurface& s, double h, double eps,
                         JacobianMode mode = JacobianMode::Default,
                         const Vec3& origin = Vec3::Zero());

}  // namespace ibiq

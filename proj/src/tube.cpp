#include "ibiq/tube.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ibiq/errors.hpp"
#include "ibiq/parallel.hpp"

namespace ibiq {

namespace {

double bump(double x) { return std::abs(x) >= 1 ? 0.0 : std::exp(2 / (x * x - 1)); }

bool index_less(const std::array<int, 3>& a, const std::array<int, 3>& b) {
  if (a[2] != b[2]) return a[2] < b[2];
  if (a[1] != b[1]) return a[1] < b[1];
  return a[0] < b[0];
}

}  // namespace

double phi_normalization() {
  static const double a = [] {
    boost::math::quadrature::tanh_sinh<double> integrator;
    double mass = integrator.integrate(bump, -1.0, 1.0);
    return 1 / mass;
  }();
  return a;
}

double phi(double x) { return phi_normalization() * bump(x); }

double delta_eps(double eta, double eps) {
  if (!(eps > 0)) throw ParameterError("tube half-width must be positive");
  return phi(eta / eps) / eps;
}

const TubeNode* TubeGrid::find(const std::array<int, 3>& index) const {
  int k = index[2];
  if (k < k_first || k > k_last()) return nullptr;
  auto first = nodes.begin() + plane_offsets[k - k_first];
  auto last = nodes.begin() + plane_offsets[k - k_first + 1];
  auto it = std::lower_bound(first, last, index, [](const TubeNode& nd, const std::array<int, 3>& key) {
    return index_less(nd.index, key);
  });
  if (it != last && it->index == index) return &*it;
  return nullptr;
}

double TubeGrid::surface_measure() const {
  double h3 = h * h * h;
  return h3 * deterministic_sum(nodes.size(), [&](std::size_t i) { return nodes[i].deltaw; });
}

void TubeGrid::write_csv(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error("cannot open " + path);
  std::fprintf(f, "idx,x,y,z,d,Px,Py,Pz,J,deltaw\n");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TubeNode& nd = nodes[i];
    Vec3 x = position(nd);
    std::fprintf(f, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, x[0], x[1],
                 x[2], nd.d, nd.proj[0], nd.proj[1], nd.proj[2], nd.jacobian, nd.deltaw);
  }
  std::fclose(f);
}

TubeGrid build_tube_grid(const ImplicitSurface& s, double h, double eps, JacobianMode mode,
                         const Vec3& origin) {
  if (!(h > 0) || !(eps > 0)) throw ParameterError("h and eps must be positive");
  if (eps >= s.reach()) throw ValidityError("tube half-width reaches the reach bound");
  if (mode == JacobianMode::Default)
    mode = s.analytic() ? JacobianMode::Analytic : JacobianMode::FiniteDifference;

  auto [lo, hi] = s.bounding_box();
  std::array<int, 3> first{}, last{};
  for (int a = 0; a < 3; ++a) {
    first[a] = static_cast<int>(std::ceil((lo[a] - eps - origin[a]) / h));
    last[a] = static_cast<int>(std::floor((hi[a] + eps - origin[a]) / h));
  }

  TubeGrid grid;
  grid.h = h;
  grid.eps = eps;
  grid.origin = origin;
  grid.k_first = first[2];

  int nk = last[2] - first[2] + 1;
  std::vector<std::vector<TubeNode>> slabs(std::max(nk, 0));
  parallel_for(slabs.size(), [&](std::size_t slab) {
    int k = first[2] + static_cast<int>(slab);
    auto& out = slabs[slab];
    for (int j = first[1]; j <= last[1]; ++j)
      for (int i = first[0]; i <= last[0]; ++i) {
        Vec3 x = origin + h * Vec3(i, j, k);
        double d = s.distance(x);
        if (std::abs(d) > eps) continue;
        TubeNode nd;
        nd.index = {i, j, k};
        nd.d = d;
        nd.proj = s.closest_point(x);
        nd.normal = s.normal(x);
        nd.jacobian = mode == JacobianMode::Analytic ? s.level_set_jacobian(x) : jacobian_fd(s, x, h);
        nd.deltaw = nd.jacobian * delta_eps(d, eps);
        out.push_back(nd);
      }
  });

  std::size_t total = 0;
  for (const auto& sl : slabs) total += sl.size();
  if (total == 0) throw EmptyTubeError("no lattice nodes inside the tube");
  grid.nodes.reserve(total);
  grid.plane_offsets.reserve(slabs.size() + 1);
  for (auto& sl : slabs) {
    grid.plane_offsets.push_back(grid.nodes.size());
    grid.nodes.insert(grid.nodes.end(), sl.begin(), sl.end());
    std::vector<TubeNode>().swap(sl);
  }
  grid.plane_offsets.push_back(grid.nodes.size());
  grid.index_min = grid.index_max = grid.nodes.front().index;
  for (const auto& nd : grid.nodes)
    for (int a = 0; a < 3; ++a) {
      grid.index_min[a] = std::min(grid.index_min[a], nd.index[a]);
      grid.index_max[a] = std::max(grid.index_max[a], nd.index[a]);
    }
  return grid;
}

}  // namespace ibiq

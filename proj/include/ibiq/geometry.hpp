#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace ibiq {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Signed distance and closest point samples on a regular lattice.
// Node (i,j,k) sits at origin + spacing*(i,j,k); arrays are x-fastest.
struct SampledField {
  std::array<int, 3> dims{0, 0, 0};
  Vec3 origin = Vec3::Zero();
  double spacing = 0.0;
  std::vector<double> dist;  // dims product
  std::vector<double> proj;  // 3 per node

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  Vec3 node(int i, int j, int k) const { return origin + spacing * Vec3(i, j, k); }

  void write(const std::string& path) const;
  static SampledField read(const std::string& path);
};

// Orthonormal frame at a surface point. kappa1 <= kappa2, tau1 x tau2 = n.
// level_kbar* are the level-set curvatures at the probe the frame was
// computed from, which sat at signed distance `offset`.
struct LocalFrame {
  Vec3 base = Vec3::Zero();
  Vec3 n = Vec3::UnitZ();
  Vec3 tau1 = Vec3::UnitX();
  Vec3 tau2 = Vec3::UnitY();
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double level_kbar1 = 0.0;
  double level_kbar2 = 0.0;
  double offset = 0.0;
};

// Closed surface given implicitly by its signed distance (positive inside).
class ImplicitSurface {
 public:
  enum class Kind { Sphere, Torus, Sampled };

  static ImplicitSurface sphere(const Vec3& center, double radius);
  // Torus around the local z axis, placed by x -> rotation*x + center.
  static ImplicitSurface torus(const Vec3& center, double major, double minor,
                               const Mat3& rotation = Mat3::Identity());
  // `reach` is a user-supplied bound; the field must cover the tube.
  static ImplicitSurface sampled(std::shared_ptr<const SampledField> field, double reach);

  Kind kind() const { return kind_; }
  bool analytic() const { return kind_ != Kind::Sampled; }
  double reach() const { return reach_; }
  const Vec3& center() const { return center_; }
  double radius() const { return radius_; }
  double major_radius() const { return major_; }
  double minor_radius() const { return minor_; }
  const Mat3& rotation() const { return rotation_; }
  const SampledField* field() const { return field_.get(); }

  // Axis-aligned box containing the surface.
  std::pair<Vec3, Vec3> bounding_box() const;
  // Area when known in closed form, else NaN.
  double area() const;

  double distance(const Vec3& x) const;
  Vec3 closest_point(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  Mat3 hessian(const Vec3& x) const;
  // Outward unit normal of the level set through x, -grad d / |grad d|.
  Vec3 normal(const Vec3& x) const;
  // J_{d(x)}(x): area ratio between the surface and the level set through x.
  double level_set_jacobian(const Vec3& x) const;

  // Surface point from torus angles (theta around the tube, phi around the axis).
  Vec3 torus_point(double theta, double phi) const;

 private:
  Kind kind_ = Kind::Sphere;
  Vec3 center_ = Vec3::Zero();
  double radius_ = 0.0;
  double major_ = 0.0, minor_ = 0.0;
  Mat3 rotation_ = Mat3::Identity();
  double reach_ = 0.0;
  std::shared_ptr<const SampledField> field_;

  // Tricubic Lagrange interpolation of component c (0: d, 1..3: P).
  double interp(const Vec3& x, int c) const;
  Vec3 fd_gradient(const Vec3& x) const;
  Mat3 fd_hessian(const Vec3& x) const;
};

// Rotation about a coordinate axis.
Mat3 rotation_x(double a);
Mat3 rotation_y(double a);
Mat3 rotation_z(double a);

double signed_distance(const ImplicitSurface& s, const Vec3& x);
Vec3 closest_point(const ImplicitSurface& s, const Vec3& x);
LocalFrame hessian_frame(const ImplicitSurface& s, const Vec3& x);
// 1 + 2 eta H + eta^2 G from the level-set curvatures kbar1, kbar2.
double jacobian_eta(double kbar1, double kbar2, double eta,
                    double reach = std::numeric_limits<double>::infinity());
double jacobian_eta(const LocalFrame& frame_at_x, double eta);
// Product of the two largest singular values of the fourth-order central
// difference Jacobian of the closest-point map.
double jacobian_fd(const ImplicitSurface& s, const Vec3& node, double h);

// Samples d and P of an analytic surface on a lattice covering the surface
// bounding box plus `margin`.
SampledField sample_surface(const ImplicitSurface& s, double spacing, double margin);

}  // namespace ibiq

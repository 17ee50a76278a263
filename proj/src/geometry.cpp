#include "ibiq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ibiq/binary_io.hpp"
#include "ibiq/errors.hpp"

namespace ibiq {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Unit vector orthogonal to n, built from the coordinate axis least aligned with n.
Vec3 any_orthogonal(const Vec3& n) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[k])) k = i;
  Vec3 e = Vec3::Unit(k);
  return (e - n.dot(e) * n).normalized();
}

// Flip v so that its largest-magnitude component is positive.
Vec3 canonical_sign(const Vec3& v) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[k]) + 1e-12) k = i;
  return v[k] < 0 ? Vec3(-v) : v;
}

struct TorusLocal {
  Vec3 p;          // untilted, centered coordinates
  double rho;      // distance from the symmetry axis
  double q;        // distance from the tube center circle
  Vec3 radial;     // unit vector from the center circle towards p
  Vec3 parallel;   // unit tangent of the parallel circle
};

}  // namespace

Mat3 rotation_x(double a) {
  Mat3 m;
  m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return m;
}

Mat3 rotation_y(double a) {
  Mat3 m;
  m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return m;
}

Mat3 rotation_z(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return m;
}

ImplicitSurface ImplicitSurface::sphere(const Vec3& center, double radius) {
  if (!(radius > 0)) throw ParameterError("sphere radius must be positive");
  ImplicitSurface s;
  s.kind_ = Kind::Sphere;
  s.center_ = center;
  s.radius_ = radius;
  s.reach_ = radius;
  return s;
}

ImplicitSurface ImplicitSurface::torus(const Vec3& center, double major, double minor,
                                       const Mat3& rotation) {
  if (!(minor > 0 && minor < major)) throw ParameterError("torus radii must satisfy 0 < R2 < R1");
  if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    throw ParameterError("torus rotation is not orthogonal");
  ImplicitSurface s;
  s.kind_ = Kind::Torus;
  s.center_ = center;
  s.major_ = major;
  s.minor_ = minor;
  s.rotation_ = rotation;
  s.reach_ = minor;
  return s;
}

ImplicitSurface ImplicitSurface::sampled(std::shared_ptr<const SampledField> field, double reach) {
  if (!field || field->spacing <= 0) throw ParameterError("sampled field is empty");
  for (int a = 0; a < 3; ++a)
    if (field->dims[a] < 4) throw ParameterError("sampled field needs at least 4 nodes per axis");
  if (!(reach > 0)) throw ParameterError("reach must be positive");
  ImplicitSurface s;
  s.kind_ = Kind::Sampled;
  s.field_ = std::move(field);
  s.reach_ = reach;
  return s;
}

std::pair<Vec3, Vec3> ImplicitSurface::bounding_box() const {
  switch (kind_) {
    case Kind::Sphere:
      return {center_ - Vec3::Constant(radius_), center_ + Vec3::Constant(radius_)};
    case Kind::Torus: {
      Vec3 half;
      for (int i = 0; i < 3; ++i) {
        double axial = rotation_(i, 2);
        half[i] = major_ * std::sqrt(std::max(0.0, 1 - axial * axial)) + minor_;
      }
      return {center_ - half, center_ + half};
    }
    case Kind::Sampled: {
      // Nodes with a sign change bound the zero level set.
      const SampledField& f = *field_;
      Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
      Vec3 hi = -lo;
      for (int k = 0; k < f.dims[2]; ++k)
        for (int j = 0; j < f.dims[1]; ++j)
          for (int i = 0; i < f.dims[0]; ++i) {
            double d = f.dist[f.index(i, j, k)];
            if (std::abs(d) <= f.spacing) {
              Vec3 x = f.node(i, j, k);
              lo = lo.cwiseMin(x);
              hi = hi.cwiseMax(x);
            }
          }
      if (!(lo[0] <= hi[0])) throw DomainError("sampled field contains no surface");
      return {lo, hi};
    }
  }
  return {};
}

double ImplicitSurface::area() const {
  switch (kind_) {
    case Kind::Sphere:
      return 4 * kPi * radius_ * radius_;
    case Kind::Torus:
      return 4 * kPi * kPi * major_ * minor_;
    default:
      return std::numeric_limits<double>::quiet_NaN();
  }
}

static TorusLocal torus_local(const ImplicitSurface& s, const Vec3& x) {
  TorusLocal t;
  t.p = s.rotation().transpose() * (x - s.center());
  t.rho = std::hypot(t.p[0], t.p[1]);
  double R1 = s.major_radius();
  if (t.rho < 1e-14 * R1) throw AmbiguityError("probe on the torus symmetry axis");
  Vec3 er(t.p[0] / t.rho, t.p[1] / t.rho, 0);
  Vec3 w = t.p - R1 * er;
  t.q = w.norm();
  if (t.q < 1e-14 * R1) throw AmbiguityError("probe on the torus center circle");
  t.radial = w / t.q;
  t.parallel = Vec3(-er[1], er[0], 0);
  return t;
}

double ImplicitSurface::distance(const Vec3& x) const {
  switch (kind_) {
    case Kind::Sphere:
      return radius_ - (x - center_).norm();
    case Kind::Torus: {
      Vec3 p = rotation_.transpose() * (x - center_);
      double rho = std::hypot(p[0], p[1]);
      return minor_ - std::hypot(rho - major_, p[2]);
    }
    case Kind::Sampled:
      return interp(x, 0);
  }
  return 0;
}

Vec3 ImplicitSurface::closest_point(const Vec3& x) const {
  switch (kind_) {
    case Kind::Sphere: {
      Vec3 u = x - center_;
      double r = u.norm();
      if (r < 1e-14 * radius_) throw AmbiguityError("probe at the sphere center");
      return center_ + radius_ / r * u;
    }
    case Kind::Torus: {
      TorusLocal t = torus_local(*this, x);
      Vec3 er(t.p[0] / t.rho, t.p[1] / t.rho, 0);
      Vec3 local = major_ * er + minor_ * t.radial;
      return rotation_ * local + center_;
    }
    case Kind::Sampled:
      return Vec3(interp(x, 1), interp(x, 2), interp(x, 3));
  }
  return x;
}

Vec3 ImplicitSurface::gradient(const Vec3& x) const {
  switch (kind_) {
    case Kind::Sphere: {
      Vec3 u = x - center_;
      double r = u.norm();
      if (r < 1e-14 * radius_) throw AmbiguityError("probe at the sphere center");
      return -u / r;
    }
    case Kind::Torus: {
      TorusLocal t = torus_local(*this, x);
      return -(rotation_ * t.radial);
    }
    case Kind::Sampled:
      return fd_gradient(x);
  }
  return Vec3::Zero();
}

Mat3 ImplicitSurface::hessian(const Vec3& x) const {
  switch (kind_) {
    case Kind::Sphere: {
      Vec3 u = x - center_;
      double r = u.norm();
      if (r < 1e-14 * radius_) throw AmbiguityError("probe at the sphere center");
      Vec3 e = u / r;
      return -(Mat3::Identity() - e * e.transpose()) / r;
    }
    case Kind::Torus: {
      TorusLocal t = torus_local(*this, x);
      Vec3 meridian = t.parallel.cross(t.radial);
      double cos_theta = (t.rho - major_) / t.q;
      Mat3 hq = meridian * meridian.transpose() / t.q +
                (cos_theta / t.rho) * t.parallel * t.parallel.transpose();
      return -(rotation_ * hq * rotation_.transpose());
    }
    case Kind::Sampled:
      return fd_hessian(x);
  }
  return Mat3::Zero();
}

Vec3 ImplicitSurface::normal(const Vec3& x) const {
  Vec3 g = gradient(x);
  double len = g.norm();
  if (!(len > 0.5)) throw DegenerateFrameError("distance gradient is not unit length");
  return -g / len;
}

double ImplicitSurface::level_set_jacobian(const Vec3& x) const {
  switch (kind_) {
    case Kind::Sphere: {
      double r = (x - center_).norm();
      if (r < 1e-14 * radius_) throw AmbiguityError("probe at the sphere center");
      return (radius_ / r) * (radius_ / r);
    }
    case Kind::Torus: {
      TorusLocal t = torus_local(*this, x);
      double cos_theta = (t.rho - major_) / t.q;
      return (minor_ / t.q) * (major_ + minor_ * cos_theta) / t.rho;
    }
    case Kind::Sampled:
      return jacobian_eta(hessian_frame(*this, x), distance(x));
  }
  return 1;
}

Vec3 ImplicitSurface::torus_point(double theta, double phi) const {
  if (kind_ != Kind::Torus) throw ParameterError("torus_point on a non-torus surface");
  double ring = major_ + minor_ * std::cos(theta);
  Vec3 local(ring * std::cos(phi), ring * std::sin(phi), minor_ * std::sin(theta));
  return rotation_ * local + center_;
}

double ImplicitSurface::interp(const Vec3& x, int c) const {
  const SampledField& f = *field_;
  Vec3 u = (x - f.origin) / f.spacing;
  int start[3], count[3];
  double w[3][4];
  for (int a = 0; a < 3; ++a) {
    double fl = std::floor(u[a]);
    double t = u[a] - fl;
    int i = static_cast<int>(fl);
    if (t > 1 - 1e-10) {
      t = 0;
      ++i;
    }
    if (t < 1e-10) {
      start[a] = i;
      count[a] = 1;
      w[a][0] = 1;
    } else {
      start[a] = i - 1;
      count[a] = 4;
      w[a][0] = -t * (t - 1) * (t - 2) / 6;
      w[a][1] = (t + 1) * (t - 1) * (t - 2) / 2;
      w[a][2] = -(t + 1) * t * (t - 2) / 2;
      w[a][3] = (t + 1) * t * (t - 1) / 6;
    }
    if (!std::isfinite(u[a]) || start[a] < 0 || start[a] + count[a] > f.dims[a])
      throw DomainError("probe outside the sampled field");
  }
  double acc = 0;
  for (int kk = 0; kk < count[2]; ++kk)
    for (int jj = 0; jj < count[1]; ++jj)
      for (int ii = 0; ii < count[0]; ++ii) {
        std::size_t idx = f.index(start[0] + ii, start[1] + jj, start[2] + kk);
        double v = c == 0 ? f.dist[idx] : f.proj[3 * idx + (c - 1)];
        acc += w[0][ii] * w[1][jj] * w[2][kk] * v;
      }
  return acc;
}

Vec3 ImplicitSurface::fd_gradient(const Vec3& x) const {
  double h = field_->spacing;
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = h * Vec3::Unit(a);
    g[a] = (-interp(x + 2 * e, 0) + 8 * interp(x + e, 0) - 8 * interp(x - e, 0) +
            interp(x - 2 * e, 0)) /
           (12 * h);
  }
  return g;
}

Mat3 ImplicitSurface::fd_hessian(const Vec3& x) const {
  double h = field_->spacing;
  Mat3 H;
  double f0 = interp(x, 0);
  for (int a = 0; a < 3; ++a) {
    Vec3 e = h * Vec3::Unit(a);
    H(a, a) = (-interp(x + 2 * e, 0) + 16 * interp(x + e, 0) - 30 * f0 + 16 * interp(x - e, 0) -
               interp(x - 2 * e, 0)) /
              (12 * h * h);
  }
  const double c[4] = {1, -8, 8, -1};
  const int off[4] = {2, 1, -1, -2};
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      double acc = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          Vec3 p = x + off[i] * h * Vec3::Unit(a) + off[j] * h * Vec3::Unit(b);
          acc += c[i] * c[j] * interp(p, 0);
        }
      H(a, b) = H(b, a) = acc / (144 * h * h);
    }
  return H;
}

double signed_distance(const ImplicitSurface& s, const Vec3& x) { return s.distance(x); }

Vec3 closest_point(const ImplicitSurface& s, const Vec3& x) { return s.closest_point(x); }

LocalFrame hessian_frame(const ImplicitSurface& s, const Vec3& x) {
  LocalFrame fr;
  double d = s.distance(x);
  if (std::abs(d) >= s.reach()) throw ValidityError("frame probe beyond the reach bound");
  Vec3 n = s.normal(x);
  Mat3 H = s.hessian(x);

  Eigen::SelfAdjointEigenSolver<Mat3> full(H, Eigen::EigenvaluesOnly);
  double scale = full.eigenvalues().cwiseAbs().maxCoeff();
  double tol = 1e-6 * scale + 1e-12;
  if (!s.analytic()) {
    // Fourth-order differences carry an O(h^2) error in the Hessian.
    double h = s.field()->spacing;
    tol += h * h * std::max(1.0, scale * scale * scale);
  }
  // The normal must be a null direction of the distance Hessian.
  if ((H * n).norm() > tol) throw DegenerateFrameError("no Hessian null direction along the gradient");

  Vec3 u = any_orthogonal(n);
  Vec3 v = n.cross(u);
  Eigen::Matrix<double, 3, 2> B;
  B.col(0) = u;
  B.col(1) = v;
  Eigen::Matrix2d M = B.transpose() * H * B;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> tang(M);
  // Eigenvalues are -kbar, ascending; kbar1 <= kbar2 comes from the larger one.
  double kbar1 = -tang.eigenvalues()[1];
  double kbar2 = -tang.eigenvalues()[0];
  Vec3 tau1 = canonical_sign((B * tang.eigenvectors().col(1)).normalized());

  for (double kb : {kbar1, kbar2})
    if (1 + d * kb <= 0) throw ValidityError("probe beyond a focal point");

  fr.base = s.closest_point(x);
  fr.n = n;
  fr.tau1 = tau1;
  fr.tau2 = n.cross(tau1);
  fr.level_kbar1 = kbar1;
  fr.level_kbar2 = kbar2;
  fr.offset = d;
  fr.kappa1 = kbar1 / (1 + d * kbar1);
  fr.kappa2 = kbar2 / (1 + d * kbar2);
  return fr;
}

double jacobian_eta(double kbar1, double kbar2, double eta, double reach) {
  if (std::abs(eta) >= reach) throw ValidityError("offset beyond the reach bound");
  double J = 1 + eta * (kbar1 + kbar2) + eta * eta * kbar1 * kbar2;
  if (!(J > 0) || 1 + eta * kbar1 <= 0 || 1 + eta * kbar2 <= 0)
    throw ValidityError("offset beyond a focal point");
  return J;
}

double jacobian_eta(const LocalFrame& frame_at_x, double eta) {
  return jacobian_eta(frame_at_x.level_kbar1, frame_at_x.level_kbar2, eta);
}

double jacobian_fd(const ImplicitSurface& s, const Vec3& node, double h) {
  if (!(h > 0)) throw ParameterError("difference step must be positive");
  Mat3 D;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = h * Vec3::Unit(a);
    D.col(a) = (-s.closest_point(node + 2 * e) + 8 * s.closest_point(node + e) -
                8 * s.closest_point(node - e) + s.closest_point(node - 2 * e)) /
               (12 * h);
  }
  Eigen::JacobiSVD<Mat3> svd(D);
  const auto& sv = svd.singularValues();
  return sv[0] * sv[1];
}

SampledField sample_surface(const ImplicitSurface& s, double spacing, double margin) {
  if (!s.analytic()) throw ParameterError("can only sample analytic surfaces");
  if (!(spacing > 0)) throw ParameterError("spacing must be positive");
  auto [lo, hi] = s.bounding_box();
  SampledField f;
  f.spacing = spacing;
  std::array<long, 3> first{};
  for (int a = 0; a < 3; ++a) {
    first[a] = static_cast<long>(std::floor((lo[a] - margin) / spacing));
    long last = static_cast<long>(std::ceil((hi[a] + margin) / spacing));
    f.dims[a] = static_cast<int>(last - first[a] + 1);
  }
  f.origin = spacing * Vec3(first[0], first[1], first[2]);
  std::size_t total = static_cast<std::size_t>(f.dims[0]) * f.dims[1] * f.dims[2];
  f.dist.resize(total);
  f.proj.resize(3 * total);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < f.dims[2]; ++k)
    for (int j = 0; j < f.dims[1]; ++j)
      for (int i = 0; i < f.dims[0]; ++i) {
        Vec3 x = spacing * Vec3(first[0] + i, first[1] + j, first[2] + k);
        std::size_t idx = f.index(i, j, k);
        f.dist[idx] = s.distance(x);
        Vec3 p(nan, nan, nan);
        try {
          p = s.closest_point(x);
        } catch (const AmbiguityError&) {
        }
        for (int c = 0; c < 3; ++c) f.proj[3 * idx + c] = p[c];
      }
  return f;
}

void SampledField::write(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  char header[256];
  std::snprintf(header, sizeof header, "%d %d %d %.17g %.17g %.17g %.17g\n", dims[0], dims[1],
                dims[2], origin[0], origin[1], origin[2], spacing);
  os << header;
  for (double v : dist) binio::write_f64(os, v);
  for (double v : proj) binio::write_f64(os, v);
  if (!os) throw Error("write failed: " + path);
}

SampledField SampledField::read(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  std::getline(is, line);
  std::istringstream hs(line);
  SampledField f;
  hs >> f.dims[0] >> f.dims[1] >> f.dims[2] >> f.origin[0] >> f.origin[1] >> f.origin[2] >>
      f.spacing;
  if (!hs || f.dims[0] <= 0 || f.dims[1] <= 0 || f.dims[2] <= 0 || !(f.spacing > 0))
    throw Error("malformed sampled-field header in " + path);
  std::size_t total = static_cast<std::size_t>(f.dims[0]) * f.dims[1] * f.dims[2];
  f.dist.resize(total);
  f.proj.resize(3 * total);
  for (auto& v : f.dist) v = binio::read_f64(is);
  for (auto& v : f.proj) v = binio::read_f64(is);
  return f;
}

}  // namespace ibiq

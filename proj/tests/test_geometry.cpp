#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "ibiq/errors.hpp"
#include "ibiq/geometry.hpp"
#include "ibiq/harness.hpp"
#include "test_util.hpp"

using namespace ibiq;
using testutil::kPi;

namespace {

// d = z on a small lattice: the plane z = 0 with the inside at z > 0.
std::shared_ptr<SampledField> flat_field() {
  auto f = std::make_shared<SampledField>();
  f->dims = {21, 21, 21};
  f->origin = Vec3(-0.5, -0.5, -0.5);
  f->spacing = 0.05;
  for (int k = 0; k < 21; ++k)
    for (int j = 0; j < 21; ++j)
      for (int i = 0; i < 21; ++i) {
        Vec3 x = f->node(i, j, k);
        f->dist.push_back(x[2]);
        f->proj.insert(f->proj.end(), {x[0], x[1], 0.0});
      }
  return f;
}

// Principal curvatures of the torus at tube angle theta, outward normal.
std::pair<double, double> torus_curvatures(double R1, double R2, double theta) {
  double a = std::cos(theta) / (R1 + R2 * std::cos(theta));
  double b = 1 / R2;
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace

TEST_CASE("signed distance hand values") {
  Vec3 C = fixture_center();
  auto s = ImplicitSurface::sphere(C, 0.7);
  CHECK(s.distance(C) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(std::abs(s.distance(C + Vec3(0, 0.7, 0))) < 1e-15);
  CHECK(s.distance(C + Vec3(0, 0, 1.0)) == doctest::Approx(-0.3).epsilon(1e-14));

  auto t = ImplicitSurface::torus(Vec3::Zero(), 0.7, 0.2);
  CHECK(t.distance(Vec3(0.7, 0, 0.1)) == doctest::Approx(0.1).epsilon(1e-14));
  Vec3 p = t.closest_point(Vec3(0.7, 0, 0.1));
  CHECK((p - Vec3(0.7, 0, 0.2)).norm() < 1e-14);
}

TEST_CASE("closest point on sphere is radial") {
  Vec3 C = fixture_center();
  auto s = ImplicitSurface::sphere(C, 0.7);
  Vec3 p = s.closest_point(C + Vec3(0.35, 0, 0));
  CHECK((p - (C + Vec3(0.7, 0, 0))).norm() < 1e-14);
  CHECK_THROWS_AS(s.closest_point(C), AmbiguityError);
}

TEST_CASE("torus with identity rotation matches untilted torus") {
  auto a = ImplicitSurface::torus(Vec3::Zero(), 0.7, 0.2);
  auto b = ImplicitSurface::torus(Vec3::Zero(), 0.7, 0.2, Mat3::Identity());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int i = 0; i < 50; ++i) {
    Vec3 x(u(rng), u(rng), 0.3 * u(rng));
    if (std::abs(a.distance(x)) > 0.15) continue;
    CHECK(a.distance(x) == b.distance(x));
    CHECK((a.closest_point(x) - b.closest_point(x)).norm() == 0.0);
  }
  CHECK_THROWS_AS(ImplicitSurface::torus(Vec3::Zero(), 0.2, 0.7), ParameterError);
  CHECK_THROWS_AS(ImplicitSurface::torus(Vec3::Zero(), 0.7, 0.2, 2 * Mat3::Identity()), ParameterError);
}

TEST_CASE("projection consistency on tube probes") {
  std::vector<ImplicitSurface> surfaces{sphere_fixture(), torus_fixture()};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& s : surfaces) {
    auto box = s.bounding_box();
    int tested = 0;
    while (tested < 200) {
      Vec3 x;
      for (int c = 0; c < 3; ++c) x[c] = box.first[c] + (box.second[c] - box.first[c]) * 0.5 * (u(rng) + 1);
      double d = s.distance(x);
      if (std::abs(d) > 0.15) continue;
      ++tested;
      Vec3 p = s.closest_point(x);
      CHECK(std::abs((x - p).norm() - std::abs(d)) < 1e-12);
      CHECK(std::abs(s.distance(p)) < 1e-10);
      CHECK((s.closest_point(p) - p).norm() < 1e-10);
      // P = x - d grad d
      CHECK((x - d * s.gradient(x) - p).norm() < 1e-12);
    }
  }
}

TEST_CASE("bounding box contains the surface") {
  auto t = torus_fixture();
  auto box = t.bounding_box();
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      Vec3 p = t.torus_point(2 * kPi * i / 64, 2 * kPi * j / 64);
      for (int c = 0; c < 3; ++c) {
        CHECK(p[c] >= box.first[c] - 1e-12);
        CHECK(p[c] <= box.second[c] + 1e-12);
      }
    }
}

TEST_CASE("sphere frame and curvature transfer") {
  Vec3 C = fixture_center();
  auto s = ImplicitSurface::sphere(C, 0.7);
  Vec3 dir = Vec3(0.3, -0.5, 0.8).normalized();
  Vec3 x = C + 0.6 * dir;  // 0.1 inside
  LocalFrame f = hessian_frame(s, x);
  CHECK(f.level_kbar1 == doctest::Approx(1 / 0.6).epsilon(1e-12));
  CHECK(f.level_kbar2 == doctest::Approx(1 / 0.6).epsilon(1e-12));
  CHECK(std::abs(f.kappa1 - 1 / 0.7) < 1e-10);
  CHECK(std::abs(f.kappa2 - 1 / 0.7) < 1e-10);
  CHECK((f.n - dir).norm() < 1e-12);
  CHECK((f.base - (C + 0.7 * dir)).norm() < 1e-12);
  CHECK(jacobian_eta(f, 0.1) == doctest::Approx(std::pow(7.0 / 6.0, 2)).epsilon(1e-13));
}

TEST_CASE("torus frame curvatures") {
  auto t = ImplicitSurface::torus(Vec3::Zero(), 0.7, 0.2);
  LocalFrame f = hessian_frame(t, Vec3(0.9, 0, 0));
  CHECK(std::abs(f.kappa1 - 1 / 0.9) < 1e-10);
  CHECK(std::abs(f.kappa2 - 5.0) < 1e-10);

  auto tf = torus_fixture();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), off(-0.15, 0.15);
  for (int i = 0; i < 100; ++i) {
    double th = ang(rng), ph = ang(rng);
    Vec3 p = tf.torus_point(th, ph);
    Vec3 n = tf.normal(p);
    Vec3 x = p - off(rng) * n;
    LocalFrame fr = hessian_frame(tf, x);
    auto [k1, k2] = torus_curvatures(0.7, 0.2, th);
    CHECK(std::abs(fr.kappa1 - k1) < 1e-10);
    CHECK(std::abs(fr.kappa2 - k2) < 1e-10);
    CHECK(fr.kappa1 <= fr.kappa2);
    CHECK(std::abs(fr.n.norm() - 1) < 1e-12);
    CHECK(std::abs(fr.tau1.dot(fr.n)) < 1e-10);
    CHECK(std::abs(fr.tau2.dot(fr.n)) < 1e-10);
    CHECK(std::abs(fr.tau1.dot(fr.tau2)) < 1e-10);
    CHECK((fr.tau1.cross(fr.tau2) - fr.n).norm() < 1e-10);
  }
}

TEST_CASE("principal directions are constant along normals") {
  auto tf = torus_fixture();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ang(0, 2 * kPi);
  for (int i = 0; i < 50; ++i) {
    Vec3 p = tf.torus_point(ang(rng), ang(rng));
    Vec3 n = tf.normal(p);
    LocalFrame a = hessian_frame(tf, p + 0.08 * n);
    LocalFrame b = hessian_frame(tf, p - 0.12 * n);
    CHECK((a.base - b.base).norm() < 1e-8);
    CHECK(std::abs(a.kappa1 - b.kappa1) < 1e-8);
    CHECK(std::abs(a.kappa2 - b.kappa2) < 1e-8);
    CHECK(std::abs(std::abs(a.tau1.dot(b.tau1)) - 1) < 1e-8);
    CHECK(std::abs(std::abs(a.tau2.dot(b.tau2)) - 1) < 1e-8);
  }
}

TEST_CASE("flat sampled field") {
  auto s = ImplicitSurface::sampled(flat_field(), 0.2);
  Vec3 x(0.013, -0.021, 0.04);
  LocalFrame f = hessian_frame(s, x);
  CHECK(std::abs(f.kappa1) < 1e-8);
  CHECK(std::abs(f.kappa2) < 1e-8);
  CHECK(std::abs(std::abs(f.n[2]) - 1) < 1e-10);
  CHECK(f.n[2] < 0);  // outward is -grad d
  CHECK(std::abs(jacobian_fd(s, x, 0.01) - 1) <= 1e-10);
  CHECK_THROWS_AS(s.distance(Vec3(2, 0, 0)), DomainError);
}

TEST_CASE("jacobian_eta identities") {
  CHECK(jacobian_eta(3.0, -2.0, 0.0) == 1.0);
  CHECK(jacobian_eta(0.0, 0.0, 0.07) == 1.0);
  CHECK(jacobian_eta(0.0, 0.0, -0.07) == 1.0);
  double R = 0.7;
  for (double eta : {-0.15, -0.05, 0.0, 0.05, 0.1, 0.15}) {
    double kb = 1 / (R - eta);
    CHECK(std::abs(jacobian_eta(kb, kb, eta) - std::pow(R / (R - eta), 2)) < 1e-12);
  }
  CHECK_THROWS_AS(jacobian_eta(1.0, 1.0, 0.3, 0.2), ValidityError);
}

TEST_CASE("finite difference jacobian") {
  Vec3 C = fixture_center();
  auto s = ImplicitSurface::sphere(C, 0.7);
  Vec3 x = C + 0.6 * Vec3(0.2, 0.9, -0.4).normalized();
  CHECK(std::abs(jacobian_fd(s, x, 1e-3) - s.level_set_jacobian(x)) <= 1e-8);

  auto tf = torus_fixture();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), off(-0.1, 0.1);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    Vec3 p = tf.torus_point(ang(rng), ang(rng));
    Vec3 y = p - off(rng) * tf.normal(p);
    worst = std::max(worst, std::abs(jacobian_fd(tf, y, 1e-3) - tf.level_set_jacobian(y)));
  }
  CHECK(worst <= 1e-6);

  // Order under halving on a fixed torus node.
  Vec3 y = tf.torus_point(1.1, 2.3);
  y -= 0.07 * tf.normal(y);
  std::vector<double> hs{0.04, 0.02, 0.01}, errs;
  for (double h : hs) errs.push_back(std::abs(jacobian_fd(tf, y, h) - tf.level_set_jacobian(y)));
  CHECK(testutil::slope(hs, errs) >= 3.5);
}

TEST_CASE("sampled field file round trip and interpolation") {
  auto tf = torus_fixture();
  SampledField f = sample_surface(tf, 0.02, 0.15);
  auto path = std::filesystem::temp_directory_path() / "ibiq_field_test.bin";
  f.write(path.string());
  SampledField g = SampledField::read(path.string());
  std::filesystem::remove(path);
  CHECK(g.dims == f.dims);
  CHECK(g.spacing == f.spacing);
  CHECK((g.origin - f.origin).norm() == 0.0);
  REQUIRE(g.dist.size() == f.dist.size());
  for (std::size_t i = 0; i < f.dist.size(); ++i) {
    bool same = f.dist[i] == g.dist[i];
    CHECK(same);
  }
  // Tricubic interpolation: fourth order in the spacing.
  SampledField coarse = sample_surface(tf, 0.04, 0.2);
  std::vector<double> spacings{0.04, 0.02}, worst;
  for (const SampledField* src : {&coarse, &g}) {
    auto s = ImplicitSurface::sampled(std::make_shared<SampledField>(*src), 0.19);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ang(0, 2 * kPi), off(-0.1, 0.1);
    double w = 0;
    for (int i = 0; i < 50; ++i) {
      Vec3 p = tf.torus_point(ang(rng), ang(rng));
      Vec3 y = p - off(rng) * tf.normal(p);
      w = std::max(w, std::abs(s.distance(y) - tf.distance(y)));
    }
    worst.push_back(w);
  }
  MESSAGE("field interpolation errors " << worst[0] << " " << worst[1]);
  CHECK(worst[1] < 5e-5);
  CHECK(testutil::slope(spacings, worst) >= 3.5);
}

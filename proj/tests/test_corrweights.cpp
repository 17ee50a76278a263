#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <filesystem>

#include "ibiq/corrweights.hpp"
#include "ibiq/errors.hpp"
#include "test_util.hpp"

using namespace ibiq;
using testutil::kPi;

namespace {

// -4 zeta(1/2) beta(1/2), the aligned punctured-rule weight for 1/r.
constexpr double kAlignedInvR = 3.900264920001956;
// Gamma(9/8); the tail beyond 1.9 is below exp(-169).
constexpr double kRadialIntegral = 0.9417426998497015;

const WeightTable& fixture_table() {
  static const WeightTable t = WeightTable::read(IBIQ_WEIGHTS_FILE);
  return t;
}

double g8(const Vec2& y) { return std::exp(-std::pow(y.squaredNorm(), 4)); }

// Integral of s(y - x0) v(y) in polar coordinates about x0, for s = 1/r.
double polar_reference_inv_r(const std::function<double(const Vec2&)>& v, const Vec2& x0, double rmax) {
  const int M = 512;
  double total = 0;
  for (int i = 0; i < M; ++i) {
    double psi = 2 * kPi * i / M;
    Vec2 e(std::cos(psi), std::sin(psi));
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double r) { return v(x0 + r * e); }, 0, rmax, 15, 1e-14);
  }
  return total * 2 * kPi / M;
}

}  // namespace

TEST_CASE("punctured lattice sum") {
  auto zero = [](const Vec2&) { return 0.0; };
  CHECK(punctured_tr_2d(zero, 0.1, {0, 0}, Vec2::Zero(), 2.0) == 0.0);

  double h = 0.1;
  double full = punctured_tr_2d(g8, h, {100000, 0}, Vec2::Zero(), 2.0);
  double punct = punctured_tr_2d(g8, h, {0, 0}, Vec2::Zero(), 2.0);
  CHECK(punct == doctest::Approx(full - h * h * g8(Vec2::Zero())).epsilon(1e-15));

  // Brute-force square sum.
  long double brute = 0;
  for (int i = -30; i <= 30; ++i)
    for (int j = -30; j <= 30; ++j)
      if (i || j) brute += g8(Vec2(i * h, j * h));
  CHECK(std::abs(punct - static_cast<double>(brute) * h * h) < 1e-10);
}

TEST_CASE("exact basis integrals") {
  CHECK(exact_basis_integral({Parity::Cos, 1}) == 0.0);
  CHECK(exact_basis_integral({Parity::Sin, 3}) == 0.0);
  CHECK(std::abs(test_integral_radial() - kRadialIntegral) < 1e-14);
  CHECK(std::abs(test_integral_radial() - std::tgamma(1.125)) < 1e-14);
  CHECK(exact_basis_integral({Parity::Cos, 0}) == doctest::Approx(2 * kPi * kRadialIntegral).epsilon(1e-15));
}

TEST_CASE("finite-delta weights") {
  for (int j = 1; j <= 4; ++j) CHECK(std::abs(weight_delta({Parity::Sin, j}, {0, 0}, 0.05)) < 1e-12);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.49, 0.49);
  for (int t = 0; t < 5; ++t) {
    ShiftParams s{u(rng), u(rng)}, m{-s.alpha, -s.beta};
    auto a = weight_delta_all(4, s, 0.1);
    auto b = weight_delta_all(4, m, 0.1);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(a[i] == doctest::Approx(weight_delta(basis_at(static_cast<int>(i), 4), s, 0.1)).epsilon(1e-12));
  }
}

TEST_CASE("weight limits") {
  double w = weight_limit({Parity::Cos, 0}, {0, 0}, 1e-10);
  CHECK(std::abs(w - kAlignedInvR) < 1e-8);
  double coarse = weight_limit({Parity::Cos, 0}, {0, 0}, 1e-8);
  CHECK(std::abs(w - coarse) < 1e-8);

  WeightLimitOptions half;
  half.delta0 = 0.1;
  ShiftParams s{0.31, -0.12};
  double a = weight_limit({Parity::Cos, 2}, s, 1e-9);
  double b = weight_limit({Parity::Cos, 2}, s, 1e-9, half);
  CHECK(std::abs(a - b) < 1e-9);

  for (double beta : {-0.4, 0.1, 0.37})
    for (int j : {1, 3}) CHECK(std::abs(weight_limit({Parity::Sin, j}, {0, beta}, 1e-9)) < 1e-9);

  WeightLimitOptions stingy;
  stingy.max_iterations = 1;
  CHECK_THROWS_AS(weight_limit({Parity::Cos, 0}, {0.2, 0.1}, 1e-14, stingy), ConvergenceError);
}

TEST_CASE("small table symmetries and file round trip") {
  WeightTable t = tabulate(3, 7, 1e-9);
  CHECK(t.basis_count() == 7);
  CHECK(t.values.size() == 7u * 7 * 7);
  CHECK(t.shift_at(0) == -0.5);
  CHECK(t.shift_at(6) == 0.5);
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b) {
      double v = t.at(0, a, b);
      CHECK(std::abs(v - t.at(0, b, a)) < 1e-8);
      CHECK(std::abs(v - t.at(0, 6 - a, b)) < 1e-8);
      CHECK(std::abs(v - t.at(0, a, 6 - b)) < 1e-8);
    }
  // Direct limits at images of the fundamental domain.
  auto direct = weight_limit_all(3, {t.shift_at(1), t.shift_at(5)}, 1e-9);
  for (int i = 0; i < 7; ++i) CHECK(std::abs(t.at(i, 1, 5) - direct[i]) < 1e-8);
  auto mirrored = weight_limit_all(3, {t.shift_at(5), t.shift_at(1)}, 1e-9);
  for (int i = 0; i < 7; ++i) CHECK(std::abs(t.at(i, 5, 1) - mirrored[i]) < 1e-8);

  auto path = std::filesystem::temp_directory_path() / "ibiq_small_table.bin";
  t.write(path.string());
  WeightTable r = WeightTable::read(path.string());
  std::filesystem::remove(path);
  CHECK(r.N == 3);
  CHECK(r.Nab == 7);
  CHECK(r.tol == 1e-9);
  CHECK(r.test_function_id == 1);
  CHECK(r.values == t.values);
  CHECK_THROWS_AS(tabulate(3, 8, 1e-9), ParameterError);
}

TEST_CASE("fourier coefficients") {
  int N = 6;
  auto psi = fourier_nodes(N);
  REQUIRE(psi.size() == 13u);
  FourierCoeffs ones = fourier_coeffs(std::vector<double>(13, 1.0));
  CHECK(ones.c[0] == doctest::Approx(1.0));
  for (int j = 1; j <= N; ++j) {
    CHECK(std::abs(ones.c[j]) < 1e-14);
    CHECK(std::abs(ones.d[j]) < 1e-14);
  }
  std::vector<double> s;
  for (double p : psi) s.push_back(std::cos(2 * p));
  FourierCoeffs c = fourier_coeffs(s);
  CHECK(std::abs(c.c[1] - 1) < 1e-12);
  for (int j = 0; j <= N; ++j) {
    if (j != 1) CHECK(std::abs(c.c[j]) < 1e-12);
    if (j > 0) CHECK(std::abs(c.d[j]) < 1e-12);
  }
  // Smooth pi-periodic profile: off-node error shrinks with N.
  auto prof = [](double p) { return 1 / std::sqrt(1 + 0.6 * std::sin(p) * std::sin(p)) + 0.3 * std::cos(2 * p); };
  double prev = 1e300;
  for (int n : {4, 8, 16}) {
    std::vector<double> smp;
    for (double p : fourier_nodes(n)) smp.push_back(prof(p));
    FourierCoeffs fc = fourier_coeffs(smp);
    for (std::size_t i = 0; i < smp.size(); ++i)
      CHECK(std::abs(fc.evaluate(fourier_nodes(n)[i]) - smp[i]) < 1e-10);
    double worst = 0;
    for (int i = 0; i < 200; ++i) worst = std::max(worst, std::abs(fc.evaluate(0.0157 * i + 0.003) - prof(0.0157 * i + 0.003)));
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("interpolation on a synthetic table") {
  WeightTable t;
  t.N = 1;
  t.Nab = 11;
  t.values.assign(3 * 11 * 11, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 11; ++a)
      for (int b = 0; b < 11; ++b) t.at(i, a, b) = 2.0 - 3.0 * t.shift_at(a) + (i + 1) * t.shift_at(b);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 30; ++k) {
    double a = u(rng), b = u(rng);
    CHECK(interp_weight(t, {Parity::Cos, 1}, {a, b}) == doctest::Approx(2 - 3 * a + 2 * b).epsilon(1e-13));
  }
  CHECK(interp_weight(t, {Parity::Sin, 1}, {t.shift_at(3), t.shift_at(7)}) == t.at(2, 3, 7));
  // compose is linear in the coefficients.
  FourierCoeffs c;
  c.c = {1.0, 0.5};
  c.d = {0.0, -2.0};
  FourierCoeffs c3 = c;
  for (auto& v : c3.c) v *= 3;
  for (auto& v : c3.d) v *= 3;
  ShiftParams s{0.12, -0.33};
  CHECK(compose_weight(t, c3, s) == doctest::Approx(3 * compose_weight(t, c, s)).epsilon(1e-14));
}

TEST_CASE("fixture table") {
  const WeightTable& t = fixture_table();
  CHECK(t.basis_count() == 45);
  CHECK(t.Nab == 101);
  CHECK(t.values.size() == 45u * 101 * 101);
  int mid = 50;
  CHECK(std::abs(t.at(0, mid, mid) - kAlignedInvR) < 1e-8);
  // The largest entry, recomputed from scratch.
  std::size_t arg = 0;
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    CHECK(std::isfinite(t.values[i]));
    if (std::abs(t.values[i]) > std::abs(t.values[arg])) arg = i;
  }
  int nb = static_cast<int>(arg / (101 * 101)), ia = static_cast<int>(arg / 101 % 101), ib = static_cast<int>(arg % 101);
  REQUIRE(t.at(nb, ia, ib) == t.values[arg]);
  double direct = weight_limit(basis_at(nb, 22), {t.shift_at(ia), t.shift_at(ib)}, 1e-10);
  MESSAGE("largest weight " << t.values[arg] << " basis " << nb);
  CHECK(std::abs(t.values[arg] - direct) < 1e-7);

  // Node reproduction, midpoint accuracy, and the profile check.
  CHECK(interp_weight(t, {Parity::Cos, 5}, {t.shift_at(17), t.shift_at(80)}) == t.at(5, 17, 80));
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> cell(0, 99);
  for (int k = 0; k < 5; ++k) {
    ShiftParams s{t.shift_at(cell(rng)) + 0.005, t.shift_at(cell(rng)) + 0.005};
    double direct = weight_limit({Parity::Cos, 0}, s, 1e-10);
    CHECK(std::abs(interp_weight(t, {Parity::Cos, 0}, s) - direct) <= 1e-6);
  }
  FourierCoeffs cos2;
  cos2.c.assign(23, 0.0);
  cos2.d.assign(23, 0.0);
  cos2.c[1] = 1.0;
  CHECK(std::abs(compose_weight(t, cos2, {0, 0}) - weight_limit({Parity::Cos, 1}, {0, 0}, 1e-10)) < 1e-7);

  WeightTable half = t.subset(22, 2);
  CHECK(half.Nab == 51);
  CHECK(half.at(7, 10, 20) == t.at(7, 20, 40));
  WeightTable low = t.subset(11, 1);
  CHECK(low.basis_count() == 23);
  CHECK(low.at(11 + 3, 4, 9) == t.at(22 + 3, 4, 9));
}

TEST_CASE("2D corrected rule orders") {
  const WeightTable& t = fixture_table();
  auto v = [](const Vec2& y) { return g8(y); };
  auto inv_r = [](const Vec2& r) { return 1 / r.norm(); };
  double support = kTestSupport;
  // Away from the bump center so v has a gradient at the singularity.
  Vec2 base(0.5, -0.3);

  // Singularity on a node for every h below.
  std::vector<double> hs{0.1, 0.05, 0.025, 0.0125}, errs;
  double ref = polar_reference_inv_r(v, base, base.norm() + support);
  for (double h : hs) {
    double q = corrected_tr_2d(inv_r, v, base, h, t.at(0, 50, 50), Vec2::Zero(), support);
    errs.push_back(std::abs(q - ref));
  }
  double p_aligned = testutil::slope(hs, errs);
  MESSAGE("aligned order " << p_aligned);
  CHECK(p_aligned >= 2.9);

  // Random sub-cell offsets, drawn once and scaled with h, so the
  // singular point stays put while (alpha, beta) stay fixed.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Vec2> offsets;
  for (int k = 0; k < 8; ++k) {
    double a = u(rng);
    offsets.emplace_back(a, u(rng));
  }
  std::vector<double> means;
  for (double h : hs) {
    double acc = 0;
    for (const Vec2& o : offsets) {
      Vec2 xs = base + h * o;
      double w = interp_weight(t, {Parity::Cos, 0}, lattice_shift(xs, h));
      double r = polar_reference_inv_r(v, xs, xs.norm() + support);
      acc += std::abs(corrected_tr_2d(inv_r, v, xs, h, w, Vec2::Zero(), support) - r);
    }
    means.push_back(acc / offsets.size());
  }
  double p_shift = testutil::slope(hs, means);
  MESSAGE("unaligned order " << p_shift);
  CHECK(p_shift >= 1.9);
}

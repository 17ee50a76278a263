#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ibiq {

using Vec2 = Eigen::Vector2d;
using PlaneFunction = std::function<double(const Vec2&)>;

// Fractional offset of a point singularity from its nearest node, in units of h.
struct ShiftParams {
  double alpha = 0;
  double beta = 0;
};

enum class Parity { Cos, Sin };

// cos(2 j psi)/r for j = 0..N, sin(2 j psi)/r for j = 1..N.
struct Basis {
  Parity parity = Parity::Cos;
  int j = 0;
};

// Position of a basis function in tables and coefficient vectors:
// cos j -> j, sin j -> N + j.
inline int basis_index(Basis b, int N) { return b.parity == Parity::Cos ? b.j : N + b.j; }
inline Basis basis_at(int index, int N) {
  return index <= N ? Basis{Parity::Cos, index} : Basis{Parity::Sin, index - N};
}

// Radius beyond which the test function exp(-r^8) is treated as zero.
constexpr double kTestSupport = 1.9;

// Lattice sum spacing^2 * sum f(spacing*m) over m != excluded, restricted to
// |spacing*m - center| <= radius.
double punctured_tr_2d(const PlaneFunction& f, double spacing, const std::array<long, 2>& excluded,
                       const Vec2& center, double radius);

// Integral of basis * exp(-r^8) over the disk of radius kTestSupport.
double exact_basis_integral(Basis b);
double test_integral_radial();  // integral of exp(-r^8) on [0, kTestSupport]

// omega_delta for every basis function up to order N at one shift.
std::vector<double> weight_delta_all(int N, ShiftParams shift, double delta);
double weight_delta(Basis b, ShiftParams shift, double delta);

struct WeightLimitOptions {
  double delta0 = 0.2;
  int max_iterations = 14;
  // Richardson exponent for the final extrapolation step.
  double richardson_order = 8;
};

// Limit delta -> 0 by halving until successive values differ by less than
// tol (maximum over all bases), then one Richardson step.
std::vector<double> weight_limit_all(int N, ShiftParams shift, double tol,
                                     const WeightLimitOptions& opt = {});
double weight_limit(Basis b, ShiftParams shift, double tol, const WeightLimitOptions& opt = {});

struct WeightTable {
  int N = 0;
  int Nab = 0;
  double tol = 0;
  std::uint8_t test_function_id = 1;  // 1: exp(-r^8)
  std::vector<double> values;         // basis-major, then alpha, then beta

  int basis_count() const { return 2 * N + 1; }
  double shift_at(int i) const { return -0.5 + static_cast<double>(i) / (Nab - 1); }
  double& at(int basis, int a, int b) { return values[(static_cast<std::size_t>(basis) * Nab + a) * Nab + b]; }
  double at(int basis, int a, int b) const {
    return values[(static_cast<std::size_t>(basis) * Nab + a) * Nab + b];
  }

  // Table restricted to Fourier order n and every `stride`-th shift sample.
  WeightTable subset(int n, int stride) const;

  void write(const std::string& path) const;
  static WeightTable read(const std::string& path);
};

// Fills the table from the fundamental domain 0 <= beta <= alpha <= 1/2 using
// the reflection and diagonal symmetries of the lattice.
WeightTable tabulate(int N, int Nab, double tol, const WeightLimitOptions& opt = {});

// Tensor-product quintic Lagrange interpolation, 6x6 stencil clamped at the edges.
double interp_weight(const WeightTable& table, Basis b, ShiftParams shift);

struct FourierCoeffs {
  std::vector<double> c;  // c[0..N]
  std::vector<double> d;  // d[1..N], d[0] unused
  int order() const { return static_cast<int>(c.size()) - 1; }
  double evaluate(double psi) const;
};

// Coefficients of c0 + sum c_j cos(2 j psi) + d_j sin(2 j psi) interpolating
// samples at psi_i = i*pi/(2N+1).
FourierCoeffs fourier_coeffs(const std::vector<double>& samples);
// Sample angles used by fourier_coeffs.
std::vector<double> fourier_nodes(int N);

double compose_weight(const WeightTable& table, const FourierCoeffs& coeffs, ShiftParams shift);

// 2D corrected rule for s(y - x0) v(y): punctured lattice sum plus
// h*weight*v at the node nearest x0. Lattice is h*Z^2.
double corrected_tr_2d(const PlaneFunction& s, const PlaneFunction& v, const Vec2& x0, double h,
                       double weight, const Vec2& support_center, double support_radius);
// Shift of x0 relative to its nearest node of h*Z^2 and that node's index.
ShiftParams lattice_shift(const Vec2& x0, double h, std::array<long, 2>* node = nullptr);

}  // namespace ibiq

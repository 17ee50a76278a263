#include "ibiq/corrweights.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ibiq/binary_io.hpp"
#include "ibiq/errors.hpp"
#include "ibiq/parallel.hpp"

namespace ibiq {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr char kMagic[8] = {'I', 'B', 'I', 'Q', 'W', 'T', '0', '1'};

// Error-free transformation accumulator, branch-free.
struct TwoSum {
  double s = 0, c = 0;
  void add(double x) {
    double t = s + x;
    double z = t - s;
    c += (s - (t - z)) + (x - z);
    s = t;
  }
  double value() const { return s + c; }
};

struct Stencil {
  int start[2];
  double w[2][6];
};

void quintic_weights(double u, int n_samples, int& start, double* w) {
  // Shifts that are samples up to rounding reproduce the table exactly.
  double nearest = std::round(u);
  if (std::abs(u - nearest) < 1e-9) u = nearest;
  int i = static_cast<int>(std::floor(u));
  start = std::clamp(i - 2, 0, n_samples - 6);
  for (int k = 0; k < 6; ++k) {
    double num = 1, den = 1;
    for (int m = 0; m < 6; ++m) {
      if (m == k) continue;
      num *= u - (start + m);
      den *= k - m;
    }
    w[k] = num / den;
  }
}

Stencil make_stencil(const WeightTable& t, ShiftParams shift) {
  if (t.Nab < 6) throw ParameterError("weight table needs at least 6 shift samples per axis");
  Stencil st;
  double step = 1.0 / (t.Nab - 1);
  quintic_weights((shift.alpha + 0.5) / step, t.Nab, st.start[0], st.w[0]);
  quintic_weights((shift.beta + 0.5) / step, t.Nab, st.start[1], st.w[1]);
  return st;
}

double apply_stencil(const WeightTable& t, int basis, const Stencil& st) {
  double acc = 0;
  for (int a = 0; a < 6; ++a) {
    double row = 0;
    for (int b = 0; b < 6; ++b) row += st.w[1][b] * t.at(basis, st.start[0] + a, st.start[1] + b);
    acc += st.w[0][a] * row;
  }
  return acc;
}

std::vector<double> weight_limit_core(int N, ShiftParams shift, double tol, const WeightLimitOptions& opt,
                                      int watched) {
  if (!(tol > 0)) throw ParameterError("tolerance must be positive");
  double delta = opt.delta0;
  std::vector<double> prev = weight_delta_all(N, shift, delta);
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_iterations; ++it) {
    delta /= 2;
    std::vector<double> cur = weight_delta_all(N, shift, delta);
    residual = 0;
    for (std::size_t b = 0; b < cur.size(); ++b)
      if (watched < 0 || static_cast<int>(b) == watched) residual = std::max(residual, std::abs(cur[b] - prev[b]));
    if (residual < tol) {
      double f = std::pow(2.0, opt.richardson_order);
      for (std::size_t b = 0; b < cur.size(); ++b) cur[b] = (f * cur[b] - prev[b]) / (f - 1);
      return cur;
    }
    prev = std::move(cur);
  }
  throw ConvergenceError("correction weight limit did not converge", residual);
}

}  // namespace

double punctured_tr_2d(const PlaneFunction& f, double spacing, const std::array<long, 2>& excluded,
                       const Vec2& center, double radius) {
  if (!(spacing > 0)) throw ParameterError("spacing must be positive");
  long j0 = static_cast<long>(std::ceil((center[1] - radius) / spacing));
  long j1 = static_cast<long>(std::floor((center[1] + radius) / spacing));
  TwoSum sum;
  for (long j = j0; j <= j1; ++j) {
    double dy = j * spacing - center[1];
    double half = std::sqrt(std::max(0.0, radius * radius - dy * dy));
    long i0 = static_cast<long>(std::ceil((center[0] - half) / spacing));
    long i1 = static_cast<long>(std::floor((center[0] + half) / spacing));
    for (long i = i0; i <= i1; ++i) {
      if (i == excluded[0] && j == excluded[1]) continue;
      sum.add(f(Vec2(i * spacing, j * spacing)));
    }
  }
  return spacing * spacing * sum.value();
}

double test_integral_radial() {
  static const double value = [] {
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate([](double r) { return std::exp(-std::pow(r, 8)); }, 0.0, kTestSupport);
  }();
  return value;
}

double exact_basis_integral(Basis b) {
  return (b.parity == Parity::Cos && b.j == 0) ? 2 * kPi * test_integral_radial() : 0.0;
}

std::vector<double> weight_delta_all(int N, ShiftParams shift, double delta) {
  if (!(delta > 0)) throw ParameterError("delta must be positive");
  if (N < 0) throw ParameterError("Fourier order must be non-negative");
  const int nb = 2 * N + 1;
  std::vector<TwoSum> acc(nb);
  const double x0 = shift.alpha * delta, y0 = shift.beta * delta;
  const double reach = kTestSupport + delta;
  long jmax = static_cast<long>(std::ceil(reach / delta)) + 1;
  for (long j = -jmax; j <= jmax; ++j) {
    double dy = j * delta - y0;
    if (std::abs(dy) > reach) continue;
    double half = std::sqrt(reach * reach - dy * dy);
    long i0 = static_cast<long>(std::ceil((x0 - half) / delta));
    long i1 = static_cast<long>(std::floor((x0 + half) / delta));
    for (long i = i0; i <= i1; ++i) {
      if (i == 0 && j == 0) continue;
      double dx = i * delta - x0;
      double r2 = dx * dx + dy * dy;
      double r = std::sqrt(r2);
      double r4 = r2 * r2;
      double w = std::exp(-r4 * r4) / r;
      acc[0].add(w);
      if (N == 0) continue;
      double c = dx / r, s = dy / r;
      double c2 = c * c - s * s, s2 = 2 * c * s;
      double cj = c2, sj = s2;
      for (int k = 1; k <= N; ++k) {
        acc[k].add(w * cj);
        acc[N + k].add(w * sj);
        double t = cj * c2 - sj * s2;
        sj = cj * s2 + sj * c2;
        cj = t;
      }
    }
  }
  double x2 = x0 * x0 + y0 * y0;
  double g0 = std::exp(-(x2 * x2) * (x2 * x2));
  std::vector<double> out(nb);
  for (int b = 0; b < nb; ++b) {
    double exact = exact_basis_integral(basis_at(b, N));
    out[b] = (exact - delta * delta * acc[b].value()) / (delta * g0);
  }
  return out;
}

double weight_delta(Basis b, ShiftParams shift, double delta) {
  return weight_delta_all(b.j, shift, delta)[basis_index(b, b.j)];
}

std::vector<double> weight_limit_all(int N, ShiftParams shift, double tol, const WeightLimitOptions& opt) {
  return weight_limit_core(N, shift, tol, opt, -1);
}

double weight_limit(Basis b, ShiftParams shift, double tol, const WeightLimitOptions& opt) {
  int idx = basis_index(b, b.j);
  return weight_limit_core(b.j, shift, tol, opt, idx)[idx];
}

WeightTable WeightTable::subset(int n, int stride) const {
  if (n < 0 || n > N) throw ParameterError("subset order exceeds table order");
  if (stride < 1 || (Nab - 1) % stride != 0) throw ParameterError("stride must divide Nab-1");
  WeightTable t;
  t.N = n;
  t.Nab = (Nab - 1) / stride + 1;
  t.tol = tol;
  t.test_function_id = test_function_id;
  t.values.resize(static_cast<std::size_t>(t.basis_count()) * t.Nab * t.Nab);
  for (int b = 0; b < t.basis_count(); ++b) {
    int src = basis_index(basis_at(b, n), N);
    for (int a = 0; a < t.Nab; ++a)
      for (int c = 0; c < t.Nab; ++c) t.at(b, a, c) = at(src, a * stride, c * stride);
  }
  return t;
}

void WeightTable::write(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  os.write(kMagic, 8);
  binio::write_u64(os, basis_count());
  binio::write_u64(os, Nab);
  binio::write_u64(os, Nab);
  binio::write_u64(os, N);
  binio::write_u64(os, Nab);
  binio::write_f64(os, tol);
  os.put(static_cast<char>(test_function_id));
  for (double v : values) binio::write_f64(os, v);
  if (!os) throw Error("write failed: " + path);
}

WeightTable WeightTable::read(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw Error("not a weight table: " + path);
  std::uint64_t d0 = binio::read_u64(is), d1 = binio::read_u64(is), d2 = binio::read_u64(is);
  WeightTable t;
  t.N = static_cast<int>(binio::read_u64(is));
  t.Nab = static_cast<int>(binio::read_u64(is));
  t.tol = binio::read_f64(is);
  int id = is.get();
  if (id < 0) throw Error("truncated weight table: " + path);
  t.test_function_id = static_cast<std::uint8_t>(id);
  if (d0 != static_cast<std::uint64_t>(t.basis_count()) || d1 != static_cast<std::uint64_t>(t.Nab) || d2 != d1)
    throw Error("inconsistent weight table dimensions in " + path);
  t.values.resize(d0 * d1 * d2);
  for (auto& v : t.values) v = binio::read_f64(is);
  return t;
}

WeightTable tabulate(int N, int Nab, double tol, const WeightLimitOptions& opt) {
  if (N < 1) throw ParameterError("Fourier order must be at least 1");
  if (Nab < 7 || Nab % 2 == 0) throw ParameterError("Nab must be odd and at least 7");
  WeightTable t;
  t.N = N;
  t.Nab = Nab;
  t.tol = tol;
  t.values.assign(static_cast<std::size_t>(t.basis_count()) * Nab * Nab, 0.0);
  const int c = (Nab - 1) / 2;

  // Fundamental domain in offsets from the center sample: 0 <= ob <= oa <= c.
  std::vector<std::pair<int, int>> domain;
  for (int oa = 0; oa <= c; ++oa)
    for (int ob = 0; ob <= oa; ++ob) domain.emplace_back(oa, ob);
  std::vector<std::vector<double>> fund(domain.size());
  parallel_for(domain.size(), [&](std::size_t k) {
    auto [oa, ob] = domain[k];
    ShiftParams sp{t.shift_at(c + oa), t.shift_at(c + ob)};
    try {
      fund[k] = weight_limit_all(N, sp, tol, opt);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("weight limit failed at alpha=" + std::to_string(sp.alpha) +
                                 " beta=" + std::to_string(sp.beta) + ": " + e.what(),
                             e.residual);
    }
  });
  auto lookup = [&](int oa, int ob) -> const std::vector<double>& {
    std::size_t k = static_cast<std::size_t>(oa) * (oa + 1) / 2 + ob;
    return fund[k];
  };

  for (int a = 0; a < Nab; ++a)
    for (int b = 0; b < Nab; ++b) {
      int oa = std::abs(a - c), ob = std::abs(b - c);
      bool swap = ob > oa;
      const auto& f = swap ? lookup(ob, oa) : lookup(oa, ob);
      double reflect = (a < c ? -1.0 : 1.0) * (b < c ? -1.0 : 1.0);
      for (int j = 0; j <= N; ++j) {
        double parity = (j % 2 == 0) ? 1.0 : -1.0;
        t.at(j, a, b) = (swap ? parity : 1.0) * f[j];
        if (j > 0) t.at(N + j, a, b) = reflect * (swap ? -parity : 1.0) * f[N + j];
      }
    }
  return t;
}

double interp_weight(const WeightTable& table, Basis b, ShiftParams shift) {
  Stencil st = make_stencil(table, shift);
  return apply_stencil(table, basis_index(b, table.N), st);
}

std::vector<double> fourier_nodes(int N) {
  int M = 2 * N + 1;
  std::vector<double> psi(M);
  for (int i = 0; i < M; ++i) psi[i] = i * kPi / M;
  return psi;
}

FourierCoeffs fourier_coeffs(const std::vector<double>& samples) {
  int M = static_cast<int>(samples.size());
  if (M < 1 || M % 2 == 0) throw ParameterError("need an odd number of samples");
  int N = (M - 1) / 2;
  std::vector<double> cs(M), sn(M);
  for (int k = 0; k < M; ++k) {
    cs[k] = std::cos(2 * kPi * k / M);
    sn[k] = std::sin(2 * kPi * k / M);
  }
  FourierCoeffs fc;
  fc.c.assign(N + 1, 0.0);
  fc.d.assign(N + 1, 0.0);
  double mean = 0;
  for (double v : samples) mean += v;
  fc.c[0] = mean / M;
  for (int j = 1; j <= N; ++j) {
    double a = 0, b = 0;
    for (int i = 0; i < M; ++i) {
      int k = static_cast<int>((static_cast<long>(j) * i) % M);
      a += samples[i] * cs[k];
      b += samples[i] * sn[k];
    }
    fc.c[j] = 2 * a / M;
    fc.d[j] = 2 * b / M;
  }
  return fc;
}

double FourierCoeffs::evaluate(double psi) const {
  double v = c[0];
  for (int j = 1; j <= order(); ++j) v += c[j] * std::cos(2 * j * psi) + d[j] * std::sin(2 * j * psi);
  return v;
}

double compose_weight(const WeightTable& table, const FourierCoeffs& coeffs, ShiftParams shift) {
  int n = coeffs.order();
  if (n > table.N) throw ParameterError("Fourier order exceeds the weight table order");
  Stencil st = make_stencil(table, shift);
  double w = coeffs.c[0] * apply_stencil(table, 0, st);
  for (int j = 1; j <= n; ++j) {
    if (coeffs.c[j] != 0) w += coeffs.c[j] * apply_stencil(table, j, st);
    if (coeffs.d[j] != 0) w += coeffs.d[j] * apply_stencil(table, table.N + j, st);
  }
  return w;
}

ShiftParams lattice_shift(const Vec2& x0, double h, std::array<long, 2>* node) {
  ShiftParams sp;
  double u = x0[0] / h, v = x0[1] / h;
  double mu = std::floor(u + 0.5), mv = std::floor(v + 0.5);
  sp.alpha = u - mu;
  sp.beta = v - mv;
  if (node) *node = {static_cast<long>(mu), static_cast<long>(mv)};
  return sp;
}

double corrected_tr_2d(const PlaneFunction& s, const PlaneFunction& v, const Vec2& x0, double h, double weight,
                       const Vec2& support_center, double support_radius) {
  std::array<long, 2> node{};
  lattice_shift(x0, h, &node);
  auto f = [&](const Vec2& y) { return s(y - x0) * v(y); };
  double bulk = punctured_tr_2d(f, h, node, support_center, support_radius);
  return bulk + h * weight * v(Vec2(node[0] * h, node[1] * h));
}

}  // namespace ibiq

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ibiq/corrquad.hpp"
#include "ibiq/corrweights.hpp"
#include "ibiq/csv.hpp"
#include "ibiq/geometry.hpp"
#include "ibiq/kernels.hpp"
#include "ibiq/tube.hpp"

namespace ibiq {

enum class Method { Punctured, ConstReg, Cappuccio, Corrected };
Method parse_method(const std::string& s);
std::string method_name(Method m);

// eps as a function of h: const:e0, pow:coeff,gamma (coeff*h^gamma), lin:c (c*h).
struct EpsLaw {
  enum class Kind { Const, Power, Linear } kind = Kind::Const;
  double a = 0.1, b = 1;
  double operator()(double h) const;
  std::string str() const;
  static EpsLaw parse(const std::string& s);
};

// Test geometries.
Vec3 fixture_center();
ImplicitSurface sphere_fixture();
ImplicitSurface torus_fixture();
Mat3 torus_fixture_rotation();
// "sphere", "torus" or "field:<path>" (reach from field_reach).
ImplicitSurface make_surface(const std::string& spec, double field_reach = 0.1);

// Torus targets singled out in the experiments, as (theta, phi).
const std::vector<std::array<double, 2>>& highlighted_torus_targets();

struct TargetPoint {
  int id = 0;
  Vec3 x = Vec3::Zero();
  std::vector<double> params;  // (theta, phi) on the torus, unit direction on the sphere
  std::string params_str() const;
};

// Torus: (theta, phi) uniform in [0, 2pi)^2. Sphere: normalized Gaussian triples.
std::vector<TargetPoint> gen_targets(const ImplicitSurface& s, int count, std::uint64_t seed);
TargetPoint torus_target(const ImplicitSurface& s, double theta, double phi, int id = 0);

struct QuadratureConfig {
  std::string surface = "sphere";
  double field_reach = 0.1;
  KernelKind kernel = KernelKind::DL;
  std::vector<Method> methods{Method::Corrected};
  std::vector<double> hs;
  EpsLaw eps;
  double r0_coeff = 2;
  int targets = 20;
  std::uint64_t seed = 7;
  std::string weights_path;
  JacobianMode jacobian = JacobianMode::Default;
  Vec3 lattice_origin = Vec3::Zero();
  // Explicit targets override generated ones when non-empty.
  std::vector<TargetPoint> explicit_targets;
  bool verbose = false;

  // Throws ParameterError / ValidityError on a bad h list or eps law.
  void validate(const ImplicitSurface& s) const;
};

struct ConvergenceRecord {
  double h = 0;
  double eps = 0;
  int target_id = 0;
  std::string target_params;
  std::string method;
  double value = 0;
  double error = 0;  // |Q - exact|
  double wall_time = 0;
  std::string status = "ok";  // "ok" or the error message
};

struct MethodSummary {
  std::string method;
  std::vector<double> hs;
  std::vector<double> mean_error;
  double fitted_order = 0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRecord> records;
  std::vector<MethodSummary> summaries;
  const MethodSummary& summary(Method m) const;
};

// Exact value of the layer potential of density 1, when known.
std::optional<double> exact_constant_density(const ImplicitSurface& s, KernelKind kind);

// Least-squares slope of log(err) against log(h); non-positive errors are skipped.
double fitted_order(const std::vector<double>& hs, const std::vector<double>& errors);

// Evaluates one method at one target on a prepared tube.
double evaluate_method(Method m, KernelKind kind, const TubeGrid& tube, const ImplicitSurface& s,
                       const Vec3& target, const Density& density, const WeightTable* table, double r0_coeff,
                       int axis = -1);

ConvergenceResult convergence_run(const QuadratureConfig& cfg, const ImplicitSurface& s,
                                  const WeightTable* table);
ConvergenceResult convergence_run(const QuadratureConfig& cfg);

struct WeightStudyRow {
  int N = 0;
  int Nab = 0;
  double mean_error = 0;
};
// Same evaluation with the full table and its (N, Nab/2) and (N/2, Nab) subsets.
std::vector<WeightStudyRow> weight_resolution_study(const QuadratureConfig& cfg, const ImplicitSurface& s,
                                                    const WeightTable& full);

struct PlaneRecord {
  int k = 0;
  double z = 0;
  double alpha = 0, beta = 0;                   // from the plane singularity
  double alpha_formula = 0, beta_formula = 0;  // fractional-part formula in z
  double eta = 0;
  bool corrected = false;
  double quad = 0;       // per-plane 2D corrected sum
  double reference = 0;  // adaptive polar reference
  double error = 0;      // quad - reference
  double scaled = 0;     // error / h^2
  bool flagged = false;
};

struct PlaneDiagnostics {
  double h = 0, eps = 0;
  std::vector<PlaneRecord> planes;
  double mean_scaled = 0, max_abs_scaled = 0, variance_scaled = 0;
  double D = 0;  // h * sum of scaled errors
};

struct ReferenceOptions {
  double tol = 1e-11;
  int min_angles = 256;
  int max_angles = 16384;
};

// Reference for the integral of the restricted integrand over plane z
// (permuted coordinates) in polar coordinates about the plane singular point.
double plane_reference(KernelKind kind, const TargetContext& ctx, double z, double eps, const Density& density,
                       const ReferenceOptions& opt, bool* converged = nullptr);

PlaneDiagnostics plane_diagnostics(KernelKind kind, const TargetContext& ctx, const TubeGrid& tube,
                                   const WeightTable& table, const Density& density,
                                   const ReferenceOptions& opt = {});

// CSV plumbing.
CsvTable records_table(const std::vector<ConvergenceRecord>& records);
std::vector<ConvergenceRecord> records_from_table(const CsvTable& t);
void emit_csv(const std::vector<ConvergenceRecord>& records, const std::string& path);
CsvTable summary_table(const std::vector<MethodSummary>& summaries);
CsvTable planes_table(const PlaneDiagnostics& diag);

}  // namespace ibiq

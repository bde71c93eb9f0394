#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chirocool/dynamics.hpp"
#include "chirocool/io.hpp"
#include "chirocool/model.hpp"

namespace chirocool::sweep {

enum class AxisKind {
  kGammaROverGamma,   ///< gamma_r / (gamma_r + gamma_l), guided total held fixed
  kOmega1,            ///< target drive; other drives keep their ratio to it
  kOmega2OverOmega1,  ///< every refrigerant drive relative to the target drive
  kXi,                ///< inter-trap phase, radians
  kBeta,              ///< guided fraction with Gamma held fixed
  kNIons,
};

const char* axis_name(AxisKind kind);
AxisKind parse_axis(const std::string& name);

struct Axis {
  AxisKind kind = AxisKind::kGammaROverGamma;
  double lo = 0.0;
  double hi = 1.0;
  int points = 41;
  bool log_scale = false;

  std::vector<double> values() const;
};

enum class ObservableKind {
  kNtilde,      ///< ntilde_i
  kN,           ///< n_i
  kReCst,       ///< Re C_st of ions 1 and 2
  kRate,        ///< W_i from the exponential fit
  kNtildeMin,   ///< global minimum of ntilde_1 over (beta, gamma_r/gamma)
};

struct Observable {
  ObservableKind kind = ObservableKind::kNtilde;
  int ion = 1;

  std::string name() const;
  static Observable parse(const std::string& name);
};

enum class SolverKind { kFullSteady, kReduced, kDynamicsFit };

const char* solver_name(SolverKind kind);
SolverKind parse_solver(const std::string& name);

struct DynamicsSettings {
  double n0 = 0.7;
  int n_max = 4;
  /// 0 picks 3.6 / W_est with W_est = min_i min((eta Omega_i)^2 / Gamma, Gamma / 4).
  double t_end = 0.0;
  int samples = 401;
  Integrator integrator = Integrator::kKrylov;
};

struct SweepSpec {
  std::string name = "custom";
  ChainConfig base;
  Axis axis1;
  std::optional<Axis> axis2;
  std::vector<Observable> observables;
  SolverKind solver = SolverKind::kFullSteady;
  DynamicsSettings dynamics;
  int min_search_grid = 50;

  Json to_json() const;
  std::string hash() const { return content_hash(to_json()); }
};

/// Inverse of SweepSpec::to_json; errors name the offending key.
SweepSpec spec_from_json(const Json& j);

/// Throws InvalidArgument when an axis leaves the physical range of its
/// parameter or an observable does not fit the solver.
void validate_spec(const SweepSpec& spec);

/// Base config with both axis values applied.
ChainConfig configure_point(const SweepSpec& spec, double x1, double x2);

struct CellValue {
  double value = 0.0;
  std::string status = "ok";  ///< "ok" or "error: <reason>"

  bool ok() const noexcept { return status == "ok"; }
};

struct SweepCell {
  double x1 = 0.0;
  double x2 = 0.0;  ///< NaN for one-dimensional sweeps
  std::vector<CellValue> values;  ///< one per requested observable
  double residual = 0.0;          ///< steady residual or fit rms; NaN when not applicable
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;  ///< axis1 outer, axis2 inner
  std::string spec_hash;
  std::string version;

  int rows() const { return spec.axis1.points; }
  int cols() const { return spec.axis2 ? spec.axis2->points : 1; }
  const SweepCell& at(int i, int j) const { return cells[static_cast<std::size_t>(i * cols() + j)]; }
};

/// Evaluates every grid point with `jobs` workers (0 uses all cores). Point
/// failures are stored in the cell; results do not depend on `jobs`.
SweepResult run_grid(const SweepSpec& spec, int jobs = 0);

std::vector<std::string> preset_names();
SweepSpec figure_preset(const std::string& name);

/// Long format: axis1,axis2,observable,value,status.
void write_csv(std::ostream& out, const SweepResult& result);
Json to_json(const SweepResult& result);
/// Heat map (2-D) or line plot (1-D) of one observable.
void write_svg(std::ostream& out, const SweepResult& result, std::size_t observable = 0);

}  // namespace chirocool::sweep

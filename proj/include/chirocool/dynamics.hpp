#pragma once

#include <iosfwd>
#include <vector>

#include "chirocool/core.hpp"
#include "chirocool/liouvillian.hpp"
#include "chirocool/model.hpp"
#include "chirocool/steady_state.hpp"

namespace chirocool {

/// Unnormalized thermal weights n0^n / (n0+1)^(n+1) for n = 0..n_max.
std::vector<double> thermal_weights(double n0, int n_max);

/// Trace of the truncated N-ion thermal product before renormalization.
double thermal_trace(double n0, int n_max, int n_ions);

/// Product over ions of sum_n p_n |g,n><g,n|, renormalized to unit trace.
DensityMatrix thermal_state(double n0, int n_max, int n_ions);

enum class Integrator {
  kRungeKutta,  ///< adaptive Dormand-Prince 5(4)
  kKrylov,      ///< Arnoldi approximation of exp(tL) with local error control
};

struct EvolveOptions {
  Integrator integrator = Integrator::kRungeKutta;
  double rtol = 1e-9;
  double atol = 1e-12;
  int krylov_dim = 30;
  long max_steps = 50'000'000;
  /// Allowed |Tr rho - 1| and ||rho - rho^+||_F; exceeding either throws.
  double drift_tolerance = 1e-8;
  /// Keep the full state at every k-th output time (0 keeps none).
  int snapshot_stride = 0;
  /// Normalize n_i by the single-ion steady reference (NaN for undriven ions).
  bool compute_ntilde = true;
};

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  long applications = 0;  ///< generator evaluations
  double max_trace_drift = 0.0;
  double max_hermiticity_drift = 0.0;
};

struct Trajectory {
  std::vector<double> times;               ///< strictly increasing, 1/nu
  std::vector<std::vector<double>> n;      ///< n[ion][k]
  std::vector<std::vector<double>> ntilde; ///< ntilde[ion][k]
  std::vector<std::vector<double>> excited;
  std::vector<double> reference;           ///< single-ion steady occupation per ion
  std::vector<std::pair<double, Matrix>> snapshots;
  Matrix final_state;
  IntegratorStats stats;

  int n_ions() const noexcept { return static_cast<int>(n.size()); }
};

/// Output grid 0, dt, 2 dt, ..., t_end (t_end always included).
std::vector<double> uniform_grid(double t_end, int points);

/// Integrates d rho/dt = L[rho] from rho0 at times.front() and samples the
/// observables at every output time. No renormalization is applied; drift is
/// tracked in the statistics.
Trajectory evolve(const ChainConfig& config, const DensityMatrix& rho0, const std::vector<double>& times,
                  const EvolveOptions& options = {});

/// Same on a prebuilt generator; ntilde references are taken from `reference`
/// (empty means no normalization).
Trajectory evolve(const Liouvillian& generator, const DensityMatrix& rho0, const std::vector<double>& times,
                  const std::vector<double>& reference, const EvolveOptions& options = {});

/// CSV with columns t, n_1..n_N, ntilde_1..ntilde_N.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace chirocool

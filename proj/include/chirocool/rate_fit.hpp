#pragma once

#include <limits>
#include <optional>

#include "chirocool/dynamics.hpp"

namespace chirocool {

struct FitOptions {
  /// Start of the fit window; points before it belong to the initial transient.
  double t_lo = 0.0;
  double t_hi = std::numeric_limits<double>::infinity();
  /// Required (n(t_end) - n_st) / (n(0) - n_st) for the trajectory to count as converged.
  double tail_fraction = 0.05;
  int max_iterations = 200;

  /// Window starting 5/Gamma after t = 0.
  static FitOptions after_transient(double total_decay) {
    FitOptions o;
    o.t_lo = 5.0 / total_decay;
    return o;
  }
};

/// n_i(t) ~ a exp(-W t) + n_st with n_st held fixed.
struct CoolingRateFit {
  int ion = 1;
  double a = 0.0;
  double rate = 0.0;  ///< W, units of nu
  double n_st = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// False when n_i(t) - n_st rises anywhere inside the window.
  bool monotone = true;
};

/// Least-squares exponential fit on the sampled window, started from the
/// half-decay time. Throws SolverError(kFitFailure) when the trajectory has not
/// decayed far enough or the optimizer does not converge.
CoolingRateFit fit_cooling_rate(const Trajectory& traj, int ion, double n_st, const FitOptions& options = {});

/// First time after the global maximum of ntilde_i at which it falls to 1 and
/// stays there. Excursions up to 1.005 after the crossing are tolerated, and the
/// final value must be below 0.995 so that an asymptote at 1 does not count.
/// The time is linearly interpolated between samples.
std::optional<double> crossing_time(const Trajectory& traj, int ion);

}  // namespace chirocool

#pragma once

#include <optional>
#include <utility>

namespace chirocool::analytic {

// Closed-form steady-state predictions for sideband cooling of a driven target
// ion next to weakly driven refrigerant ions. Everything is first order in
// Gamma^2/nu^2 and eta^2 Omega^2/nu^2, in units with nu = 1.

/// Single-ion occupation (gamma/4)^2 + (eta*omega)^2/8.
double single_ion_nst(double gamma_total, double eta, double omega);

struct TargetOccupation {
  double value;        ///< <n_1>_st
  double single_part;  ///< Gamma^2/16 + eta^2 Omega^2/8
  double chiral_part;  ///< value - single_part
};

/// Target-ion occupation with guided rates gamma_r, gamma_l and nonguided
/// rate gamma_ng. Throws SolverError(kOutOfValidity) when the denominator
/// eta^2 Omega^2 + 2 Gamma^2 - 8 gamma_r gamma_l is not positive.
TargetOccupation target_nst(double gamma_r, double gamma_l, double gamma_ng, double eta, double omega);

/// The same quantity in the ideal-chiral form with gamma = gamma_r + gamma_l
/// and no nonguided decay (kept for the identity test against target_nst).
double target_nst_ideal(double gamma_r, double gamma_l, double eta, double omega);

/// Local maximum at the reciprocal point for a given total guided rate.
double target_nst_max(double gamma, double eta, double omega);

struct Minima {
  double n1_min = 0.0;
  double beta0 = 0.0;  ///< NaN when 2 Gamma^2 < 3 eta^2 Omega^2 makes it meaningless
  std::optional<std::pair<double, double>> gamma_r_min;  ///< (lower, upper), absolute rates
  bool gamma_condition = false;  ///< 2 Gamma^2 >= 3 eta^2 Omega^2
  bool feasible = false;         ///< gamma_condition && beta >= beta0
};

Minima minima(double eta, double omega, double total_decay, double beta);

/// Minimal guided fraction for which the global minimum stays attainable.
double beta0(double eta, double omega, double total_decay);

struct SuperiorBoundary {
  std::optional<std::pair<double, double>> gamma_r_s;  ///< (lower, upper), absolute rates
  bool exists = false;
};

SuperiorBoundary superior_boundary(double eta, double omega, double total_decay, double beta);

/// Extremal values of gamma_r - gamma_l on the beta = 1 slice: the maximum at
/// 0 and the symmetric pair of minima.
struct IdealExtrema {
  double difference_max = 0.0;
  std::optional<double> difference_min;  ///< the positive root
};

IdealExtrema ideal_extrema(double gamma, double eta, double omega);

struct Prediction {
  double n_st_single = 0.0;
  std::optional<double> n1_st;  ///< empty outside the validity region
  double n1_max = 0.0;
  Minima min;
  SuperiorBoundary boundary;
  double total_decay = 0.0;
  double beta = 0.0;
  bool sideband_regime = false;  ///< Gamma, eta*Omega both <= 0.2 nu
};

/// All closed forms for one parameter point.
Prediction predict(double gamma_r, double gamma_l, double gamma_ng, double eta, double omega);

}  // namespace chirocool::analytic

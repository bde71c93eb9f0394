#pragma once

#include <string>
#include <vector>

#include "chirocool/core.hpp"

namespace chirocool::reduced {

// Steady state of the target ion (leftmost, strongly driven) in a chain whose
// remaining N-1 refrigerant ions are undriven and have their motion traced
// out. Only density-matrix elements up to second order in Gamma/nu and
// eta*Omega/nu are kept, which leaves N(N+3)/2 unknowns. Traps are equidistant
// with k_s * spacing a multiple of 2 pi. Elements are normalized to
// rho_{g0g..g, g0g..g} = 1.

struct Rates {
  double gamma_r = 0.0;
  double gamma_l = 0.0;
  double gamma_ng = 0.0;
  double eta = 0.04;
  double omega = 1.0;  ///< target-ion Rabi frequency

  double total() const noexcept { return gamma_r + gamma_l + gamma_ng; }
};

struct ReducedSolution {
  int n_ions = 0;
  cplx a;                  ///< rho_{g1g..g, e0g..g}
  std::vector<cplx> b;     ///< rho_{g1g..g, g0..e_i..g}
  std::vector<cplx> c;     ///< rho_{e0g..g, g0..e_i..g}
  Eigen::MatrixXd d;       ///< rho_{g0..e_i..g, g0..e_j..g}, symmetric
  double rho_e0 = 0.0;     ///< rho_{e0g..g, e0g..g}
  double rho_g1 = 0.0;     ///< rho_{g1g..g, g1g..g}
  double rho_e1 = 0.0;     ///< rho_{e1g..g, e1g..g}
  double n1 = 0.0;         ///< rho_e1 + rho_g1
  double ntilde1 = 0.0;    ///< n1 / single_ion_nst(Gamma)
  int unknowns = 0;
  double rcond = 0.0;      ///< reciprocal condition estimate of the solved system
};

/// Number of unknowns of the reduced system, N(N+3)/2.
int unknown_count(int n_ions);

/// Complex system M x = r exactly as the coupled equations are written, with
/// unknowns ordered (A, B_1..B_{N-1}, C_1..C_{N-1}, D_ij for i <= j, rho_e0).
struct ComplexSystem {
  Matrix matrix;
  Vector rhs;
};
ComplexSystem complex_system(int n_ions, const Rates& rates);

/// Solves the complex system above; single-threaded reference path.
ReducedSolution solve_reduced_complex(int n_ions, const Rates& rates);

/// Fast path: with real phases, A and B_i are purely imaginary and the rest
/// real, so the system is solved in real arithmetic.
ReducedSolution solve_reduced(int n_ions, const Rates& rates);

struct MinSearchResult {
  double beta = 0.0;
  double gamma_r_over_gamma = 0.0;
  double gamma_r = 0.0;
  double ntilde1_min = 0.0;
  int grid_beta = 0;
  int grid_gamma = 0;
  int failed_points = 0;
};

/// Global minimum of ntilde_1 over (beta, gamma_r/gamma) in [0,1]^2 at fixed
/// total decay: coarse grid, then golden-section refinement on each axis.
/// OpenMP-parallel over grid points.
MinSearchResult min_search(int n_ions, double total_decay, double eta, double omega, int grid_beta = 50,
                           int grid_gamma = 50);

/// Single-threaded reference for min_search.
MinSearchResult min_search_serial(int n_ions, double total_decay, double eta, double omega, int grid_beta = 50,
                                  int grid_gamma = 50);

/// ntilde_1 on a (beta, gamma_r/gamma) grid; NaN marks singular points.
/// Row-major with beta outer.
std::vector<double> ntilde_grid(int n_ions, double total_decay, double eta, double omega,
                                const std::vector<double>& betas, const std::vector<double>& ratios);

/// A retained density-matrix element. Labels read (target spin, target phonon,
/// refrigerant spins...), e.g. "e1g" / "g0e" for two ions.
struct Element {
  std::string row;
  std::string col;
  bool operator==(const Element&) const = default;
};

/// Elements kept by the order-counting rules: Hamming distance to the ground
/// element at most 2, at most one excitation per index, plus the
/// doubly-excited target population rho_{e1g..g, e1g..g}.
std::vector<Element> element_filter(int n_ions);

}  // namespace chirocool::reduced

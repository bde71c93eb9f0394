#pragma once

#include <string>
#include <vector>

#include "chirocool/core.hpp"
#include "chirocool/liouvillian.hpp"
#include "chirocool/model.hpp"

namespace chirocool {

/// Complex D x D matrix meant to hold a physical state.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Matrix data) : data_(std::move(data)) {}

  const Matrix& matrix() const noexcept { return data_; }
  long dim() const noexcept { return data_.rows(); }

  double hermiticity_defect() const { return (data_ - data_.adjoint()).norm(); }
  cplx trace() const { return data_.trace(); }
  double min_eigenvalue() const;

  /// Human-readable list of violated invariants (empty when valid).
  std::vector<std::string> violations(double herm_tol = 1e-10, double trace_tol = 1e-10,
                                      double psd_tol = 1e-8) const;

 private:
  Matrix data_;
};

struct SteadyOptions {
  /// Superoperators up to this many rows are solved by dense SVD; larger ones
  /// by shifted inverse iteration on a sparse LU factorization.
  long dense_svd_limit = 400;
  /// Second-smallest singular value must exceed this multiple of the smallest.
  double degeneracy_ratio = 1e3;
  /// Required ||L[rho]||_F / Gamma.
  double residual_tolerance = 1e-10;
  long assembly_cap = kDefaultAssemblyCap;
};

struct SteadyState {
  DensityMatrix rho;
  double residual = 0.0;  ///< ||L[rho]||_F
  std::string method;     ///< "svd" or "inverse-iteration"
  double smallest_singular = 0.0;
  double second_singular = 0.0;  ///< only meaningful for the SVD path
};

/// Null space of the generator with unit trace, Hermitized.
SteadyState solve_steady(const Liouvillian& generator, const SteadyOptions& options = {});

struct SteadyObservables {
  std::vector<double> n;         ///< <a_i^+ a_i>
  std::vector<double> ntilde;    ///< n_i / single-ion reference
  std::vector<double> excited;   ///< <s_i^+ s_i>
  Matrix correlation;            ///< C_{mu nu} = <s_mu^+ s_nu> - <s_mu^+><s_nu>
  double residual = 0.0;

  /// C_st for the first pair of ions (zero for a single ion).
  cplx cst() const { return correlation.rows() > 1 ? correlation(0, 1) : cplx(0.0); }
};

/// Expectation values in `rho`; ntilde_i is NaN for undriven ions.
SteadyObservables observables(const DensityMatrix& rho, const ChainConfig& config, const SteadyOptions& options = {});

/// Steady-state phonon number of one isolated ion with the chain's eta,
/// detuning and truncation, Rabi frequency omega and total decay Gamma.
double single_ion_reference(const ChainConfig& config, double omega, const SteadyOptions& options = {});

/// n_i / single_ion_reference for ion i (1-based).
double normalized_occupation(const ChainConfig& config, int ion, const SteadyOptions& options = {});

/// Full solve plus all observables for a config.
SteadyObservables solve_observables(const ChainConfig& config, const SteadyOptions& options = {});

}  // namespace chirocool

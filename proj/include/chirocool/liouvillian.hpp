#pragma once

#include <vector>

#include "chirocool/core.hpp"
#include "chirocool/model.hpp"
#include "chirocool/operator_algebra.hpp"

namespace chirocool {

/// Generator of the master equation,
///   L[rho] = -i[H, rho] + sum_channels D[rho].
///
/// The matrix-form action never materializes the D^2 x D^2 superoperator; it
/// rewrites the dissipators as an effective non-Hermitian Hamiltonian
/// K = H - i/2 sum G_{mu nu} s_mu^+ s_nu plus recycling terms J_k rho J_k^+,
/// where the jumps J_k come from the eigendecomposition of each coefficient
/// matrix.
class Liouvillian {
 public:
  Liouvillian(SparseMatrix hamiltonian, std::vector<DissipatorSpec> channels, const SpaceDescriptor& space);

  static Liouvillian from_config(const ChainConfig& config);

  long dim() const noexcept { return hamiltonian_.rows(); }
  const SpaceDescriptor& space() const noexcept { return space_; }
  const SparseMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  const std::vector<DissipatorSpec>& channels() const noexcept { return channels_; }
  const std::vector<SparseMatrix>& lowering() const noexcept { return lowering_; }
  const std::vector<SparseMatrix>& jumps() const noexcept { return jumps_; }

  /// Sum of the diagonal channel rates per ion; equals Gamma for chain configs.
  double rate_scale() const noexcept { return rate_scale_; }

  /// Upper bound on the spectral norm of the generator.
  double norm_bound() const noexcept { return norm_bound_; }

  /// d rho / dt, OpenMP-parallel over column blocks.
  Matrix apply(const Matrix& rho) const;

  /// Single-threaded reference for apply().
  Matrix apply_serial(const Matrix& rho) const;

  /// In-place variants; `out` must not alias `rho`.
  void apply_to(const Matrix& rho, Matrix& out) const;
  void apply_serial_to(const Matrix& rho, Matrix& out) const;

 private:
  void check_dim(const Matrix& rho) const;

  SpaceDescriptor space_;
  SparseMatrix hamiltonian_;
  std::vector<DissipatorSpec> channels_;
  std::vector<SparseMatrix> lowering_;
  SparseMatrix effective_;      // K
  std::vector<SparseMatrix> jumps_;
  double rate_scale_ = 0.0;
  double norm_bound_ = 0.0;
};

/// Default cap on the Hilbert-space dimension for explicit assembly.
inline constexpr long kDefaultAssemblyCap = 256;

/// Explicit D^2 x D^2 superoperator in column-stacking convention,
/// vec(A X B) = (B^T (x) A) vec(X). Built from the literal double sum over
/// (mu, nu) rather than from the jump decomposition used by apply().
SparseMatrix assemble(const Liouvillian& generator, long max_dim = kDefaultAssemblyCap);

/// Column-stacking vectorization helpers.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, long dim);

}  // namespace chirocool

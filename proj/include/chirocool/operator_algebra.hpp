#pragma once

#include "chirocool/core.hpp"

namespace chirocool {

enum class SiteFactor { kSpin, kPhonon };

/// Composite Hilbert space of an ion chain.
///
/// Each ion contributes a spin factor (|g>, |e>) followed by a phonon factor
/// (|0>, ..., |n_max>). Ion 1 is the slowest-varying tensor factor, so the flat
/// index of |s_1 n_1; s_2 n_2; ...> is built by mixed-radix accumulation from
/// the left.
class SpaceDescriptor {
 public:
  SpaceDescriptor(int n_ions, int n_max);

  int n_ions() const noexcept { return n_ions_; }
  int n_max() const noexcept { return n_max_; }
  static constexpr int spin_dim() noexcept { return 2; }
  int phonon_dim() const noexcept { return n_max_ + 1; }
  int site_dim() const noexcept { return spin_dim() * phonon_dim(); }
  long total_dim() const noexcept { return total_dim_; }

  /// Flat basis index; spins[i] is 0 for g and 1 for e, ion i+1.
  long index(const std::vector<int>& spins, const std::vector<int>& phonons) const;

 private:
  int n_ions_;
  int n_max_;
  long total_dim_;
};

/// sigma = |g><e| in the (|g>, |e>) basis.
SparseMatrix local_lowering_spin();

/// Truncated phonon annihilation operator: a|n> = sqrt(n)|n-1>.
SparseMatrix local_annihilation(int n_max);

/// Identity on the sites before `site`, `local` on the chosen factor of
/// `site`, identity elsewhere. Sites are 1-based.
SparseMatrix embed(const SparseMatrix& local, int site, SiteFactor kind,
                   const SpaceDescriptor& space);

SparseMatrix sparse_identity(long dim);

}  // namespace chirocool

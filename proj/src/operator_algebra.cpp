#include "chirocool/operator_algebra.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace chirocool {

SpaceDescriptor::SpaceDescriptor(int n_ions, int n_max) : n_ions_(n_ions), n_max_(n_max) {
  if (n_ions < 1) throw InvalidArgument("n_ions must be positive, got " + std::to_string(n_ions));
  if (n_max < 1) throw InvalidArgument("invalid truncation: n_max must be >= 1, got " + std::to_string(n_max));
  total_dim_ = 1;
  for (int i = 0; i < n_ions; ++i) total_dim_ *= site_dim();
}

long SpaceDescriptor::index(const std::vector<int>& spins, const std::vector<int>& phonons) const {
  if (static_cast<int>(spins.size()) != n_ions_ || static_cast<int>(phonons.size()) != n_ions_) {
    throw InvalidArgument("basis label length does not match the number of ions");
  }
  long flat = 0;
  for (int i = 0; i < n_ions_; ++i) {
    if (spins[i] < 0 || spins[i] > 1 || phonons[i] < 0 || phonons[i] > n_max_) {
      throw InvalidArgument("basis label out of range at ion " + std::to_string(i + 1));
    }
    flat = flat * site_dim() + spins[i] * phonon_dim() + phonons[i];
  }
  return flat;
}

SparseMatrix sparse_identity(long dim) {
  SparseMatrix id(dim, dim);
  id.setIdentity();
  return id;
}

SparseMatrix local_lowering_spin() {
  SparseMatrix s(2, 2);
  s.insert(0, 1) = 1.0;
  s.makeCompressed();
  return s;
}

SparseMatrix local_annihilation(int n_max) {
  if (n_max < 1) throw InvalidArgument("invalid truncation: n_max must be >= 1, got " + std::to_string(n_max));
  SparseMatrix a(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
  a.makeCompressed();
  return a;
}

namespace {

// Kronecker product of a dense-identity left block, a sparse middle and a
// dense-identity right block, written directly as triplets.
SparseMatrix kron_identity_sandwich(long left, const SparseMatrix& middle, long right) {
  const long m = middle.rows();
  const long dim = left * m * right;
  std::vector<Eigen::Triplet<cplx, long>> triplets;
  triplets.reserve(static_cast<std::size_t>(left * middle.nonZeros() * right));
  for (long l = 0; l < left; ++l) {
    for (long col = 0; col < middle.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(middle, col); it; ++it) {
        for (long r = 0; r < right; ++r) {
          triplets.emplace_back((l * m + it.row()) * right + r, (l * m + it.col()) * right + r,
                                it.value());
        }
      }
    }
  }
  SparseMatrix out(dim, dim);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

SparseMatrix embed(const SparseMatrix& local, int site, SiteFactor kind, const SpaceDescriptor& space) {
  if (site < 1 || site > space.n_ions()) {
    throw InvalidArgument("site " + std::to_string(site) + " out of range [1, " +
                          std::to_string(space.n_ions()) + "]");
  }
  const long expected = kind == SiteFactor::kSpin ? SpaceDescriptor::spin_dim() : space.phonon_dim();
  if (local.rows() != expected || local.cols() != expected) {
    throw InvalidArgument("local operator is " + std::to_string(local.rows()) + "x" +
                          std::to_string(local.cols()) + ", site factor has dimension " +
                          std::to_string(expected));
  }
  long left = 1;
  for (int i = 1; i < site; ++i) left *= space.site_dim();
  long right = 1;
  for (int i = site + 1; i <= space.n_ions(); ++i) right *= space.site_dim();
  if (kind == SiteFactor::kSpin) {
    right *= space.phonon_dim();
  } else {
    left *= SpaceDescriptor::spin_dim();
  }
  return kron_identity_sandwich(left, local, right);
}

}  // namespace chirocool

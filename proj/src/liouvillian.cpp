#include "chirocool/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chirocool {

namespace {

// Eigenvalues below this fraction of the largest are treated as zero when
// splitting a coefficient matrix into jump operators.
constexpr double kRankTolerance = 1e-14;

// Spectral-norm bound sqrt(||M||_1 ||M||_inf).
double spectral_bound(const SparseMatrix& m) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(m.cols());
  Eigen::VectorXd row = Eigen::VectorXd::Zero(m.rows());
  for (long k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      col(it.col()) += std::abs(it.value());
      row(it.row()) += std::abs(it.value());
    }
  }
  return m.nonZeros() == 0 ? 0.0 : std::sqrt(col.maxCoeff() * row.maxCoeff());
}

}  // namespace

Liouvillian::Liouvillian(SparseMatrix hamiltonian, std::vector<DissipatorSpec> channels,
                         const SpaceDescriptor& space)
    : space_(space), hamiltonian_(std::move(hamiltonian)), channels_(std::move(channels)) {
  const long d = space_.total_dim();
  if (hamiltonian_.rows() != d || hamiltonian_.cols() != d) {
    throw InvalidArgument("Hamiltonian is " + std::to_string(hamiltonian_.rows()) + "x" +
                          std::to_string(hamiltonian_.cols()) + ", space has dimension " + std::to_string(d));
  }
  const int n = space_.n_ions();
  for (const auto& ch : channels_) {
    if (ch.coefficients.rows() != n || ch.coefficients.cols() != n) {
      throw InvalidArgument(std::string("coefficient matrix of channel ") + channel_name(ch.channel) +
                            " does not match the number of ions");
    }
  }
  lowering_ = lowering_operators(space_);

  effective_ = hamiltonian_;
  for (const auto& ch : channels_) {
    for (int mu = 0; mu < n; ++mu) {
      rate_scale_ += ch.coefficients(mu, mu).real() / n;
      for (int nu = 0; nu < n; ++nu) {
        const cplx g = ch.coefficients(mu, nu);
        if (g == cplx(0.0)) continue;
        effective_ -= (0.5 * kI * g) * SparseMatrix(SparseMatrix(lowering_[mu].adjoint()) * lowering_[nu]);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(ch.coefficients);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    for (int k = 0; k < n; ++k) {
      const double lambda = eig.eigenvalues()(k);
      if (top == 0.0 || lambda <= kRankTolerance * top) continue;
      // G_{mu nu} = sum_k lambda_k U_{mu k} conj(U_{nu k})  =>  J_k = sqrt(lambda_k) sum_nu conj(U_{nu k}) s_nu
      SparseMatrix jump(d, d);
      for (int nu = 0; nu < n; ++nu) {
        jump += (std::sqrt(lambda) * std::conj(eig.eigenvectors()(nu, k))) * lowering_[nu];
      }
      jump.prune(cplx(0.0));
      jumps_.push_back(jump);
    }
  }
  effective_.prune(cplx(0.0));
  effective_.makeCompressed();

  norm_bound_ = 2.0 * spectral_bound(effective_);
  for (const auto& j : jumps_) norm_bound_ += spectral_bound(j) * spectral_bound(j);
}

Liouvillian Liouvillian::from_config(const ChainConfig& config) {
  const auto space = make_space(config);
  return Liouvillian(build_hamiltonian(config, space), build_dissipators(config), space);
}

void Liouvillian::check_dim(const Matrix& rho) const {
  if (rho.rows() != dim() || rho.cols() != dim()) {
    throw InvalidArgument("density matrix is " + std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) +
                          ", generator acts on dimension " + std::to_string(dim()));
  }
}

namespace {

// Per-thread buffers: D x D complex temporaries exceed the allocator's mmap
// threshold at D ~ 100, so allocating them per call dominates the cost.
struct Scratch {
  Matrix rho_adj;
  Matrix acc;
  Matrix tmp;
  std::vector<Matrix> left_adj;
};

thread_local Scratch scratch;

}  // namespace

// Only sparse * dense products are used: rho K^+ = (K rho^+)^+ and
// X J^+ = (J X^+)^+, which Eigen evaluates far faster than dense * sparse.
void Liouvillian::apply_serial_to(const Matrix& rho, Matrix& out) const {
  check_dim(rho);
  Scratch& s = scratch;
  s.rho_adj = rho.adjoint();
  out.resize(dim(), dim());
  out.noalias() = -kI * (effective_ * rho);
  s.tmp.noalias() = -kI * (effective_ * s.rho_adj);
  out += s.tmp.adjoint();
  for (const auto& jump : jumps_) {
    s.acc.noalias() = jump * rho;
    s.rho_adj = s.acc.adjoint();
    s.tmp.noalias() = jump * s.rho_adj;
    out += s.tmp.adjoint();
  }
}

void Liouvillian::apply_to(const Matrix& rho, Matrix& out) const {
  check_dim(rho);
  const long d = dim();
  constexpr long kBlock = 16;
  const long n_blocks = (d + kBlock - 1) / kBlock;
  Scratch& s = scratch;
  s.rho_adj = rho.adjoint();
  s.left_adj.resize(jumps_.size());
  // adjoint of every term other than -i K rho; added transposed at the end
  s.acc.resize(d, d);
  out.resize(d, d);

#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (long k = 0; k < static_cast<long>(jumps_.size()); ++k) s.left_adj[k] = (jumps_[k] * rho).adjoint();

#pragma omp for schedule(static)
    for (long b = 0; b < n_blocks; ++b) {
      const long c0 = b * kBlock;
      const long nc = std::min(kBlock, d - c0);
      auto cols = s.acc.middleCols(c0, nc);
      cols.noalias() = -kI * (effective_ * s.rho_adj.middleCols(c0, nc));
      for (std::size_t k = 0; k < jumps_.size(); ++k) cols.noalias() += jumps_[k] * s.left_adj[k].middleCols(c0, nc);
      out.middleCols(c0, nc).noalias() = -kI * (effective_ * rho.middleCols(c0, nc));
    }

#pragma omp for schedule(static)
    for (long b = 0; b < n_blocks; ++b) {
      const long c0 = b * kBlock;
      const long nc = std::min(kBlock, d - c0);
      // column block of acc^+ is the adjoint of a row block of acc
      out.middleCols(c0, nc) += s.acc.middleRows(c0, nc).adjoint();
    }
  }
}

Matrix Liouvillian::apply(const Matrix& rho) const {
  Matrix out;
  apply_to(rho, out);
  return out;
}

Matrix Liouvillian::apply_serial(const Matrix& rho) const {
  Matrix out;
  apply_serial_to(rho, out);
  return out;
}

SparseMatrix assemble(const Liouvillian& generator, long max_dim) {
  const long d = generator.dim();
  if (d > max_dim) {
    throw SolverError(SolverError::Kind::kMemoryGuard,
                      "explicit superoperator assembly refused: dimension " + std::to_string(d) + " exceeds cap " +
                          std::to_string(max_dim) + " (use matrix-form application)");
  }
  const SparseMatrix id = sparse_identity(d);
  const SparseMatrix& h = generator.hamiltonian();
  const SparseMatrix ht = h.transpose();
  SparseMatrix s = -kI * (SparseMatrix(Eigen::kroneckerProduct(id, h)) - SparseMatrix(Eigen::kroneckerProduct(ht, id)));

  const auto& sig = generator.lowering();
  const int n = static_cast<int>(sig.size());
  for (const auto& ch : generator.channels()) {
    for (int mu = 0; mu < n; ++mu) {
      const SparseMatrix sd = sig[mu].adjoint();
      // (s_mu^+)^T = conj(s_mu)
      const SparseMatrix sd_t = sd.transpose();
      for (int nu = 0; nu < n; ++nu) {
        const cplx g = ch.coefficients(mu, nu);
        if (g == cplx(0.0)) continue;
        const SparseMatrix p = sd * sig[nu];
        const SparseMatrix pt = p.transpose();
        SparseMatrix term = SparseMatrix(Eigen::kroneckerProduct(sd_t, sig[nu]));
        term -= 0.5 * SparseMatrix(Eigen::kroneckerProduct(id, p));
        term -= 0.5 * SparseMatrix(Eigen::kroneckerProduct(pt, id));
        s += g * term;
      }
    }
  }
  s.prune(cplx(0.0));
  s.makeCompressed();
  return s;
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, long dim) {
  if (v.size() != dim * dim) throw InvalidArgument("vector length does not match dim^2");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

}  // namespace chirocool

#include "chirocool/steady_state.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/SparseLU>

namespace chirocool {

double DensityMatrix::min_eigenvalue() const {
  const Matrix herm = 0.5 * (data_ + data_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(herm, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

std::vector<std::string> DensityMatrix::violations(double herm_tol, double trace_tol, double psd_tol) const {
  std::vector<std::string> out;
  auto num = [](double x) {
    std::ostringstream os;
    os << x;
    return os.str();
  };
  if (hermiticity_defect() > herm_tol) out.push_back("not Hermitian: ||rho - rho^+|| = " + num(hermiticity_defect()));
  if (std::abs(trace() - 1.0) > trace_tol) out.push_back("trace differs from 1 by " + num(std::abs(trace() - 1.0)));
  const double lmin = min_eigenvalue();
  if (lmin < -psd_tol) out.push_back("not positive semidefinite: min eigenvalue " + num(lmin));
  return out;
}

namespace {

Matrix finalize(const Vector& v, long d) {
  Matrix rho = unvec(v, d);
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-12 * rho.norm()) {
    throw SolverError(SolverError::Kind::kNoNormalizableSolution,
                      "null vector has zero trace; no normalizable steady state");
  }
  rho /= tr;
  return 0.5 * (rho + rho.adjoint());
}

SteadyState solve_dense(const Liouvillian& gen, const SteadyOptions& opt) {
  const long d = gen.dim();
  const Matrix s = Matrix(assemble(gen, opt.assembly_cap));
  Eigen::BDCSVD<Matrix> svd(s, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const long n = sv.size();
  SteadyState out;
  out.method = "svd";
  out.smallest_singular = sv(n - 1);
  out.second_singular = sv(n - 2);
  const double floor = 1e-13 * sv(0);
  if (!(sv(n - 2) > opt.degeneracy_ratio * sv(n - 1)) || sv(n - 2) < floor) {
    std::ostringstream os;
    os << "ambiguous steady state: two singular values near zero (" << sv(n - 1) << ", " << sv(n - 2) << ")";
    throw SolverError(SolverError::Kind::kAmbiguousSteadyState, os.str());
  }
  out.rho = DensityMatrix(finalize(svd.matrixV().col(n - 1), d));
  return out;
}

Vector inverse_iteration(Eigen::SparseLU<SparseMatrix>& lu, Vector x, int iterations) {
  for (int it = 0; it < iterations; ++it) {
    x = lu.solve(x);
    x /= x.norm();
  }
  return x;
}

SteadyState solve_sparse(const Liouvillian& gen, const SteadyOptions& opt) {
  const long d = gen.dim();
  SparseMatrix s = assemble(gen, opt.assembly_cap);
  const double shift = 1e-12 * gen.norm_bound();
  SparseMatrix shifted = s - shift * sparse_identity(d * d);
  shifted.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(shifted);
  lu.factorize(shifted);
  if (lu.info() != Eigen::Success) {
    throw SolverError(SolverError::Kind::kAmbiguousSteadyState, "sparse factorization of the generator failed");
  }
  constexpr int kIterations = 6;
  Vector start = vec(Matrix::Identity(d, d));
  start /= start.norm();
  const Matrix first = finalize(inverse_iteration(lu, start, kIterations), d);

  // A second, unrelated start vector must land on the same state.
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss;
  Matrix r(d, d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < d; ++i) r(i, j) = cplx(gauss(rng), gauss(rng));
  Matrix herm = r * r.adjoint();
  Vector second_start = vec(herm);
  second_start /= second_start.norm();
  const Matrix second = finalize(inverse_iteration(lu, second_start, kIterations), d);
  const double spread = (first - second).norm();

  SteadyState out;
  out.method = "inverse-iteration";
  if (spread > 1e-6) {
    std::ostringstream os;
    os << "ambiguous steady state: inverse iteration from two starts disagrees by " << spread;
    throw SolverError(SolverError::Kind::kAmbiguousSteadyState, os.str());
  }
  out.rho = DensityMatrix(first);
  return out;
}

}  // namespace

SteadyState solve_steady(const Liouvillian& gen, const SteadyOptions& opt) {
  const long d = gen.dim();
  SteadyState out = d * d <= opt.dense_svd_limit ? solve_dense(gen, opt) : solve_sparse(gen, opt);
  out.residual = gen.apply(out.rho.matrix()).norm();
  const double scale = gen.rate_scale() > 0.0 ? gen.rate_scale() : 1.0;
  if (out.residual > opt.residual_tolerance * scale) {
    std::ostringstream os;
    os << "steady-state residual " << out.residual << " exceeds " << opt.residual_tolerance << " * Gamma";
    throw SolverError(SolverError::Kind::kResidualTooLarge, os.str());
  }
  return out;
}

namespace {

SteadyObservables expectations(const DensityMatrix& state, const ChainConfig& config) {
  const auto space = make_space(config);
  if (state.dim() != space.total_dim()) throw InvalidArgument("density matrix does not match the config space");
  const Matrix& rho = state.matrix();
  const auto sig = lowering_operators(space);
  const auto a = annihilation_operators(space);
  const int n = config.n_ions;
  auto expect = [&](const SparseMatrix& op) -> cplx {
    // Tr(rho op) = sum_{ij} rho_{ji} op_{ij}
    cplx acc = 0.0;
    for (long k = 0; k < op.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(op, k); it; ++it) acc += rho(it.col(), it.row()) * it.value();
    }
    return acc;
  };
  SteadyObservables obs;
  std::vector<cplx> raise(n);
  for (int i = 0; i < n; ++i) {
    obs.n.push_back(expect(SparseMatrix(SparseMatrix(a[i].adjoint()) * a[i])).real());
    obs.excited.push_back(expect(SparseMatrix(SparseMatrix(sig[i].adjoint()) * sig[i])).real());
    raise[i] = expect(SparseMatrix(sig[i].adjoint()));
  }
  obs.correlation = Matrix::Zero(n, n);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      const cplx pair = expect(SparseMatrix(SparseMatrix(sig[mu].adjoint()) * sig[nu]));
      obs.correlation(mu, nu) = pair - raise[mu] * std::conj(raise[nu]);
    }
  }
  return obs;
}

}  // namespace

SteadyObservables observables(const DensityMatrix& state, const ChainConfig& config, const SteadyOptions& options) {
  SteadyObservables obs = expectations(state, config);
  const int n = config.n_ions;
  std::map<double, double> reference;
  for (int i = 0; i < n; ++i) {
    const double omega = config.omega[i];
    if (omega == 0.0) {
      obs.ntilde.push_back(std::nan(""));
      continue;
    }
    auto it = reference.find(omega);
    if (it == reference.end()) it = reference.emplace(omega, single_ion_reference(config, omega, options)).first;
    obs.ntilde.push_back(obs.n[i] / it->second);
  }
  return obs;
}

double single_ion_reference(const ChainConfig& config, double omega, const SteadyOptions& options) {
  ChainConfig single = config;
  single.n_ions = 1;
  single.omega = {omega};
  single.gamma_r = 0.0;
  single.gamma_l = 0.0;
  single.gamma_ng = config.total_decay();
  single.phases.reset();
  single.target = 1;
  const auto gen = Liouvillian::from_config(single);
  const auto st = solve_steady(gen, options);
  return expectations(st.rho, single).n[0];
}

double normalized_occupation(const ChainConfig& config, int ion, const SteadyOptions& options) {
  if (ion < 1 || ion > config.n_ions) throw InvalidArgument("ion index out of range");
  const double omega = config.omega.at(static_cast<std::size_t>(ion - 1));
  if (omega == 0.0) {
    throw SolverError(SolverError::Kind::kUndefinedNormalization,
                      "single-ion reference occupation vanishes for an undriven ion; ntilde undefined");
  }
  const auto gen = Liouvillian::from_config(config);
  const auto st = solve_steady(gen, options);
  return expectations(st.rho, config).n[ion - 1] / single_ion_reference(config, omega, options);
}

SteadyObservables solve_observables(const ChainConfig& config, const SteadyOptions& options) {
  const auto gen = Liouvillian::from_config(config);
  const auto st = solve_steady(gen, options);
  auto obs = observables(st.rho, config, options);
  obs.residual = st.residual;
  return obs;
}

}  // namespace chirocool

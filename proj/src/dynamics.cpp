#include "chirocool/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace chirocool {

std::vector<double> thermal_weights(double n0, int n_max) {
  if (!(n0 >= 0.0)) throw InvalidArgument("thermal occupation must be non-negative");
  if (n_max < 1) throw InvalidArgument("n_max must be at least 1");
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
  const double ratio = n0 / (n0 + 1.0);
  double w = 1.0 / (n0 + 1.0);
  for (auto& x : p) {
    x = w;
    w *= ratio;
  }
  return p;
}

double thermal_trace(double n0, int n_max, int n_ions) {
  const auto p = thermal_weights(n0, n_max);
  double single = 0.0;
  for (double x : p) single += x;
  return std::pow(single, n_ions);
}

DensityMatrix thermal_state(double n0, int n_max, int n_ions) {
  const SpaceDescriptor space(n_ions, n_max);
  auto p = thermal_weights(n0, n_max);
  double sum = 0.0;
  for (double x : p) sum += x;
  for (auto& x : p) x /= sum;
  Matrix rho = Matrix::Zero(space.total_dim(), space.total_dim());
  // enumerate all-ground spin configurations with every phonon tuple
  std::vector<int> spins(static_cast<std::size_t>(n_ions), 0);
  std::vector<int> phonons(static_cast<std::size_t>(n_ions), 0);
  while (true) {
    double w = 1.0;
    for (int v : phonons) w *= p[static_cast<std::size_t>(v)];
    const long k = space.index(spins, phonons);
    rho(k, k) = w;
    int pos = n_ions - 1;
    while (pos >= 0 && phonons[pos] == n_max) phonons[pos--] = 0;
    if (pos < 0) break;
    ++phonons[pos];
  }
  return DensityMatrix(std::move(rho));
}

std::vector<double> uniform_grid(double t_end, int points) {
  if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  if (points < 2) throw InvalidArgument("output grid needs at least two points");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) t[k] = t_end * k / (points - 1);
  t.back() = t_end;
  return t;
}

namespace {

using CMapV = Eigen::Map<const Vector>;

// Real inner product on Hermitian matrices, Re tr(a^+ b).
double inner(const Matrix& a, const Matrix& b) {
  return CMapV(a.data(), a.size()).dot(CMapV(b.data(), b.size())).real();
}

class Recorder {
 public:
  Recorder(const Liouvillian& gen, const std::vector<double>& reference, const EvolveOptions& opt, Trajectory& traj)
      : opt_(opt), traj_(traj), reference_(reference) {
    const auto& space = gen.space();
    const int n = space.n_ions();
    for (const auto& a : annihilation_operators(space)) {
      const SparseMatrix num = SparseMatrix(a.adjoint()) * a;
      number_.push_back(num.diagonal().real());
    }
    for (const auto& s : gen.lowering()) {
      const SparseMatrix pop = SparseMatrix(s.adjoint()) * s;
      excited_.push_back(pop.diagonal().real());
    }
    traj_.n.assign(n, {});
    traj_.ntilde.assign(n, {});
    traj_.excited.assign(n, {});
    traj_.reference = reference;
  }

  void record(double t, const Matrix& rho, std::size_t index) {
    const Eigen::VectorXd diag = rho.diagonal().real();
    traj_.times.push_back(t);
    for (std::size_t i = 0; i < number_.size(); ++i) {
      const double n = number_[i].dot(diag);
      traj_.n[i].push_back(n);
      traj_.excited[i].push_back(excited_[i].dot(diag));
      const double ref = i < reference_.size() ? reference_[i] : std::numeric_limits<double>::quiet_NaN();
      traj_.ntilde[i].push_back(ref > 0.0 ? n / ref : std::numeric_limits<double>::quiet_NaN());
    }
    const double trace_drift = std::abs(rho.trace() - 1.0);
    const double herm_drift = (rho - rho.adjoint()).norm();
    auto& st = traj_.stats;
    st.max_trace_drift = std::max(st.max_trace_drift, trace_drift);
    st.max_hermiticity_drift = std::max(st.max_hermiticity_drift, herm_drift);
    if (trace_drift > opt_.drift_tolerance || herm_drift > opt_.drift_tolerance) {
      std::ostringstream os;
      os << "state drift exceeded tolerance at t=" << t << " (trace " << trace_drift << ", hermiticity "
         << herm_drift << "); tighten rtol";
      throw SolverError(SolverError::Kind::kDriftExceeded, os.str());
    }
    if (opt_.snapshot_stride > 0 && index % static_cast<std::size_t>(opt_.snapshot_stride) == 0)
      traj_.snapshots.emplace_back(t, rho);
  }

 private:
  const EvolveOptions& opt_;
  Trajectory& traj_;
  std::vector<double> reference_;
  std::vector<Eigen::VectorXd> number_;
  std::vector<Eigen::VectorXd> excited_;
};

void underflow(double t, double h) {
  std::ostringstream os;
  os << "step size underflow at t=" << t << " (h=" << h
     << "); the problem is stiff for explicit stepping, reduce Gamma*dt or use the Krylov integrator";
  throw SolverError(SolverError::Kind::kStepSizeUnderflow, os.str());
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

void run_rk(const Liouvillian& gen, Matrix rho, const std::vector<double>& times, const EvolveOptions& opt,
            Recorder& rec, Trajectory& traj) {
  auto& st = traj.stats;
  const long d = gen.dim();
  Matrix k1, k2, k3, k4, k5, k6, k7;
  Matrix stage(d, d), next(d, d), err(d, d);
  auto f = [&](const Matrix& x, Matrix& out) {
    ++st.applications;
    gen.apply_to(x, out);
  };
  double t = times.front();
  double h = std::min(0.1, 0.01 / std::max(gen.norm_bound(), 1e-300));
  f(rho, k1);
  rec.record(t, rho, 0);
  for (std::size_t out = 1; out < times.size(); ++out) {
    const double target = times[out];
    while (t < target) {
      if (st.steps >= opt.max_steps) throw SolverError(SolverError::Kind::kStepSizeUnderflow, "step budget exhausted");
      const bool last = t + h >= target;
      const double step = last ? target - t : h;
      if (step <= 1e-13 * std::max(1.0, std::abs(t))) underflow(t, step);
      stage = rho + step * (a21 * k1);
      f(stage, k2);
      stage = rho + step * (a31 * k1 + a32 * k2);
      f(stage, k3);
      stage = rho + step * (a41 * k1 + a42 * k2 + a43 * k3);
      f(stage, k4);
      stage = rho + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      f(stage, k5);
      stage = rho + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      f(stage, k6);
      next = rho + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      f(next, k7);
      err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double norm = std::sqrt(
          (err.cwiseAbs().array() / (opt.atol + opt.rtol * rho.cwiseAbs().array().max(next.cwiseAbs().array())))
              .square()
              .mean());
      const double fac = std::clamp(0.9 * std::pow(std::max(norm, 1e-16), -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        ++st.steps;
        t = last ? target : t + step;
        rho.swap(next);
        k1.swap(k7);
        if (!last || fac < 1.0) h = step * fac;
      } else {
        ++st.rejected;
        h = step * std::min(fac, 1.0);
      }
    }
    rec.record(t, rho, out);
  }
  traj.final_state = std::move(rho);
}

void hermitian_part(Matrix& p) {
  const long d = p.rows();
  for (long j = 0; j < d; ++j) {
    p(j, j) = p(j, j).real();
    for (long i = j + 1; i < d; ++i) {
      const cplx avg = 0.5 * (p(i, j) + std::conj(p(j, i)));
      p(i, j) = avg;
      p(j, i) = std::conj(avg);
    }
  }
}

// Rounds a step to two significant digits, as in Expokit.
double round_step(double h) {
  const double s = std::pow(10.0, std::floor(std::log10(h)) - 1.0);
  return std::ceil(h / s) * s;
}

// w <- exp(tau L) w with the Expokit local error control. The Arnoldi process
// runs over the real vector space of Hermitian matrices (L maps it into
// itself), so the iterate stays Hermitian to rounding instead of accumulating
// the anti-Hermitian part of the truncation error.
void krylov_advance(const Liouvillian& gen, Matrix& w, double tau, const EvolveOptions& opt, double& t_new,
                    IntegratorStats& st) {
  const int m = opt.krylov_dim;
  const double tol = opt.rtol;
  const double gamma = 0.9;
  const double delta = 1.2;
  const double anorm = std::max(gen.norm_bound(), 1e-300);
  // invariance threshold; a looser absolute one freezes the state near equilibrium
  const double btol = 1e-12 * anorm;
  double beta = w.norm();
  if (t_new <= 0.0) {
    const double fact = std::pow((m + 1.0) / std::exp(1.0), m + 1.0) * std::sqrt(2.0 * std::numbers::pi * (m + 1.0));
    t_new = round_step((1.0 / anorm) * std::pow(fact * tol / (4.0 * beta * anorm), 1.0 / m));
  }
  std::vector<Matrix> v(static_cast<std::size_t>(m) + 2);
  Matrix p, next;
  double t_now = 0.0;
  while (t_now < tau) {
    if (st.steps >= opt.max_steps) throw SolverError(SolverError::Kind::kStepSizeUnderflow, "step budget exhausted");
    double t_step = std::min(tau - t_now, t_new);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 2, m + 2);
    v[0] = w / beta;
    int mb = m;
    int k1 = 2;
    for (int j = 0; j < m; ++j) {
      gen.apply_to(v[j], p);
      hermitian_part(p);
      ++st.applications;
      for (int i = 0; i <= j; ++i) {
        h(i, j) = inner(v[i], p);
        p -= h(i, j) * v[i];
      }
      const double s = p.norm();
      if (s < btol) {
        // happy breakdown: the Krylov space is invariant
        k1 = 0;
        mb = j + 1;
        t_step = tau - t_now;
        break;
      }
      h(j + 1, j) = s;
      v[j + 1] = p / s;
    }
    double avnorm = 0.0;
    if (k1 != 0) {
      h(m + 1, m) = 1.0;
      gen.apply_to(v[m], p);
      hermitian_part(p);
      avnorm = p.norm();
      ++st.applications;
    }
    double err_loc = 0.0;
    double xm = 1.0 / m;
    Eigen::MatrixXd f;
    for (int reject = 0;; ++reject) {
      const int mx = mb + k1;
      f = (t_step * h.topLeftCorner(mx, mx)).exp();
      if (k1 == 0) {
        err_loc = btol;
        break;
      }
      const double phi1 = std::abs(beta * f(m, 0));
      const double phi2 = std::abs(beta * f(m + 1, 0) * avnorm);
      if (phi1 > 10.0 * phi2) {
        err_loc = phi2;
        xm = 1.0 / m;
      } else if (phi1 > phi2) {
        err_loc = phi1 * phi2 / (phi1 - phi2);
        xm = 1.0 / m;
      } else {
        err_loc = phi1;
        xm = 1.0 / (m - 1);
      }
      if (err_loc <= delta * t_step * tol) break;
      if (reject >= 50) underflow(t_now, t_step);
      ++st.rejected;
      t_step = round_step(gamma * t_step * std::pow(t_step * tol / err_loc, xm));
    }
    const int mx = mb + std::max(0, k1 - 1);
    next.setZero(w.rows(), w.cols());
    for (int i = 0; i < mx; ++i) next += (beta * f(i, 0)) * v[i];
    w.swap(next);
    beta = w.norm();
    t_now += t_step;
    ++st.steps;
    t_new = round_step(gamma * t_step * std::pow(t_step * tol / std::max(err_loc, 1e-300), xm));
    if (t_step <= 1e-13 * tau && t_now < tau) underflow(t_now, t_step);
  }
}

void run_krylov(const Liouvillian& gen, Matrix rho, const std::vector<double>& times, const EvolveOptions& opt,
                Recorder& rec, Trajectory& traj) {
  if (opt.krylov_dim < 2) throw InvalidArgument("Krylov dimension must be at least 2");
  double t_new = 0.0;
  rec.record(times.front(), rho, 0);
  for (std::size_t out = 1; out < times.size(); ++out) {
    krylov_advance(gen, rho, times[out] - times[out - 1], opt, t_new, traj.stats);
    rec.record(times[out], rho, out);
  }
  traj.final_state = std::move(rho);
}

}  // namespace

Trajectory evolve(const Liouvillian& gen, const DensityMatrix& rho0, const std::vector<double>& times,
                  const std::vector<double>& reference, const EvolveOptions& opt) {
  if (rho0.dim() != gen.dim()) throw InvalidArgument("initial state dimension does not match the generator");
  if (times.size() < 2) throw InvalidArgument("output grid needs at least two points");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw InvalidArgument("output times must be strictly increasing");
  Trajectory traj;
  Recorder rec(gen, reference, opt, traj);
  if (opt.integrator == Integrator::kKrylov)
    run_krylov(gen, rho0.matrix(), times, opt, rec, traj);
  else
    run_rk(gen, rho0.matrix(), times, opt, rec, traj);
  return traj;
}

Trajectory evolve(const ChainConfig& config, const DensityMatrix& rho0, const std::vector<double>& times,
                  const EvolveOptions& opt) {
  const auto gen = Liouvillian::from_config(config);
  std::vector<double> reference;
  if (opt.compute_ntilde) {
    for (int i = 0; i < config.n_ions; ++i) {
      const double omega = config.omega[static_cast<std::size_t>(i)];
      reference.push_back(omega > 0.0 ? single_ion_reference(config, omega)
                                      : std::numeric_limits<double>::quiet_NaN());
    }
  }
  return evolve(gen, rho0, times, reference, opt);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.n_ions();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",n_" << i;
  for (int i = 1; i <= n; ++i) out << ",ntilde_" << i;
  out << '\n';
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
  };
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    put(traj.times[k]);
    for (int i = 0; i < n; ++i) {
      out << ',';
      put(traj.n[i][k]);
    }
    for (int i = 0; i < n; ++i) {
      out << ',';
      put(traj.ntilde[i][k]);
    }
    out << '\n';
  }
}

}  // namespace chirocool

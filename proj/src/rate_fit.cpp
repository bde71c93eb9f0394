#include "chirocool/rate_fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/NonLinearOptimization>

namespace chirocool {

namespace {

constexpr double kBandLow = 0.995;
constexpr double kBandHigh = 1.005;

// Residuals a exp(-b s) - y with s = t - t_lo.
struct ExpFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const Eigen::VectorXd& s;
  const Eigen::VectorXd& y;

  int inputs() const { return 2; }
  int values() const { return static_cast<int>(s.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    f = (p(0) * (-p(1) * s.array()).exp() - y.array()).matrix();
    return 0;
  }
  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& j) const {
    const Eigen::ArrayXd e = (-p(1) * s.array()).exp();
    j.col(0) = e.matrix();
    j.col(1) = (-p(0) * s.array() * e).matrix();
    return 0;
  }
};

void check_ion(const Trajectory& traj, int ion) {
  if (ion < 1 || ion > traj.n_ions()) throw InvalidArgument("ion index out of range");
  if (traj.times.size() < 3) throw InvalidArgument("trajectory has fewer than three samples");
}

}  // namespace

CoolingRateFit fit_cooling_rate(const Trajectory& traj, int ion, double n_st, const FitOptions& opt) {
  check_ion(traj, ion);
  const auto& n = traj.n[static_cast<std::size_t>(ion) - 1];
  const double start = n.front() - n_st;
  const double end = n.back() - n_st;
  if (!(start > 0.0) || !(end <= opt.tail_fraction * start)) {
    std::ostringstream os;
    os << "ion " << ion << " has not decayed far enough: (n(t_end) - n_st) / (n(0) - n_st) = " << end / start
       << ", need <= " << opt.tail_fraction << "; extend t_end";
    throw SolverError(SolverError::Kind::kFitFailure, os.str());
  }

  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    if (traj.times[k] >= opt.t_lo && traj.times[k] <= opt.t_hi) idx.push_back(k);
  if (idx.size() < 3) throw SolverError(SolverError::Kind::kFitFailure, "fewer than three samples in the fit window");

  CoolingRateFit fit;
  fit.ion = ion;
  fit.n_st = n_st;
  fit.t_lo = traj.times[idx.front()];
  fit.t_hi = traj.times[idx.back()];
  Eigen::VectorXd s(idx.size()), y(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    s(k) = traj.times[idx[k]] - fit.t_lo;
    y(k) = n[idx[k]] - n_st;
    if (k > 0 && y(k) > y(k - 1)) fit.monotone = false;
  }

  // initial rate from the half-decay time inside the window
  double b0 = 0.0;
  for (Eigen::Index k = 1; k < y.size(); ++k) {
    if (y(k) <= 0.5 * y(0)) {
      b0 = std::log(2.0) / s(k);
      break;
    }
  }
  if (!(b0 > 0.0)) b0 = std::log(std::max(y(0) / std::max(y(y.size() - 1), 1e-300), 2.0)) / s(s.size() - 1);

  ExpFunctor functor{s, y};
  Eigen::LevenbergMarquardt<ExpFunctor> lm(functor);
  lm.parameters.maxfev = opt.max_iterations * 3;
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  Eigen::VectorXd p(2);
  p << y(0), b0;
  const auto status = lm.minimize(p);
  fit.iterations = static_cast<int>(lm.iter);
  fit.converged = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::XtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::FtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::GtolTooSmall;
  if (!fit.converged || !std::isfinite(p(0)) || !std::isfinite(p(1))) {
    std::ostringstream os;
    os << "exponential fit for ion " << ion << " did not converge (status " << static_cast<int>(status) << ", "
       << lm.iter << " iterations, a=" << p(0) << ", W=" << p(1) << ")";
    throw SolverError(SolverError::Kind::kFitFailure, os.str());
  }
  Eigen::VectorXd f(s.size());
  functor(p, f);
  fit.rms_residual = std::sqrt(f.squaredNorm() / static_cast<double>(f.size()));
  fit.rate = p(1);
  fit.a = p(0) * std::exp(p(1) * fit.t_lo);
  return fit;
}

std::optional<double> crossing_time(const Trajectory& traj, int ion) {
  check_ion(traj, ion);
  const auto& v = traj.ntilde[static_cast<std::size_t>(ion) - 1];
  const auto& t = traj.times;
  if (!(v.back() < kBandLow)) return std::nullopt;
  const std::size_t peak = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  // last sample after the peak above the upper band edge
  std::size_t k = v.size();
  std::size_t last_above = peak;
  bool any_above = false;
  for (std::size_t j = peak; j < v.size(); ++j) {
    if (v[j] > kBandHigh) {
      last_above = j;
      any_above = true;
    }
  }
  for (std::size_t j = any_above ? last_above : peak; j < v.size(); ++j) {
    if (v[j] <= 1.0) {
      k = j;
      break;
    }
  }
  if (k == v.size()) return std::nullopt;
  if (k == 0 || v[k - 1] <= 1.0) return t[k];
  const double w = (v[k - 1] - 1.0) / (v[k - 1] - v[k]);
  return t[k - 1] + w * (t[k] - t[k - 1]);
}

}  // namespace chirocool

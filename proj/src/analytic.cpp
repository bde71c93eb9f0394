#include "chirocool/analytic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "chirocool/core.hpp"

namespace chirocool::analytic {

double single_ion_nst(double gamma_total, double eta, double omega) {
  const double g = gamma_total / (4.0 * kTrapFrequency);
  const double x = eta * omega / kTrapFrequency;
  return g * g + x * x / 8.0;
}

TargetOccupation target_nst(double gamma_r, double gamma_l, double gamma_ng, double eta, double omega) {
  const double big_gamma = gamma_r + gamma_l + gamma_ng;
  const double x2 = eta * eta * omega * omega;
  const double rl = gamma_r * gamma_l;
  const double denom = x2 + 2.0 * big_gamma * big_gamma - 8.0 * rl;
  if (!(denom > 0.0)) {
    std::ostringstream os;
    os << "target occupation outside its validity region: eta^2 Omega^2 + 2 Gamma^2 - 8 gamma_r gamma_l = " << denom;
    throw SolverError(SolverError::Kind::kOutOfValidity, os.str());
  }
  const double nu2 = kTrapFrequency * kTrapFrequency;
  TargetOccupation out{};
  out.single_part = big_gamma * big_gamma / (16.0 * nu2) + x2 / (8.0 * nu2);
  out.chiral_part = -rl / (4.0 * nu2) + x2 / denom * rl / nu2;
  out.value = out.single_part + out.chiral_part;
  return out;
}

double target_nst_ideal(double gamma_r, double gamma_l, double eta, double omega) {
  const double diff2 = (gamma_r - gamma_l) * (gamma_r - gamma_l);
  const double x2 = eta * eta * omega * omega;
  const double nu2 = kTrapFrequency * kTrapFrequency;
  return diff2 / (16.0 * nu2) + (1.0 + 8.0 * gamma_r * gamma_l / (x2 + 2.0 * diff2)) * x2 / (8.0 * nu2);
}

double target_nst_max(double gamma, double eta, double omega) {
  const double nu2 = kTrapFrequency * kTrapFrequency;
  return gamma * gamma / (4.0 * nu2) + eta * eta * omega * omega / (8.0 * nu2);
}

double beta0(double eta, double omega, double total_decay) {
  const double x = eta * omega;
  const double g2 = total_decay * total_decay;
  const double arg = 1.0 - x / g2 * (std::sqrt(x * x + 2.0 * g2) - x / 2.0);
  if (arg < 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(arg);
}

Minima minima(double eta, double omega, double total_decay, double beta) {
  const double x = eta * omega;
  const double g = total_decay;
  const double root = std::sqrt(x * x + 2.0 * g * g);
  const double nu2 = kTrapFrequency * kTrapFrequency;
  Minima out;
  out.n1_min = x / (8.0 * nu2) * root - x * x / (32.0 * nu2);
  out.gamma_condition = 2.0 * g * g >= 3.0 * x * x;
  out.beta0 = beta0(eta, omega, total_decay);
  const double disc = (beta * beta - 1.0) * g * g - x * x / 2.0 + x * root;
  if (out.gamma_condition && disc >= 0.0) {
    const double half = 0.5 * std::sqrt(disc);
    out.gamma_r_min = std::make_pair(0.5 * beta * g - half, 0.5 * beta * g + half);
    out.feasible = true;
  }
  return out;
}

SuperiorBoundary superior_boundary(double eta, double omega, double total_decay, double beta) {
  const double x2 = eta * eta * omega * omega;
  const double g = total_decay;
  SuperiorBoundary out;
  if (2.0 * g * g < 3.0 * x2) return out;
  const double disc = (beta * beta - 1.0) * g * g + 1.5 * x2;
  if (disc < 0.0) return out;
  const double half = 0.5 * std::sqrt(disc);
  out.gamma_r_s = std::make_pair(0.5 * beta * g - half, 0.5 * beta * g + half);
  out.exists = true;
  return out;
}

IdealExtrema ideal_extrema(double gamma, double eta, double omega) {
  const double x = eta * omega;
  IdealExtrema out;
  const double arg = -x * x / 2.0 + x * std::sqrt(x * x + 2.0 * gamma * gamma);
  if (arg >= 0.0 && arg <= gamma * gamma) out.difference_min = std::sqrt(arg);
  return out;
}

Prediction predict(double gamma_r, double gamma_l, double gamma_ng, double eta, double omega) {
  Prediction p;
  p.total_decay = gamma_r + gamma_l + gamma_ng;
  p.beta = (gamma_r + gamma_l) / p.total_decay;
  p.n_st_single = single_ion_nst(p.total_decay, eta, omega);
  try {
    p.n1_st = target_nst(gamma_r, gamma_l, gamma_ng, eta, omega).value;
  } catch (const SolverError&) {
    p.n1_st.reset();
  }
  p.n1_max = target_nst_max(gamma_r + gamma_l, eta, omega);
  p.min = minima(eta, omega, p.total_decay, p.beta);
  p.boundary = superior_boundary(eta, omega, p.total_decay, p.beta);
  p.sideband_regime = p.total_decay <= 0.2 * kTrapFrequency && eta * omega <= 0.2 * kTrapFrequency;
  return p;
}

}  // namespace chirocool::analytic

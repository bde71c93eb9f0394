// Acceptance suite: one line per criterion, "PASS"/"FAIL" plus the measured
// numbers. Run with a criterion number or "all".

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chirocool/analytic.hpp"
#include "chirocool/dynamics.hpp"
#include "chirocool/liouvillian.hpp"
#include "chirocool/rate_fit.hpp"
#include "chirocool/reduced.hpp"
#include "chirocool/steady_state.hpp"
#include "chirocool/sweep.hpp"

using namespace chirocool;
namespace an = chirocool::analytic;

namespace {

namespace tol {
constexpr double kSingleIonRel = 0.05;
constexpr double kRetrieval = 0.02;
constexpr double kAnalyticRel = 0.10;
constexpr double kTenfoldCenter = 0.11;
constexpr double kTenfoldHalfWidth = 0.02;
constexpr double kBeta0Center = 0.70;
constexpr double kBeta0HalfWidth = 0.01;
constexpr double kBetaCoalesceLo = 0.68;
constexpr double kBetaCoalesceHi = 0.72;
constexpr double kReducedTwoIonRel = 1e-10;
constexpr double kReducedThreeIonRel = 0.10;
constexpr double kSaturationCenter = 0.725;
constexpr double kSaturationHalfWidth = 0.015;
constexpr double kMonotoneSlack = 1e-9;
constexpr double kRateRatio = 4.0;
constexpr double kRateRatioRel = 0.15;
constexpr double kCrossLo = 3e3;
constexpr double kCrossHi = 3e4;
constexpr double kTraceRel = 1e-12;
constexpr double kResidualRel = 1e-10;
constexpr double kPositivity = -1e-8;
constexpr double kHermiticity = 1e-8;
}  // namespace tol

constexpr double kGamma = 0.1;
constexpr double kEta = 0.04;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ChainConfig two_ion(double ratio, double beta, double omega1, double omega2) {
  ChainConfig c;
  c.eta = kEta;
  c.omega = {omega1, omega2};
  c.gamma_r = ratio * beta * kGamma;
  c.gamma_l = (1.0 - ratio) * beta * kGamma;
  c.gamma_ng = (1.0 - beta) * kGamma;
  return c;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// Indices of interior local minima.
std::vector<std::size_t> local_minima(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k + 1 < y.size(); ++k)
    if (y[k] < y[k - 1] && y[k] <= y[k + 1]) out.push_back(k);
  return out;
}

Outcome single_ion_law() {
  double worst = 0.0;
  for (double g : {0.05, 0.1}) {
    for (double om : {0.1, 0.5, 1.0}) {
      ChainConfig c;
      c.n_ions = 1;
      c.omega = {om};
      c.gamma_r = g;
      c.gamma_l = 0.0;
      c.n_max = 2;
      const double n = solve_observables(c).n[0];
      const double f = an::single_ion_nst(g, kEta, om);
      worst = std::max(worst, std::abs(n - f) / f);
    }
  }
  return {worst <= tol::kSingleIonRel, fmt("max relative error %.4f (tol %.2f)", worst, tol::kSingleIonRel)};
}

Outcome retrieval() {
  const double t = solve_observables(two_ion(1.0, 1.0, 1.0, 0.1)).ntilde[0];
  const double r = solve_observables(two_ion(0.0, 1.0, 1.0, 0.1)).ntilde[1];
  const bool ok = std::abs(t - 1.0) <= tol::kRetrieval && std::abs(r - 1.0) <= tol::kRetrieval;
  return {ok, fmt("ntilde_1(gamma_r=gamma) = %.5f, ntilde_2(gamma_r=0) = %.5f (tol %.2f)", t, r, tol::kRetrieval)};
}

Outcome analytic_agreement() {
  bool ok = true;
  std::ostringstream os;
  for (double beta : {1.0, 0.8, 0.7, 0.5}) {
    double worst_right = 0.0, worst_left = 0.0, mean_left = 0.0;
    int left = 0;
    for (double ratio : linspace(0.0, 1.0, 41)) {
      const ChainConfig c = two_ion(ratio, beta, 1.0, 0.1);
      const double full = solve_observables(c).n[0];
      const double ana = an::target_nst(c.gamma_r, c.gamma_l, c.gamma_ng, kEta, 1.0).value;
      const double dev = (ana - full) / full;
      if (ratio >= 0.5 - 1e-12) {
        worst_right = std::max(worst_right, std::abs(dev));
      } else {
        if (std::abs(dev) > std::abs(worst_left)) worst_left = dev;
        mean_left += dev;
        ++left;
      }
    }
    mean_left /= left;
    // one-sided: the largest deviation and the average both have analytic < numeric
    const bool right_ok = worst_right <= tol::kAnalyticRel;
    const bool left_ok = worst_left < 0.0 && mean_left < 0.0;
    ok = ok && right_ok && left_ok;
    os << fmt("beta=%.1f: max|dev| right %.4f, left largest %+.4f mean %+.4f; ", beta, worst_right, worst_left,
              mean_left);
  }
  os << fmt("(tol %.2f right; left must be analytic below numeric)", tol::kAnalyticRel);
  return {ok, os.str()};
}

Outcome tenfold() {
  const auto ratios = linspace(0.0, 1.0, 41);
  std::vector<double> nt;
  for (double r : ratios) nt.push_back(solve_observables(two_ion(r, 1.0, 0.1, 0.01)).ntilde[0]);
  const double cell = ratios[1] - ratios[0];
  const auto lo = std::min_element(nt.begin(), nt.begin() + 21);
  const auto hi = std::min_element(nt.begin() + 20, nt.end());
  const double r_lo = ratios[static_cast<std::size_t>(lo - nt.begin())];
  const double r_hi = ratios[static_cast<std::size_t>(hi - nt.begin())];
  const double best = std::min(*lo, *hi);
  const bool value_ok = std::abs(best - tol::kTenfoldCenter) <= tol::kTenfoldHalfWidth;
  const bool where_ok = std::abs(r_lo - 0.382) <= cell && std::abs(r_hi - 0.618) <= cell;
  return {value_ok && where_ok,
          fmt("min ntilde_1 = %.4f (want %.2f +- %.2f) at gamma_r/gamma = %.3f and %.3f (want 0.382, 0.618 +- %.3f)",
              best, tol::kTenfoldCenter, tol::kTenfoldHalfWidth, r_lo, r_hi, cell)};
}

Outcome superior_boundary() {
  const sweep::SweepSpec spec = sweep::figure_preset("fig2b");
  const sweep::SweepResult res = sweep::run_grid(spec, 0);
  const auto ratios = spec.axis1.values();
  const auto omegas = spec.axis2->values();
  const double cell = ratios[1] - ratios[0];
  double worst = 0.0;
  int columns = 0;
  bool ok = true;
  for (int j = 0; j < res.cols(); ++j) {
    const double om = omegas[static_cast<std::size_t>(j)];
    if (om > 0.5 + 1e-12) continue;
    ++columns;
    std::vector<double> crossings;
    for (int i = 0; i + 1 < res.rows(); ++i) {
      const double a = res.at(i, j).values[0].value - 1.0;
      const double b = res.at(i + 1, j).values[0].value - 1.0;
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      // the unidirectional end points sit at ntilde = 1 up to rounding
      if (std::abs(a) < 1e-9 || std::abs(b) < 1e-9) continue;
      if ((a < 0.0) != (b < 0.0)) crossings.push_back(ratios[i] + cell * a / (a - b));
    }
    // the contour branch bracketing gamma/2; another branch can sit near gamma_r = 0
    double below = -1.0, above = 2.0;
    for (double x : crossings) {
      if (x < 0.5) below = std::max(below, x);
      else above = std::min(above, x);
    }
    const auto pred = an::superior_boundary(kEta, om, kGamma, 1.0);
    if (!pred.exists || below < 0.0 || above > 1.0) {
      ok = false;
      continue;
    }
    worst = std::max(worst, std::abs(below - pred.gamma_r_s->first / kGamma));
    worst = std::max(worst, std::abs(above - pred.gamma_r_s->second / kGamma));
  }
  ok = ok && worst <= cell;
  return {ok, fmt("%d columns with Omega_1 <= 0.5, max contour offset %.4f in gamma_r/gamma (one cell = %.3f)",
                  columns, worst, cell)};
}

Outcome beta0_threshold() {
  const double b0 = an::beta0(kEta, 1.0, kGamma);
  const bool ana_ok = std::abs(b0 - tol::kBeta0Center) <= tol::kBeta0HalfWidth;
  const auto ratios = linspace(0.0, 1.0, 201);
  auto minima_at = [&](double beta) {
    std::vector<double> n;
    for (double r : ratios) n.push_back(solve_observables(two_ion(r, beta, 1.0, 0.1)).n[0]);
    return local_minima(n).size();
  };
  // smallest beta on a 0.01 grid that still shows two separate minima
  double split_beta = std::nan("");
  double merged_beta = std::nan("");
  for (int k = 80; k >= 60; --k) {
    const double beta = k / 100.0;
    if (minima_at(beta) >= 2) {
      split_beta = beta;
    } else {
      merged_beta = beta;
      break;
    }
  }
  const bool num_ok = split_beta <= tol::kBetaCoalesceHi + 1e-12 && merged_beta >= tol::kBetaCoalesceLo - 1e-12;
  return {ana_ok && num_ok,
          fmt("analytic beta0 = %.4f (want %.2f +- %.2f); full solver: two minima at beta = %.2f, one at beta = %.2f "
              "(coalescence must lie in [%.2f, %.2f])",
              b0, tol::kBeta0Center, tol::kBeta0HalfWidth, split_beta, merged_beta, tol::kBetaCoalesceLo,
              tol::kBetaCoalesceHi)};
}

Outcome nonguided_cooling() {
  const sweep::SweepSpec spec = sweep::figure_preset("fig4_n2");
  const double at08 = solve_observables(sweep::configure_point(spec, 0.5, 0.8)).ntilde[0];
  const double at1 = solve_observables(sweep::configure_point(spec, 0.5, 1.0)).ntilde[0];
  return {at08 < 1.0 && at1 > 1.0,
          fmt("ntilde_1(gamma_r=0.5 gamma): beta=0.8 -> %.4f (want < 1), beta=1 -> %.4f (want > 1)", at08, at1)};
}

Outcome reduced_equivalence() {
  double worst2 = 0.0;
  for (double beta : {1.0, 0.8, 0.6}) {
    for (double r : linspace(0.0, 1.0, 21)) {
      reduced::Rates rates{r * beta * kGamma, (1 - r) * beta * kGamma, (1 - beta) * kGamma, kEta, 1.0};
      const double red = reduced::solve_reduced(2, rates).n1;
      const double ref = an::target_nst(rates.gamma_r, rates.gamma_l, rates.gamma_ng, kEta, 1.0).value;
      worst2 = std::max(worst2, std::abs(red - ref) / ref);
    }
  }
  double worst3 = 0.0;
  int points = 0;
  for (double beta : {1.0, 0.8}) {
    for (double r : linspace(0.5, 1.0, 11)) {
      // two equally driven refrigerants at the reciprocal ideal point are degenerate
      if (beta == 1.0 && r == 0.5) continue;
      ChainConfig c;
      c.n_ions = 3;
      c.eta = kEta;
      c.omega = {1.0, 0.1, 0.1};
      c.gamma_r = r * beta * kGamma;
      c.gamma_l = (1 - r) * beta * kGamma;
      c.gamma_ng = (1 - beta) * kGamma;
      const double full = solve_observables(c).n[0];
      const double red = reduced::solve_reduced(3, {c.gamma_r, c.gamma_l, c.gamma_ng, kEta, 1.0}).n1;
      worst3 = std::max(worst3, std::abs(red - full) / full);
      ++points;
    }
  }
  return {worst2 <= tol::kReducedTwoIonRel && worst3 <= tol::kReducedThreeIonRel,
          fmt("N=2 reduced vs closed form %.2e (tol %.0e); N=3 reduced vs full %.4f over %d points (tol %.2f)", worst2,
              tol::kReducedTwoIonRel, worst3, points, tol::kReducedThreeIonRel)};
}

Outcome saturation() {
  std::vector<double> m;
  for (int n = 2; n <= 30; ++n) m.push_back(reduced::min_search(n, kGamma, kEta, 1.0).ntilde1_min);
  bool monotone = true;
  int first_rise = -1;
  for (std::size_t k = 1; k < m.size(); ++k) {
    if (m[k] > m[k - 1] + tol::kMonotoneSlack) {
      monotone = false;
      if (first_rise < 0) first_rise = static_cast<int>(k) + 2;
    }
  }
  double lo = 1e9, hi = -1e9;
  for (std::size_t k = 3; k < m.size(); ++k) {
    lo = std::min(lo, m[k]);
    hi = std::max(hi, m[k]);
  }
  const bool band = lo >= tol::kSaturationCenter - tol::kSaturationHalfWidth &&
                    hi <= tol::kSaturationCenter + tol::kSaturationHalfWidth;
  const auto at = std::min_element(m.begin(), m.end());
  return {monotone && band,
          fmt("N>=5 range [%.5f, %.5f] (want %.3f +- %.3f); non-increasing: %s (smallest %.5f at N=%d, first rise at "
              "N=%d, N=30 value %.5f)",
              lo, hi, tol::kSaturationCenter, tol::kSaturationHalfWidth, monotone ? "yes" : "no", *at,
              static_cast<int>(at - m.begin()) + 2, first_rise, m.back())};
}

double single_ion_rate(double omega) {
  ChainConfig c;
  c.n_ions = 1;
  c.eta = kEta;
  c.omega = {omega};
  c.gamma_r = kGamma;
  c.gamma_l = 0.0;
  c.n_max = 4;
  const double w_est = kEta * kEta * omega * omega / kGamma;
  EvolveOptions o;
  o.integrator = Integrator::kKrylov;
  const Trajectory tr = evolve(c, thermal_state(0.7, 4, 1), uniform_grid(5.0 / w_est, 401), o);
  return fit_cooling_rate(tr, 1, solve_observables(c).n[0], FitOptions::after_transient(kGamma)).rate;
}

Outcome rates_and_crossing() {
  const double w1 = single_ion_rate(0.1);
  const double w2 = single_ion_rate(0.2);
  const double ratio = w2 / w1;
  const bool a_ok = std::abs(ratio - tol::kRateRatio) <= tol::kRateRatioRel * tol::kRateRatio;

  sweep::SweepSpec spec = sweep::figure_preset("fig3a");
  spec.axis1 = sweep::Axis{sweep::AxisKind::kGammaROverGamma, 0.5, 0.85, 2, false};
  spec.observables = {sweep::Observable::parse("W_1")};
  const auto res = sweep::run_grid(spec, 0);
  const auto& w05 = res.cells[0].values[0];
  const auto& w085 = res.cells[1].values[0];
  const bool b_ok = w05.ok() && w085.ok() && w085.value > w05.value;

  ChainConfig c = sweep::configure_point(spec, 0.85, std::nan(""));
  c.n_max = 4;
  EvolveOptions o;
  o.integrator = Integrator::kKrylov;
  const Trajectory tr = evolve(c, thermal_state(0.7, 4, 2), uniform_grid(2e4, 81), o);
  const auto cross = crossing_time(tr, 1);
  const bool c_ok = cross && *cross >= tol::kCrossLo && *cross <= tol::kCrossHi;

  return {a_ok && b_ok && c_ok,
          fmt("(a) W(0.2)/W(0.1) = %.3f (want %.0f +- %.0f%%); (b) W_1(0.5) = %.3e [%s], W_1(0.85) = %.3e [%s]; "
              "(c) ntilde_1 crossing at t = %.0f (want [%.0e, %.0e])",
              ratio, tol::kRateRatio, 100 * tol::kRateRatioRel, w05.value, w05.status.c_str(), w085.value,
              w085.status.c_str(), cross ? *cross : std::nan(""), tol::kCrossLo, tol::kCrossHi)};
}

Outcome structural() {
  std::mt19937 gen(2024);
  std::normal_distribution<double> nd;
  double trace_worst = 0.0, residual_worst = 0.0, positivity_worst = 1.0;
  for (int n_max : {1, 4}) {
    for (double ratio : {0.2, 0.5, 0.85}) {
      ChainConfig c = two_ion(ratio, 0.9, 1.0, 0.1);
      c.xi = 1.0 + ratio;
      c.n_max = n_max;
      const Liouvillian gen_l = Liouvillian::from_config(c);
      const long d = gen_l.dim();
      for (int k = 0; k < 5; ++k) {
        Matrix m(d, d);
        for (long i = 0; i < d; ++i)
          for (long j = 0; j < d; ++j) m(i, j) = cplx(nd(gen), nd(gen));
        const Matrix rho = 0.5 * (m + m.adjoint());
        const double tr = std::abs(gen_l.apply(rho).trace());
        trace_worst = std::max(trace_worst, tr / (c.total_decay() * rho.norm()));
      }
      if (n_max == 1) {
        const SteadyState st = solve_steady(gen_l);
        residual_worst = std::max(residual_worst, st.residual / c.total_decay());
        positivity_worst = std::min(positivity_worst, st.rho.min_eigenvalue());
      }
    }
  }
  ChainConfig dyn = two_ion(0.85, 1.0, 1.0, 0.1);
  dyn.n_max = 4;
  double herm_worst = 0.0;
  for (Integrator integ : {Integrator::kKrylov, Integrator::kRungeKutta}) {
    EvolveOptions o;
    o.integrator = integ;
    const Trajectory tr = evolve(dyn, thermal_state(0.7, 4, 2), uniform_grid(100.0, 11), o);
    herm_worst = std::max(herm_worst, tr.stats.max_hermiticity_drift);
  }

  auto csv = [](const sweep::SweepResult& r) {
    std::ostringstream os;
    sweep::write_csv(os, r);
    return os.str();
  };
  sweep::SweepSpec s = sweep::figure_preset("fig2a");
  s.axis1.points = 9;
  s.axis2->points = 6;
  sweep::SweepSpec red = sweep::figure_preset("fig5a");
  red.axis1.points = 11;
  red.axis2->points = 11;
  const bool deterministic = csv(sweep::run_grid(s, 1)) == csv(sweep::run_grid(s, 8)) &&
                             csv(sweep::run_grid(red, 1)) == csv(sweep::run_grid(red, 8));

  const bool ok = trace_worst <= tol::kTraceRel && residual_worst <= tol::kResidualRel &&
                  positivity_worst >= tol::kPositivity && herm_worst <= tol::kHermiticity && deterministic;
  return {ok, fmt("|Tr L[rho]|/(Gamma |rho|) %.1e (tol %.0e); residual/Gamma %.1e (tol %.0e); min eigenvalue %.1e "
                  "(tol %.0e); Hermiticity drift %.1e (tol %.0e); 1 vs 8 workers identical: %s",
                  trace_worst, tol::kTraceRel, residual_worst, tol::kResidualRel, positivity_worst, tol::kPositivity,
                  herm_worst, tol::kHermiticity, deterministic ? "yes" : "no")};
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>> kCriteria = {
    {1, {"single-ion law", single_ion_law}},
    {2, {"unidirectional retrieval", retrieval}},
    {3, {"analytic vs numeric agreement", analytic_agreement}},
    {4, {"tenfold improvement", tenfold}},
    {5, {"superior-cooling boundary", superior_boundary}},
    {6, {"beta0 threshold", beta0_threshold}},
    {7, {"nonguided cooling at reciprocity", nonguided_cooling}},
    {8, {"reduced solver equivalence", reduced_equivalence}},
    {9, {"chain-length saturation", saturation}},
    {10, {"dynamics and rates", rates_and_crossing}},
    {11, {"structural properties", structural}},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  const std::string arg = argc > 1 ? argv[1] : "all";
  if (arg == "all") {
    for (const auto& [id, _] : kCriteria) ids.push_back(id);
  } else {
    const int id = std::atoi(arg.c_str());
    if (!kCriteria.count(id)) {
      std::fprintf(stderr, "usage: %s [all|1..11]\n", argv[0]);
      return 2;
    }
    ids.push_back(id);
  }
  int failed = 0;
  for (int id : ids) {
    const auto& [name, run] = kCriteria.at(id);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str(), sec);
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}

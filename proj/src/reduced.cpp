#include "chirocool/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "chirocool/analytic.hpp"

namespace chirocool::reduced {

namespace {

constexpr double kMaxCondition = 1e12;

void check_inputs(int n_ions, const Rates& r) {
  if (n_ions < 2) throw InvalidArgument("reduced solver needs at least two ions");
  if (r.gamma_r < 0.0 || r.gamma_l < 0.0 || r.gamma_ng < 0.0) throw InvalidArgument("negative rate");
  if (!(r.total() > 0.0)) throw InvalidArgument("total decay rate must be positive");
  if (!(r.eta > 0.0) || !(r.omega > 0.0)) throw InvalidArgument("eta and the target Rabi frequency must be positive");
}

// Flat positions of the unknowns.
struct Layout {
  int m;  // refrigerant count
  int a() const { return 0; }
  int b(int i) const { return 1 + i; }
  int c(int i) const { return 1 + m + i; }
  int d(int i, int j) const {
    if (i > j) std::swap(i, j);
    // upper triangle, row-major
    return 1 + 2 * m + i * m - i * (i - 1) / 2 + (j - i);
  }
  int e() const { return 1 + 2 * m + m * (m + 1) / 2; }
  int size() const { return e() + 1; }
};

double rho_e1_value(const Rates& r) {
  const double x = r.eta * r.omega / kTrapFrequency;
  return x * x / 16.0;
}

void singular_error(double rcond) {
  std::ostringstream os;
  os << "reduced system is singular (condition estimate " << (rcond > 0 ? 1.0 / rcond : INFINITY)
     << "); degenerate parameter combination";
  throw SolverError(SolverError::Kind::kSingularSystem, os.str());
}

// Coefficients of the eta*Omega couplings between the (A, B) block and the
// (C, rho_e0) block. In the literal system these carry a factor i. In the real
// form A = i a and B = i b; the A row and the B rows are divided by i so that every
// coefficient is real.
template <typename T>
struct Couplings {
  T a_row_a, b_rows_c, c_rows_b, e_row_a;
};

Couplings<cplx> literal_couplings(double x) { return {-2.0 * kI * x, kI * x, kI * x, 2.0 * kI * x}; }
Couplings<double> real_couplings(double x) { return {2.0 * x, x, -x, -2.0 * x}; }

template <typename MatrixT, typename VectorT, typename T>
void fill_system(int n_ions, const Rates& r, const Couplings<T>& k, MatrixT& mat, VectorT& rhs) {
  const Layout lay{n_ions - 1};
  const int m = lay.m;
  const double big = r.total();
  const double gr = r.gamma_r;
  const double gl = r.gamma_l;
  mat.setZero(lay.size(), lay.size());
  rhs.setZero(lay.size());

  int row = 0;
  // 0 = -2i x A - 2 Gamma rho_e1
  mat(row, lay.a()) = k.a_row_a;
  rhs(row) = 2.0 * big * rho_e1_value(r);
  ++row;
  // 0 = Gamma B_i + 2 gr A + 2 gr sum_{j<i} B_j + 2 gl sum_{j>i} B_j + i x C_i
  for (int i = 0; i < m; ++i, ++row) {
    mat(row, lay.b(i)) += big;
    mat(row, lay.a()) += 2.0 * gr;
    for (int j = 0; j < i; ++j) mat(row, lay.b(j)) += 2.0 * gr;
    for (int j = i + 1; j < m; ++j) mat(row, lay.b(j)) += 2.0 * gl;
    mat(row, lay.c(i)) += k.b_rows_c;
  }
  // 0 = 2 Gamma C_i + 2 gr sum_{j<i} C_j + 2 gl sum_{j>i} C_j + 2 gl sum_j D_ji + i x B_i + 2 gr rho_e0
  for (int i = 0; i < m; ++i, ++row) {
    mat(row, lay.c(i)) += 2.0 * big;
    for (int j = 0; j < i; ++j) mat(row, lay.c(j)) += 2.0 * gr;
    for (int j = i + 1; j < m; ++j) mat(row, lay.c(j)) += 2.0 * gl;
    for (int j = 0; j < m; ++j) mat(row, lay.d(j, i)) += 2.0 * gl;
    mat(row, lay.b(i)) += k.c_rows_b;
    mat(row, lay.e()) += 2.0 * gr;
  }
  // 0 = Gamma D_ij + gr sum_{k<i} D_kj + gl sum_{k>i} D_kj + gr sum_{k<j} D_ik + gl sum_{k>j} D_ik + gr (C_i + C_j)
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j, ++row) {
      mat(row, lay.d(i, j)) += big;
      for (int q = 0; q < i; ++q) mat(row, lay.d(q, j)) += gr;
      for (int q = i + 1; q < m; ++q) mat(row, lay.d(q, j)) += gl;
      for (int q = 0; q < j; ++q) mat(row, lay.d(i, q)) += gr;
      for (int q = j + 1; q < m; ++q) mat(row, lay.d(i, q)) += gl;
      mat(row, lay.c(i)) += gr;
      mat(row, lay.c(j)) += gr;
    }
  }
  // 0 = 2 Gamma rho_e0 + 4 gl sum_j C_j + 2i x A
  mat(row, lay.e()) += 2.0 * big;
  for (int j = 0; j < m; ++j) mat(row, lay.c(j)) += 4.0 * gl;
  mat(row, lay.a()) += k.e_row_a;
}

// rho_g1 from 0 = i x (rho_e0 - rho_g1) + Gamma A + 2 gl sum_j B_j.
template <typename T>
double closure(const Rates& r, T a, T sum_b, double rho_e0, bool real_form) {
  const double x = r.eta * r.omega;
  if (real_form) {
    // A = i a, B = i b: x (rho_e0 - rho_g1) + Gamma a + 2 gl sum b = 0
    return rho_e0 + (r.total() * std::real(a) + 2.0 * r.gamma_l * std::real(sum_b)) / x;
  }
  const cplx g1 = rho_e0 + (r.total() * cplx(a) + 2.0 * r.gamma_l * cplx(sum_b)) / (kI * x);
  return g1.real();
}

ReducedSolution finish(int n_ions, const Rates& r, ReducedSolution sol) {
  sol.n_ions = n_ions;
  sol.unknowns = unknown_count(n_ions);
  sol.rho_e1 = rho_e1_value(r);
  sol.n1 = sol.rho_e1 + sol.rho_g1;
  sol.ntilde1 = sol.n1 / analytic::single_ion_nst(r.total(), r.eta, r.omega);
  return sol;
}

}  // namespace

int unknown_count(int n_ions) { return n_ions * (n_ions + 3) / 2; }

ComplexSystem complex_system(int n_ions, const Rates& rates) {
  check_inputs(n_ions, rates);
  ComplexSystem sys;
  fill_system(n_ions, rates, literal_couplings(rates.eta * rates.omega), sys.matrix, sys.rhs);
  return sys;
}

ReducedSolution solve_reduced_complex(int n_ions, const Rates& rates) {
  const auto sys = complex_system(n_ions, rates);
  Eigen::PartialPivLU<Matrix> lu(sys.matrix);
  const double rc = lu.rcond();
  if (!(rc * kMaxCondition >= 1.0)) singular_error(rc);
  const Vector x = lu.solve(sys.rhs);
  const Layout lay{n_ions - 1};
  ReducedSolution sol;
  sol.rcond = rc;
  sol.a = x(lay.a());
  cplx sum_b = 0.0;
  sol.d = Eigen::MatrixXd::Zero(lay.m, lay.m);
  for (int i = 0; i < lay.m; ++i) {
    sol.b.push_back(x(lay.b(i)));
    sol.c.push_back(x(lay.c(i)));
    sum_b += x(lay.b(i));
    for (int j = 0; j < lay.m; ++j) sol.d(i, j) = x(lay.d(i, j)).real();
  }
  sol.rho_e0 = x(lay.e()).real();
  sol.rho_g1 = closure(rates, sol.a, sum_b, sol.rho_e0, false);
  return finish(n_ions, rates, std::move(sol));
}

ReducedSolution solve_reduced(int n_ions, const Rates& rates) {
  check_inputs(n_ions, rates);
  Eigen::MatrixXd mat;
  Eigen::VectorXd rhs;
  fill_system(n_ions, rates, real_couplings(rates.eta * rates.omega), mat, rhs);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(mat);
  const double rc = lu.rcond();
  if (!(rc * kMaxCondition >= 1.0)) singular_error(rc);
  const Eigen::VectorXd x = lu.solve(rhs);
  const Layout lay{n_ions - 1};
  ReducedSolution sol;
  sol.rcond = rc;
  sol.a = cplx(0.0, x(lay.a()));
  double sum_b = 0.0;
  sol.d = Eigen::MatrixXd::Zero(lay.m, lay.m);
  for (int i = 0; i < lay.m; ++i) {
    sol.b.push_back(cplx(0.0, x(lay.b(i))));
    sol.c.push_back(cplx(x(lay.c(i)), 0.0));
    sum_b += x(lay.b(i));
    for (int j = 0; j < lay.m; ++j) sol.d(i, j) = x(lay.d(i, j));
  }
  sol.rho_e0 = x(lay.e());
  sol.rho_g1 = closure(rates, x(lay.a()), sum_b, sol.rho_e0, true);
  return finish(n_ions, rates, std::move(sol));
}

namespace {

Rates rates_at(double total_decay, double eta, double omega, double beta, double ratio) {
  const double gamma = beta * total_decay;
  Rates r;
  r.gamma_r = ratio * gamma;
  r.gamma_l = (1.0 - ratio) * gamma;
  r.gamma_ng = total_decay - gamma;
  r.eta = eta;
  r.omega = omega;
  return r;
}

double ntilde_or_inf(int n, double total_decay, double eta, double omega, double beta, double ratio) {
  try {
    return solve_reduced(n, rates_at(total_decay, eta, omega, beta, ratio)).ntilde1;
  } catch (const SolverError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Golden-section minimization of f on [lo, hi].
template <typename F>
std::pair<double, double> golden(F&& f, double lo, double hi, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

std::vector<double> unit_axis(int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[i] = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
  return v;
}

MinSearchResult refine(int n, double total_decay, double eta, double omega, const std::vector<double>& betas,
                       const std::vector<double>& ratios, const std::vector<double>& values) {
  if (betas.size() < 2 || ratios.size() < 2) throw InvalidArgument("min_search grid needs at least 2x2 points");
  MinSearchResult out;
  out.grid_beta = static_cast<int>(betas.size());
  out.grid_gamma = static_cast<int>(ratios.size());
  std::size_t best = values.size();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      ++out.failed_points;
      continue;
    }
    if (best == values.size()) {
      best = k;
      continue;
    }
    const std::size_t nr = ratios.size();
    // strict improvement, or equal value at a smaller gamma_r/gamma
    if (values[k] < values[best] || (values[k] == values[best] && ratios[k % nr] < ratios[best % nr])) best = k;
  }
  if (best == values.size()) throw SolverError(SolverError::Kind::kSingularSystem, "every grid point failed");
  const std::size_t nr = ratios.size();
  double beta = betas[best / nr];
  double ratio = ratios[best % nr];
  double value = values[best];
  const double hb = 1.0 / (static_cast<double>(betas.size()) - 1.0);
  const double hr = 1.0 / (static_cast<double>(ratios.size()) - 1.0);
  constexpr double kTol = 1e-9;
  for (int round = 0; round < 30; ++round) {
    const double old = value;
    auto [r_new, v_r] = golden([&](double r) { return ntilde_or_inf(n, total_decay, eta, omega, beta, r); },
                               std::max(0.0, ratio - hr), std::min(1.0, ratio + hr), kTol);
    if (v_r < value) {
      ratio = r_new;
      value = v_r;
    }
    auto [b_new, v_b] = golden([&](double b) { return ntilde_or_inf(n, total_decay, eta, omega, b, ratio); },
                               std::max(0.0, beta - hb), std::min(1.0, beta + hb), kTol);
    if (v_b < value) {
      beta = b_new;
      value = v_b;
    }
    if (old - value <= 1e-13 * std::abs(old)) break;
  }
  out.beta = beta;
  out.gamma_r_over_gamma = ratio;
  out.gamma_r = ratio * beta * total_decay;
  out.ntilde1_min = value;
  return out;
}

}  // namespace

std::vector<double> ntilde_grid(int n_ions, double total_decay, double eta, double omega,
                                const std::vector<double>& betas, const std::vector<double>& ratios) {
  const long nb = static_cast<long>(betas.size());
  const long nr = static_cast<long>(ratios.size());
  std::vector<double> out(static_cast<std::size_t>(nb * nr));
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < nb * nr; ++k) {
    const double v = ntilde_or_inf(n_ions, total_decay, eta, omega, betas[k / nr], ratios[k % nr]);
    out[k] = std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

MinSearchResult min_search(int n_ions, double total_decay, double eta, double omega, int grid_beta, int grid_gamma) {
  const auto betas = unit_axis(grid_beta);
  const auto ratios = unit_axis(grid_gamma);
  return refine(n_ions, total_decay, eta, omega, betas, ratios,
                ntilde_grid(n_ions, total_decay, eta, omega, betas, ratios));
}

MinSearchResult min_search_serial(int n_ions, double total_decay, double eta, double omega, int grid_beta,
                                  int grid_gamma) {
  const auto betas = unit_axis(grid_beta);
  const auto ratios = unit_axis(grid_gamma);
  std::vector<double> values;
  values.reserve(betas.size() * ratios.size());
  for (double b : betas) {
    for (double r : ratios) {
      const double v = ntilde_or_inf(n_ions, total_decay, eta, omega, b, r);
      values.push_back(std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN());
    }
  }
  return refine(n_ions, total_decay, eta, omega, betas, ratios, values);
}

std::vector<Element> element_filter(int n_ions) {
  if (n_ions < 2) throw InvalidArgument("element filter needs at least two ions");
  // labels: position 0 target spin (g/e), 1 target phonon (0/1), 2.. refrigerant spins (g/e)
  const int len = n_ions + 1;
  const long count = 1L << len;
  auto label = [&](long bits) {
    std::string s(static_cast<std::size_t>(len), ' ');
    s[0] = (bits >> (len - 1)) & 1 ? 'e' : 'g';
    s[1] = (bits >> (len - 2)) & 1 ? '1' : '0';
    for (int p = 2; p < len; ++p) s[p] = (bits >> (len - 1 - p)) & 1 ? 'e' : 'g';
    return s;
  };
  auto excitations = [](long bits) { return __builtin_popcountl(static_cast<unsigned long>(bits)); };
  const long doubly = (1L << (len - 1)) | (1L << (len - 2));
  std::vector<Element> out;
  for (long r = 0; r < count; ++r) {
    for (long c = 0; c < count; ++c) {
      const bool exception = r == doubly && c == doubly;
      const bool kept = excitations(r) <= 1 && excitations(c) <= 1 && excitations(r) + excitations(c) <= 2;
      if (kept || exception) out.push_back({label(r), label(c)});
    }
  }
  return out;
}

}  // namespace chirocool::reduced

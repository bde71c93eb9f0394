#include "chirocool/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "chirocool/rate_fit.hpp"
#include "chirocool/reduced.hpp"
#include "chirocool/steady_state.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chirocool::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::array<std::pair<AxisKind, const char*>, 6> kAxisNames{{
    {AxisKind::kGammaROverGamma, "gamma_r_over_gamma"},
    {AxisKind::kOmega1, "omega1"},
    {AxisKind::kOmega2OverOmega1, "omega2_over_omega1"},
    {AxisKind::kXi, "xi"},
    {AxisKind::kBeta, "beta"},
    {AxisKind::kNIons, "n_ions"},
}};

const std::array<std::pair<SolverKind, const char*>, 3> kSolverNames{{
    {SolverKind::kFullSteady, "full_steady"},
    {SolverKind::kReduced, "reduced"},
    {SolverKind::kDynamicsFit, "dynamics_fit"},
}};

// Order in which axis values are applied, so that e.g. beta is set before the
// gamma_r split regardless of which axis carries which parameter.
int priority(AxisKind k) {
  switch (k) {
    case AxisKind::kNIons: return 0;
    case AxisKind::kBeta: return 1;
    case AxisKind::kGammaROverGamma: return 2;
    case AxisKind::kOmega1: return 3;
    case AxisKind::kOmega2OverOmega1: return 4;
    case AxisKind::kXi: return 5;
  }
  return 6;
}

void apply_axis(ChainConfig& c, AxisKind kind, double v) {
  switch (kind) {
    case AxisKind::kNIons: {
      const double refrigerant = c.omega.size() > 1 ? c.omega[1] : 0.0;
      c.n_ions = static_cast<int>(std::lround(v));
      c.omega.resize(static_cast<std::size_t>(c.n_ions), refrigerant);
      c.phases.reset();
      break;
    }
    case AxisKind::kBeta: {
      const double total = c.total_decay();
      const double split = c.gamma() > 0.0 ? c.gamma_r / c.gamma() : 0.5;
      const double guided = v * total;
      c.gamma_r = split * guided;
      c.gamma_l = (1.0 - split) * guided;
      c.gamma_ng = total - guided;
      break;
    }
    case AxisKind::kGammaROverGamma: {
      const double guided = c.gamma();
      c.gamma_r = v * guided;
      c.gamma_l = (1.0 - v) * guided;
      break;
    }
    case AxisKind::kOmega1: {
      const double old = c.omega.front();
      for (std::size_t i = 1; i < c.omega.size(); ++i) c.omega[i] = old > 0.0 ? c.omega[i] / old * v : c.omega[i];
      c.omega.front() = v;
      break;
    }
    case AxisKind::kOmega2OverOmega1:
      for (std::size_t i = 1; i < c.omega.size(); ++i) c.omega[i] = v * c.omega.front();
      break;
    case AxisKind::kXi:
      c.xi = v;
      c.phases.reset();
      break;
  }
}

void check_axis(const Axis& a) {
  const std::string name = axis_name(a.kind);
  if (a.points < 1) throw InvalidArgument("axis " + name + " needs at least one point");
  if (a.points > 1 && !(a.hi > a.lo)) throw InvalidArgument("axis " + name + " needs hi > lo");
  if (a.log_scale && !(a.lo > 0.0)) throw InvalidArgument("logarithmic axis " + name + " needs lo > 0");
  auto inside = [&](double lo, double hi) {
    if (a.lo < lo || a.hi > hi)
      throw InvalidArgument("axis " + name + " range [" + format_double(a.lo) + ", " + format_double(a.hi) +
                            "] leaves [" + format_double(lo) + ", " + format_double(hi) + "]");
  };
  switch (a.kind) {
    case AxisKind::kGammaROverGamma:
    case AxisKind::kBeta: inside(0.0, 1.0); break;
    case AxisKind::kOmega1:
    case AxisKind::kOmega2OverOmega1:
    case AxisKind::kXi: inside(0.0, std::numeric_limits<double>::infinity()); break;
    case AxisKind::kNIons: inside(1.0, 64.0); break;
  }
}

bool multiple_of_two_pi(double xi) {
  const double k = xi / (2.0 * std::numbers::pi);
  return std::abs(k - std::round(k)) < 1e-9;
}

std::string error_status(const std::string& what) {
  std::string s = what;
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return "error: " + s;
}

CellValue failure(const std::string& what) { return {kNaN, error_status(what)}; }

CellValue ion_value(const std::vector<double>& v, int ion) {
  if (ion < 1 || ion > static_cast<int>(v.size())) return failure("ion index out of range");
  const double x = v[static_cast<std::size_t>(ion) - 1];
  if (!std::isfinite(x)) return failure("undefined normalization (undriven ion)");
  return {x, "ok"};
}

void eval_full(const SweepSpec& spec, const ChainConfig& c, SweepCell& cell) {
  const auto obs = solve_observables(c);
  cell.residual = obs.residual;
  for (std::size_t k = 0; k < spec.observables.size(); ++k) {
    const auto& o = spec.observables[k];
    switch (o.kind) {
      case ObservableKind::kNtilde: cell.values[k] = ion_value(obs.ntilde, o.ion); break;
      case ObservableKind::kN: cell.values[k] = ion_value(obs.n, o.ion); break;
      case ObservableKind::kReCst: cell.values[k] = {obs.cst().real(), "ok"}; break;
      default: cell.values[k] = failure("observable not provided by this solver");
    }
  }
}

void eval_reduced(const SweepSpec& spec, const ChainConfig& c, SweepCell& cell) {
  if (!multiple_of_two_pi(c.xi) || c.phases) throw InvalidArgument("reduced solver needs xi a multiple of 2 pi");
  reduced::Rates r;
  r.gamma_r = c.gamma_r;
  r.gamma_l = c.gamma_l;
  r.gamma_ng = c.gamma_ng;
  r.eta = c.eta;
  r.omega = c.omega.front();
  cell.residual = kNaN;
  std::optional<reduced::ReducedSolution> sol;
  for (std::size_t k = 0; k < spec.observables.size(); ++k) {
    const auto& o = spec.observables[k];
    try {
      if (o.kind == ObservableKind::kNtildeMin) {
        const auto m = reduced::min_search(c.n_ions, c.total_decay(), c.eta, c.omega.front(), spec.min_search_grid,
                                           spec.min_search_grid);
        cell.values[k] = {m.ntilde1_min, "ok"};
        continue;
      }
      if (!sol) sol = reduced::solve_reduced(c.n_ions, r);
      if (o.kind == ObservableKind::kNtilde)
        cell.values[k] = {sol->ntilde1, "ok"};
      else if (o.kind == ObservableKind::kN)
        cell.values[k] = {sol->n1, "ok"};
      else
        cell.values[k] = failure("observable not provided by this solver");
    } catch (const Error& e) {
      cell.values[k] = failure(e.what());
    }
  }
}

double default_t_end(const ChainConfig& c) {
  const double total = c.total_decay();
  double w = std::numeric_limits<double>::infinity();
  for (double om : c.omega) {
    if (om <= 0.0) continue;
    const double x = c.eta * om;
    w = std::min(w, std::min(x * x / total, total / 4.0));
  }
  if (!std::isfinite(w)) throw InvalidArgument("no driven ion to cool");
  return 3.6 / w;
}

void eval_dynamics(const SweepSpec& spec, ChainConfig c, SweepCell& cell) {
  c.n_max = spec.dynamics.n_max;
  const auto gen = Liouvillian::from_config(c);
  const auto steady = solve_observables(c);
  const double t_end = spec.dynamics.t_end > 0.0 ? spec.dynamics.t_end : default_t_end(c);
  EvolveOptions opt;
  opt.integrator = spec.dynamics.integrator;
  std::vector<double> reference;
  for (std::size_t i = 0; i < steady.n.size(); ++i) reference.push_back(steady.n[i] / steady.ntilde[i]);
  const auto traj = evolve(gen, thermal_state(spec.dynamics.n0, c.n_max, c.n_ions),
                           uniform_grid(t_end, spec.dynamics.samples), reference, opt);
  cell.residual = kNaN;
  for (std::size_t k = 0; k < spec.observables.size(); ++k) {
    const auto& o = spec.observables[k];
    if (o.kind != ObservableKind::kRate) {
      cell.values[k] = failure("observable not provided by this solver");
      continue;
    }
    try {
      if (o.ion < 1 || o.ion > c.n_ions) throw InvalidArgument("ion index out of range");
      const auto fit = fit_cooling_rate(traj, o.ion, steady.n[static_cast<std::size_t>(o.ion) - 1],
                                        FitOptions::after_transient(c.total_decay()));
      cell.values[k] = {fit.rate, "ok"};
      if (!std::isfinite(cell.residual)) cell.residual = fit.rms_residual;
    } catch (const Error& e) {
      cell.values[k] = failure(e.what());
    }
  }
}

void evaluate(const SweepSpec& spec, SweepCell& cell) {
  cell.values.assign(spec.observables.size(), CellValue{});
  try {
    const ChainConfig c = configure_point(spec, cell.x1, cell.x2);
    switch (spec.solver) {
      case SolverKind::kFullSteady: eval_full(spec, c, cell); break;
      case SolverKind::kReduced: eval_reduced(spec, c, cell); break;
      case SolverKind::kDynamicsFit: eval_dynamics(spec, c, cell); break;
    }
  } catch (const Error& e) {
    for (auto& v : cell.values) v = failure(e.what());
    cell.residual = kNaN;
  }
}

}  // namespace

const char* axis_name(AxisKind kind) {
  for (const auto& [k, n] : kAxisNames)
    if (k == kind) return n;
  return "?";
}

AxisKind parse_axis(const std::string& name) {
  for (const auto& [k, n] : kAxisNames)
    if (name == n) return k;
  throw InvalidArgument("unknown axis '" + name + "'");
}

const char* solver_name(SolverKind kind) {
  for (const auto& [k, n] : kSolverNames)
    if (k == kind) return n;
  return "?";
}

SolverKind parse_solver(const std::string& name) {
  for (const auto& [k, n] : kSolverNames)
    if (name == n) return k;
  throw InvalidArgument("unknown solver '" + name + "'");
}

std::vector<double> Axis::values() const {
  std::vector<double> v(static_cast<std::size_t>(std::max(points, 0)));
  for (int k = 0; k < points; ++k) {
    const double f = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
    v[k] = log_scale ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo);
  }
  if (points > 1) v.back() = hi;
  return v;
}

std::string Observable::name() const {
  switch (kind) {
    case ObservableKind::kNtilde: return "ntilde_" + std::to_string(ion);
    case ObservableKind::kN: return "n_" + std::to_string(ion);
    case ObservableKind::kReCst: return "re_cst";
    case ObservableKind::kRate: return "W_" + std::to_string(ion);
    case ObservableKind::kNtildeMin: return "ntilde1_min";
  }
  return "?";
}

Observable Observable::parse(const std::string& name) {
  if (name == "re_cst") return {ObservableKind::kReCst, 1};
  if (name == "ntilde1_min") return {ObservableKind::kNtildeMin, 1};
  const auto us = name.rfind('_');
  if (us != std::string::npos && us + 1 < name.size()) {
    const std::string head = name.substr(0, us);
    const std::string tail = name.substr(us + 1);
    if (std::all_of(tail.begin(), tail.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      const int ion = std::stoi(tail);
      if (head == "ntilde") return {ObservableKind::kNtilde, ion};
      if (head == "n") return {ObservableKind::kN, ion};
      if (head == "W") return {ObservableKind::kRate, ion};
    }
  }
  throw InvalidArgument("unknown observable '" + name + "'");
}

Json SweepSpec::to_json() const {
  auto axis_json = [](const Axis& a) {
    Json j;
    j["parameter"] = axis_name(a.kind);
    j["lo"] = a.lo;
    j["hi"] = a.hi;
    j["points"] = a.points;
    j["log_scale"] = a.log_scale;
    return j;
  };
  Json j;
  j["name"] = name;
  j["base"] = chirocool::to_json(base);
  j["axis1"] = axis_json(axis1);
  j["axis2"] = axis2 ? axis_json(*axis2) : Json(nullptr);
  Json obs = Json::array();
  for (const auto& o : observables) obs.push_back(o.name());
  j["observables"] = obs;
  j["solver"] = solver_name(solver);
  if (solver == SolverKind::kDynamicsFit) {
    j["dynamics"] = {{"n0", dynamics.n0},
                     {"n_max", dynamics.n_max},
                     {"t_end", dynamics.t_end},
                     {"samples", dynamics.samples},
                     {"integrator", dynamics.integrator == Integrator::kKrylov ? "krylov" : "runge_kutta"}};
  }
  if (solver == SolverKind::kReduced) j["min_search_grid"] = min_search_grid;
  return j;
}

SweepSpec spec_from_json(const Json& j) {
  auto field = [](const Json& obj, const std::string& path, const char* key) -> const Json& {
    if (!obj.is_object() || !obj.contains(key)) throw InvalidArgument("sweep spec key '" + path + key + "': missing");
    return obj[key];
  };
  auto axis = [&](const Json& a, const std::string& path) {
    try {
      Axis out;
      out.kind = parse_axis(field(a, path, "parameter").get<std::string>());
      out.lo = field(a, path, "lo").get<double>();
      out.hi = field(a, path, "hi").get<double>();
      out.points = field(a, path, "points").get<int>();
      out.log_scale = a.value("log_scale", false);
      return out;
    } catch (const Json::exception& e) {
      throw InvalidArgument("sweep spec key '" + path + "': " + e.what());
    }
  };
  SweepSpec s;
  try {
    s.name = j.value("name", std::string("custom"));
    s.base = config_from_json(field(j, "", "base"));
    s.axis1 = axis(field(j, "", "axis1"), "axis1.");
    if (j.contains("axis2") && !j["axis2"].is_null()) s.axis2 = axis(j["axis2"], "axis2.");
    for (const auto& o : field(j, "", "observables")) s.observables.push_back(Observable::parse(o.get<std::string>()));
    s.solver = parse_solver(j.value("solver", std::string("full_steady")));
    if (j.contains("dynamics")) {
      const auto& d = j["dynamics"];
      s.dynamics.n0 = d.value("n0", s.dynamics.n0);
      s.dynamics.n_max = d.value("n_max", s.dynamics.n_max);
      s.dynamics.t_end = d.value("t_end", s.dynamics.t_end);
      s.dynamics.samples = d.value("samples", s.dynamics.samples);
      const std::string integ = d.value("integrator", std::string("krylov"));
      if (integ != "krylov" && integ != "runge_kutta")
        throw InvalidArgument("sweep spec key 'dynamics.integrator': expected krylov or runge_kutta");
      s.dynamics.integrator = integ == "krylov" ? Integrator::kKrylov : Integrator::kRungeKutta;
    }
    s.min_search_grid = j.value("min_search_grid", s.min_search_grid);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("sweep spec: ") + e.what());
  }
  return s;
}

void validate_spec(const SweepSpec& spec) {
  check_axis(spec.axis1);
  if (spec.axis2) {
    check_axis(*spec.axis2);
    if (spec.axis2->kind == spec.axis1.kind) throw InvalidArgument("both axes set the same parameter");
  }
  if (spec.observables.empty()) throw InvalidArgument("no observables requested");
  for (const auto& o : spec.observables) {
    const bool ok = [&] {
      switch (spec.solver) {
        case SolverKind::kFullSteady:
          return o.kind == ObservableKind::kNtilde || o.kind == ObservableKind::kN || o.kind == ObservableKind::kReCst;
        case SolverKind::kReduced:
          return (o.kind == ObservableKind::kNtilde || o.kind == ObservableKind::kN) ? o.ion == 1
                                                                                      : o.kind == ObservableKind::kNtildeMin;
        case SolverKind::kDynamicsFit: return o.kind == ObservableKind::kRate;
      }
      return false;
    }();
    if (!ok) throw InvalidArgument("observable " + o.name() + " is not provided by solver " + solver_name(spec.solver));
  }
  if (spec.solver == SolverKind::kDynamicsFit && spec.dynamics.samples < 3)
    throw InvalidArgument("dynamics sweeps need at least three samples");
  if (spec.min_search_grid < 50) throw InvalidArgument("min_search grid must be at least 50x50");
  const auto report = validate_config(spec.base);
  if (!report.ok()) throw InvalidArgument("base config invalid: " + report.errors.front());
}

ChainConfig configure_point(const SweepSpec& spec, double x1, double x2) {
  std::vector<std::pair<AxisKind, double>> settings{{spec.axis1.kind, x1}};
  if (spec.axis2) settings.emplace_back(spec.axis2->kind, x2);
  std::stable_sort(settings.begin(), settings.end(),
                   [](const auto& a, const auto& b) { return priority(a.first) < priority(b.first); });
  ChainConfig c = spec.base;
  for (const auto& [kind, v] : settings) apply_axis(c, kind, v);
  require_valid(c);
  return c;
}

SweepResult run_grid(const SweepSpec& spec, int jobs) {
  validate_spec(spec);
  SweepResult result;
  result.spec = spec;
  result.spec_hash = spec.hash();
  result.version = CHIROCOOL_VERSION;
  const auto v1 = spec.axis1.values();
  const auto v2 = spec.axis2 ? spec.axis2->values() : std::vector<double>{kNaN};
  for (double a : v1) {
    for (double b : v2) {
      SweepCell cell;
      cell.x1 = a;
      cell.x2 = b;
      result.cells.push_back(cell);
    }
  }
#ifdef _OPENMP
  const int workers = jobs > 0 ? jobs : omp_get_max_threads();
#else
  const int workers = 1;
  (void)jobs;
#endif
  const long n = static_cast<long>(result.cells.size());
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (long k = 0; k < n; ++k) evaluate(spec, result.cells[static_cast<std::size_t>(k)]);
  return result;
}

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig2c", "fig_corr_a", "fig_corr_b", "fig3a",
          "fig3b", "fig4_n2", "fig4_n3", "fig5a", "fig5b"};
}

SweepSpec figure_preset(const std::string& name) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  SweepSpec s;
  s.name = name;
  ChainConfig& b = s.base;
  b.n_ions = 2;
  b.eta = 0.04;
  b.omega = {1.0, 0.1};
  b.gamma_r = 0.05;
  b.gamma_l = 0.05;
  b.gamma_ng = 0.0;
  b.xi = kTwoPi;
  b.n_max = 1;
  const Axis ratio{AxisKind::kGammaROverGamma, 0.0, 1.0, 41};
  const Axis drive_ratio{AxisKind::kOmega2OverOmega1, 0.025, 1.0, 40};
  const Axis phase{AxisKind::kXi, 0.0, kTwoPi, 41};
  const Axis beta{AxisKind::kBeta, 0.0, 1.0, 41};
  auto obs = [](std::initializer_list<const char*> names) {
    std::vector<Observable> v;
    for (const char* n : names) v.push_back(Observable::parse(n));
    return v;
  };

  if (name == "fig2a") {
    s.axis1 = ratio;
    s.axis2 = drive_ratio;
    s.observables = obs({"ntilde_1", "ntilde_2", "n_1", "n_2"});
  } else if (name == "fig2b") {
    s.axis1 = ratio;
    s.axis2 = Axis{AxisKind::kOmega1, 0.05, 2.0, 40};
    s.observables = obs({"ntilde_1", "n_1", "n_2"});
  } else if (name == "fig2c") {
    s.axis1 = ratio;
    s.axis2 = phase;
    s.observables = obs({"ntilde_1", "n_1", "n_2"});
  } else if (name == "fig_corr_a") {
    b.omega = {0.2, 0.02};
    s.axis1 = ratio;
    s.axis2 = phase;
    s.observables = obs({"re_cst"});
  } else if (name == "fig_corr_b") {
    b.omega = {0.5, 0.05};
    s.axis1 = ratio;
    s.axis2 = drive_ratio;
    s.observables = obs({"re_cst"});
  } else if (name == "fig3a" || name == "fig3b") {
    s.solver = SolverKind::kDynamicsFit;
    b.n_max = 4;
    if (name == "fig3a") {
      s.axis1 = Axis{AxisKind::kGammaROverGamma, 0.0, 1.0, 9};
    } else {
      b.gamma_r = 0.085;
      b.gamma_l = 0.015;
      s.axis1 = Axis{AxisKind::kOmega1, 0.2, 3.2, 9, true};
    }
    s.observables = obs({"W_1", "W_2"});
  } else if (name == "fig4_n2" || name == "fig4_n3") {
    if (name == "fig4_n3") {
      b.n_ions = 3;
      b.omega = {1.0, 0.1, 0.1};
    }
    s.axis1 = ratio;
    s.axis2 = beta;
    s.observables = obs({"ntilde_1"});
  } else if (name == "fig5a") {
    s.solver = SolverKind::kReduced;
    b.n_ions = 10;
    b.omega.assign(10, 0.0);
    b.omega.front() = 1.0;
    s.axis1 = ratio;
    s.axis2 = beta;
    s.observables = obs({"ntilde_1"});
  } else if (name == "fig5b") {
    s.solver = SolverKind::kReduced;
    b.omega = {1.0, 0.0};
    s.axis1 = Axis{AxisKind::kNIons, 2.0, 30.0, 29};
    s.observables = obs({"ntilde1_min"});
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown preset '" + name + "' (known: " + known + ")");
  }
  return s;
}

void write_csv(std::ostream& out, const SweepResult& r) {
  out << "axis1,axis2,observable,value,status\n";
  for (const auto& cell : r.cells) {
    for (std::size_t k = 0; k < cell.values.size(); ++k) {
      out << format_double(cell.x1) << ',' << (std::isnan(cell.x2) ? "" : format_double(cell.x2)) << ','
          << r.spec.observables[k].name() << ',' << format_double(cell.values[k].value) << ','
          << cell.values[k].status << '\n';
    }
  }
}

Json to_json(const SweepResult& r) {
  Json j;
  j["spec"] = r.spec.to_json();
  j["spec_hash"] = r.spec_hash;
  j["version"] = r.version;
  Json cells = Json::array();
  for (const auto& cell : r.cells) {
    Json c;
    c["axis1"] = cell.x1;
    c["axis2"] = std::isnan(cell.x2) ? Json(nullptr) : Json(cell.x2);
    Json values;
    for (std::size_t k = 0; k < cell.values.size(); ++k) {
      const auto& v = cell.values[k];
      values[r.spec.observables[k].name()] = {{"value", v.ok() ? Json(v.value) : Json(nullptr)},
                                              {"status", v.status}};
    }
    c["values"] = values;
    c["residual"] = std::isfinite(cell.residual) ? Json(cell.residual) : Json(nullptr);
    cells.push_back(c);
  }
  j["cells"] = cells;
  return j;
}

namespace {

// Piecewise-linear approximation of the viridis map.
std::string color(double f) {
  static const std::array<std::array<double, 3>, 5> stops{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  f = std::clamp(f, 0.0, 1.0) * (stops.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(f), stops.size() - 2);
  const double t = f - static_cast<double>(i);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] + t * (stops[i + 1][0] - stops[i][0])),
                static_cast<int>(stops[i][1] + t * (stops[i + 1][1] - stops[i][1])),
                static_cast<int>(stops[i][2] + t * (stops[i + 1][2] - stops[i][2])));
  return buf;
}

}  // namespace

void write_svg(std::ostream& out, const SweepResult& r, std::size_t observable) {
  if (observable >= r.spec.observables.size()) throw InvalidArgument("observable index out of range");
  constexpr double kW = 480, kH = 360, kLeft = 60, kBottom = 40, kTop = 30, kRight = 20;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : r.cells) {
    const auto& v = c.values[observable];
    if (v.ok()) {
      lo = std::min(lo, v.value);
      hi = std::max(hi, v.value);
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const std::string title = r.spec.name + ": " + r.spec.observables[observable].name();
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  const Axis& a1 = r.spec.axis1;
  auto xpos = [&](int i) { return kLeft + pw * (a1.points == 1 ? 0.5 : static_cast<double>(i) / (a1.points - 1)); };
  if (r.spec.axis2) {
    const int nr = r.rows(), nc = r.cols();
    const double cw = pw / nr, ch = ph / nc;
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < nc; ++j) {
        const auto& v = r.at(i, j).values[observable];
        const std::string fill = v.ok() ? color((v.value - lo) / (hi - lo)) : std::string("#bbbbbb");
        out << "<rect x=\"" << kLeft + i * cw << "\" y=\"" << kTop + ph - (j + 1) * ch << "\" width=\"" << cw + 0.5
            << "\" height=\"" << ch + 0.5 << "\" fill=\"" << fill << "\"/>\n";
      }
    }
    out << "<text x=\"14\" y=\"" << kTop + ph / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 "
        << kTop + ph / 2 << ")\" text-anchor=\"middle\">" << axis_name(r.spec.axis2->kind) << "</text>\n";
  } else {
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (int i = 0; i < r.rows(); ++i) {
      const auto& v = r.at(i, 0).values[observable];
      if (v.ok()) out << xpos(i) << ',' << kTop + ph * (1.0 - (v.value - lo) / (hi - lo)) << ' ';
    }
    out << "\"/>\n";
  }
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 8 << "\" font-size=\"12\" text-anchor=\"middle\">"
      << axis_name(a1.kind) << " [" << format_double(a1.lo) << ", " << format_double(a1.hi) << "]</text>\n";
  out << "<text x=\"" << kLeft << "\" y=\"" << kTop - 4 << "\" font-size=\"10\">range " << format_double(lo) << " .. "
      << format_double(hi) << "</text>\n";
  out << "</svg>\n";
}

}  // namespace chirocool::sweep

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 solver error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chirocool/analytic.hpp"
#include "chirocool/dynamics.hpp"
#include "chirocool/io.hpp"
#include "chirocool/rate_fit.hpp"
#include "chirocool/reduced.hpp"
#include "chirocool/steady_state.hpp"
#include "chirocool/sweep.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace chirocool;

namespace {

constexpr const char* kUnits =
    "Units: nu = 1 (trap frequency). Rates, Rabi frequencies and detuning are in units of nu; times in 1/nu; "
    "xi in radians.";

struct ConfigFlags {
  std::string path;
  ConfigOverrides o;
  std::optional<double> xi_pi;

  void attach(CLI::App* app) {
    app->add_option("--config", path, "JSON config file (flags below override its values)");
    app->add_option("--n-ions", o.n_ions, "number of ions N");
    app->add_option("--eta", o.eta, "Lamb-Dicke parameter");
    app->add_option("--omega", o.omega, "Rabi frequency per ion [nu]")->expected(1, -1);
    app->add_option("--gamma-r", o.gamma_r, "right-guided decay rate [nu]");
    app->add_option("--gamma-l", o.gamma_l, "left-guided decay rate [nu]");
    app->add_option("--gamma-ng", o.gamma_ng, "nonguided decay rate [nu]");
    auto* xi = app->add_option("--xi", o.xi, "inter-trap phase k_s d [rad]");
    app->add_option("--xi-pi", xi_pi, "inter-trap phase as a multiple of pi")->excludes(xi);
    app->add_option("--delta", o.delta, "detuning [nu] (default -1)");
    app->add_option("--n-max", o.n_max, "phonon truncation per ion");
  }

  ChainConfig resolve() {
    if (xi_pi) o.xi = *xi_pi * std::numbers::pi;
    if (!path.empty()) return load_config(path, o);
    ChainConfig c;
    apply_overrides(c, o);
    require_valid(c);
    return c;
  }
};

struct Outputs {
  fs::path dir;
  RunManifest manifest;

  void begin(const std::string& command) {
    manifest.command = command;
    manifest.started = utc_now();
    manifest.version = CHIROCOOL_VERSION;
    fs::create_directories(dir);
  }
  fs::path file(const std::string& name) {
    manifest.outputs.push_back(name);
    return dir / name;
  }
  void finish() {
    manifest.finished = utc_now();
    manifest.write(dir / "manifest.json");
  }
};

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

int default_jobs() {
  if (const char* env = std::getenv("CHIROCOOL_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("CHIROCOOL_JOBS must be a positive integer");
  }
#ifdef _OPENMP
  return omp_get_num_procs();
#else
  return 1;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady states, dynamics and parameter sweeps for chiral-coupling-assisted sideband cooling of "
               "trapped-ion chains."};
  app.require_subcommand(1);
  app.footer(kUnits);
  std::string command;
  for (int k = 0; k < argc; ++k) command += (k ? " " : "") + std::string(argv[k]);

  // steady
  auto* steady = app.add_subcommand("steady", "Full null-space solve plus observables.");
  ConfigFlags steady_cfg;
  steady_cfg.attach(steady);
  std::string steady_out = ".";
  steady->add_option("--out", steady_out, "output directory for steady.json and manifest.json");

  // evolve
  auto* evolve_cmd = app.add_subcommand("evolve",
                                        "Time evolution from a thermal state, with optional exponential rate fits.");
  ConfigFlags evolve_cfg;
  evolve_cfg.attach(evolve_cmd);
  double n0 = 0.7, t_end = 0.0;
  int samples = 401;
  std::string integrator = "krylov", evolve_out = ".";
  bool fit = false;
  evolve_cmd->add_option("--n0", n0, "initial thermal occupation per ion")->check(CLI::NonNegativeNumber);
  evolve_cmd->add_option("--t-end", t_end, "final time [1/nu]")->required()->check(CLI::PositiveNumber);
  evolve_cmd->add_option("--samples", samples, "number of output times including t=0")->check(CLI::Range(2, 10000000));
  evolve_cmd->add_option("--integrator", integrator, "krylov or rk")->check(CLI::IsMember({"krylov", "rk"}));
  evolve_cmd->add_flag("--fit", fit, "fit a exp(-W t) + n_st for every driven ion (window starts at 5/Gamma)");
  evolve_cmd->add_option("--out", evolve_out, "output directory for trajectory.csv, evolve.json, manifest.json");

  // analytic
  auto* analytic_cmd = app.add_subcommand("analytic", "Closed-form predictions as one JSON record.");
  double a_eta = 0.04, a_omega = 1.0, a_gamma = 0.1, a_beta = 1.0, a_ratio = 0.5;
  analytic_cmd->add_option("--eta", a_eta, "Lamb-Dicke parameter")->required();
  analytic_cmd->add_option("--omega", a_omega, "target Rabi frequency [nu]")->required();
  analytic_cmd->add_option("--gamma", a_gamma, "total decay rate Gamma = gamma_r + gamma_l + gamma_ng [nu]")
      ->required()
      ->check(CLI::PositiveNumber);
  analytic_cmd->add_option("--beta", a_beta, "guided fraction gamma / Gamma")->check(CLI::Range(0.0, 1.0));
  analytic_cmd->add_option("--ratio", a_ratio, "gamma_r / gamma for the target occupation")
      ->check(CLI::Range(0.0, 1.0));

  // reduced
  auto* reduced_cmd = app.add_subcommand(
      "reduced", "Reduced O(N^2) target-ion solve, grid scan or global minimum search (xi = 2 pi).");
  int r_n = 2, r_grid = 50;
  double r_eta = 0.04, r_omega = 1.0, r_gamma = 0.1, r_beta = 1.0, r_ratio = 0.5;
  bool r_min = false;
  std::string r_out;
  reduced_cmd->add_option("--n-ions", r_n, "chain length N")->check(CLI::Range(2, 200));
  reduced_cmd->add_option("--eta", r_eta, "Lamb-Dicke parameter");
  reduced_cmd->add_option("--omega", r_omega, "target Rabi frequency [nu]");
  reduced_cmd->add_option("--gamma", r_gamma, "total decay rate Gamma [nu]")->check(CLI::PositiveNumber);
  reduced_cmd->add_option("--beta", r_beta, "guided fraction gamma / Gamma")->check(CLI::Range(0.0, 1.0));
  reduced_cmd->add_option("--ratio", r_ratio, "gamma_r / gamma")->check(CLI::Range(0.0, 1.0));
  reduced_cmd->add_flag("--min-search", r_min, "global minimum of ntilde_1 over (beta, gamma_r/gamma)");
  reduced_cmd->add_option("--grid", r_grid, "grid points per axis for --min-search and --out")
      ->check(CLI::Range(2, 100000));
  reduced_cmd->add_option("--out", r_out,
                          "directory for grid.csv (beta, gamma_r_over_gamma, n1, ntilde1) and manifest.json");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Two-dimensional parameter sweep from a figure preset or a JSON spec.");
  std::string preset, spec_path, sweep_out;
  int jobs = 0, points1 = 0, points2 = 0;
  auto* preset_opt = sweep_cmd->add_option("--preset", preset, "figure preset name");
  sweep_cmd->add_option("--spec", spec_path, "custom sweep spec (JSON)")->excludes(preset_opt);
  sweep_cmd->add_option("--out", sweep_out, "output directory")->required();
  sweep_cmd->add_option("--jobs", jobs, "worker threads (default: $CHIROCOOL_JOBS or all cores)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--points1", points1, "override the axis-1 point count")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--points2", points2, "override the axis-2 point count")->check(CLI::PositiveNumber);
  bool list = false;
  sweep_cmd->add_flag("--list", list, "print the preset names and exit");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Lint a config file.");
  std::string validate_path;
  validate_cmd->add_option("--config", validate_path, "JSON config file")->required();

  for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) sub->footer(kUnits);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*steady) {
      const ChainConfig c = steady_cfg.resolve();
      for (const auto& w : validate_config(c).warnings) std::cerr << "warning: " << w << '\n';
      Outputs out{steady_out, {}};
      out.begin(command);
      out.manifest.config = to_json(c);
      out.manifest.spec_hash = content_hash(out.manifest.config);
      Json j = to_json(solve_observables(c));
      write_json(out.file("steady.json"), j);
      out.finish();
      std::cout << j.dump(2) << '\n';
    } else if (*evolve_cmd) {
      const ChainConfig c = evolve_cfg.resolve();
      for (const auto& w : validate_config(c).warnings) std::cerr << "warning: " << w << '\n';
      Outputs out{evolve_out, {}};
      out.begin(command);
      out.manifest.config = to_json(c);
      out.manifest.spec_hash = content_hash(out.manifest.config);
      EvolveOptions opt;
      opt.integrator = integrator == "rk" ? Integrator::kRungeKutta : Integrator::kKrylov;
      const auto traj = evolve(c, thermal_state(n0, c.n_max, c.n_ions), uniform_grid(t_end, samples), opt);
      {
        std::ofstream csv(out.file("trajectory.csv"));
        write_trajectory_csv(csv, traj);
      }
      Json j;
      j["n0"] = n0;
      j["t_end"] = t_end;
      j["steps"] = traj.stats.steps;
      j["generator_applications"] = traj.stats.applications;
      j["max_trace_drift"] = traj.stats.max_trace_drift;
      j["max_hermiticity_drift"] = traj.stats.max_hermiticity_drift;
      Json crossings = Json::array();
      for (int i = 1; i <= c.n_ions; ++i) {
        const auto t = crossing_time(traj, i);
        crossings.push_back(t ? Json(*t) : Json(nullptr));
      }
      j["crossing_time"] = crossings;
      if (fit) {
        const auto st = solve_observables(c);
        Json fits = Json::array();
        for (int i = 1; i <= c.n_ions; ++i) {
          if (c.omega[static_cast<std::size_t>(i) - 1] <= 0.0) continue;
          try {
            fits.push_back(to_json(fit_cooling_rate(traj, i, st.n[static_cast<std::size_t>(i) - 1],
                                                    FitOptions::after_transient(c.total_decay()))));
          } catch (const SolverError& e) {
            fits.push_back({{"ion", i}, {"error", e.what()}});
          }
        }
        j["fits"] = fits;
      }
      write_json(out.file("evolve.json"), j);
      out.finish();
      std::cout << j.dump(2) << '\n';
    } else if (*analytic_cmd) {
      const double guided = a_beta * a_gamma;
      const auto p = analytic::predict(a_ratio * guided, (1.0 - a_ratio) * guided, a_gamma - guided, a_eta, a_omega);
      Json j = to_json(p);
      j["eta"] = a_eta;
      j["omega"] = a_omega;
      j["gamma_r_over_gamma"] = a_ratio;
      std::cout << j.dump(2) << '\n';
    } else if (*reduced_cmd) {
      std::optional<Outputs> out;
      if (!r_out.empty()) {
        out.emplace(Outputs{r_out, {}});
        out->begin(command);
        out->manifest.config = {{"n_ions", r_n}, {"eta", r_eta}, {"omega", r_omega}, {"gamma", r_gamma},
                                {"beta", r_beta}, {"ratio", r_ratio}, {"grid", r_grid}};
        out->manifest.spec_hash = content_hash(out->manifest.config);
      }
      Json j;
      if (r_min) {
        j = to_json(reduced::min_search(r_n, r_gamma, r_eta, r_omega, r_grid, r_grid));
      } else {
        const double guided = r_beta * r_gamma;
        reduced::Rates rates{r_ratio * guided, (1.0 - r_ratio) * guided, r_gamma - guided, r_eta, r_omega};
        j = to_json(reduced::solve_reduced(r_n, rates));
      }
      if (out) {
        std::vector<double> axis(static_cast<std::size_t>(r_grid));
        for (int k = 0; k < r_grid; ++k) axis[k] = static_cast<double>(k) / (r_grid - 1);
        const auto grid = reduced::ntilde_grid(r_n, r_gamma, r_eta, r_omega, axis, axis);
        const double single = analytic::single_ion_nst(r_gamma, r_eta, r_omega);
        std::ofstream csv(out->file("grid.csv"));
        csv << "beta,gamma_r_over_gamma,n1,ntilde1\n";
        for (std::size_t b = 0; b < axis.size(); ++b) {
          for (std::size_t q = 0; q < axis.size(); ++q) {
            const double v = grid[b * axis.size() + q];
            csv << format_double(axis[b]) << ',' << format_double(axis[q]) << ',' << format_double(v * single) << ','
                << format_double(v) << '\n';
          }
        }
        csv.close();
        write_json(out->file("reduced.json"), j);
        out->finish();
      }
      std::cout << j.dump(2) << '\n';
    } else if (*sweep_cmd) {
      if (list) {
        for (const auto& n : sweep::preset_names()) std::cout << n << '\n';
        return 0;
      }
      if (preset.empty() && spec_path.empty()) throw InvalidArgument("sweep needs --preset or --spec");
      sweep::SweepSpec spec;
      if (!preset.empty()) {
        spec = sweep::figure_preset(preset);
      } else {
        std::ifstream in(spec_path);
        if (!in) throw InvalidArgument("cannot read sweep spec " + spec_path);
        Json j;
        try {
          j = Json::parse(in);
        } catch (const Json::parse_error& e) {
          throw InvalidArgument(spec_path + ": " + e.what());
        }
        spec = sweep::spec_from_json(j);
      }
      if (points1 > 0) spec.axis1.points = points1;
      if (points2 > 0) {
        if (!spec.axis2) throw InvalidArgument("--points2 given for a one-dimensional sweep");
        spec.axis2->points = points2;
      }
      sweep::validate_spec(spec);
      Outputs out{sweep_out, {}};
      out.begin(command);
      out.manifest.config = spec.to_json();
      out.manifest.spec_hash = spec.hash();
      const auto result = sweep::run_grid(spec, jobs > 0 ? jobs : default_jobs());
      {
        std::ofstream csv(out.file(spec.name + ".csv"));
        sweep::write_csv(csv, result);
      }
      write_json(out.file(spec.name + ".json"), sweep::to_json(result));
      for (std::size_t k = 0; k < spec.observables.size(); ++k) {
        std::ofstream svg(out.file(spec.name + "_" + spec.observables[k].name() + ".svg"));
        sweep::write_svg(svg, result, k);
      }
      out.finish();
      long failed = 0;
      for (const auto& cell : result.cells)
        for (const auto& v : cell.values) failed += v.ok() ? 0 : 1;
      std::cout << "wrote " << out.manifest.outputs.size() << " files to " << sweep_out << " (" << result.cells.size()
                << " points, " << failed << " failed values)\n";
    } else if (*validate_cmd) {
      std::ifstream in(validate_path);
      if (!in) throw InvalidArgument("cannot read config file " + validate_path);
      const ChainConfig c = load_config(validate_path);
      for (const auto& w : validate_config(c).warnings) std::cout << "warning: " << w << '\n';
      std::cout << "ok\n";
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

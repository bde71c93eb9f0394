#include "chirocool/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>

namespace chirocool {

namespace {

const std::set<std::string> kKnownKeys = {"n_ions",   "eta",   "omega", "gamma_r", "gamma_l", "gamma_ng",
                                          "xi",       "xi_pi", "phases", "delta",  "n_max",   "target"};

[[noreturn]] void key_error(const std::string& key, const std::string& what) {
  throw InvalidArgument("config key '" + key + "': " + what);
}

const Json& require(const Json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) key_error(key, "missing required key");
  return *it;
}

double number(const Json& v, const std::string& key) {
  if (!v.is_number()) key_error(key, "expected a number");
  return v.get<double>();
}

int integer(const Json& v, const std::string& key) {
  if (!v.is_number_integer()) key_error(key, "expected an integer");
  return v.get<int>();
}

std::vector<double> number_list(const Json& v, const std::string& key) {
  if (!v.is_array()) key_error(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], key + "[" + std::to_string(k) + "]"));
  return out;
}

Json optional_pair(const std::optional<std::pair<double, double>>& p) {
  if (!p) return nullptr;
  return Json::array({p->first, p->second});
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

ChainConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKnownKeys.count(it.key())) key_error(it.key(), "unknown key");
  }
  ChainConfig c;
  c.n_ions = integer(require(j, "n_ions"), "n_ions");
  c.eta = number(require(j, "eta"), "eta");
  c.omega = number_list(require(j, "omega"), "omega");
  if (static_cast<int>(c.omega.size()) != c.n_ions) key_error("omega", "needs one entry per ion");
  c.gamma_r = number(require(j, "gamma_r"), "gamma_r");
  c.gamma_l = number(require(j, "gamma_l"), "gamma_l");
  c.gamma_ng = j.contains("gamma_ng") ? number(j["gamma_ng"], "gamma_ng") : 0.0;
  if (j.contains("xi") && j.contains("xi_pi")) key_error("xi_pi", "give either xi or xi_pi, not both");
  if (j.contains("xi")) c.xi = number(j["xi"], "xi");
  if (j.contains("xi_pi")) c.xi = number(j["xi_pi"], "xi_pi") * std::numbers::pi;
  if (j.contains("phases")) {
    c.phases = number_list(j["phases"], "phases");
    if (static_cast<int>(c.phases->size()) != c.n_ions) key_error("phases", "needs one entry per ion");
  }
  c.detuning = j.contains("delta") ? number(j["delta"], "delta") : -kTrapFrequency;
  c.n_max = j.contains("n_max") ? integer(j["n_max"], "n_max") : 1;
  c.target = j.contains("target") ? integer(j["target"], "target") : 1;
  return c;
}

void apply_overrides(ChainConfig& c, const ConfigOverrides& o) {
  if (o.n_ions) {
    c.n_ions = *o.n_ions;
    if (!o.omega) c.omega.resize(static_cast<std::size_t>(std::max(c.n_ions, 0)), c.omega.empty() ? 0.0 : c.omega.back());
    c.phases.reset();
  }
  if (o.eta) c.eta = *o.eta;
  if (o.omega) c.omega = *o.omega;
  if (o.gamma_r) c.gamma_r = *o.gamma_r;
  if (o.gamma_l) c.gamma_l = *o.gamma_l;
  if (o.gamma_ng) c.gamma_ng = *o.gamma_ng;
  if (o.xi) {
    c.xi = *o.xi;
    c.phases.reset();
  }
  if (o.delta) c.detuning = *o.delta;
  if (o.n_max) c.n_max = *o.n_max;
}

ChainConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(end), '\n');
    throw InvalidArgument(path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
  ChainConfig c = config_from_json(j);
  apply_overrides(c, overrides);
  require_valid(c);
  return c;
}

Json to_json(const ChainConfig& c) {
  Json j;
  j["n_ions"] = c.n_ions;
  j["eta"] = c.eta;
  j["omega"] = c.omega;
  j["gamma_r"] = c.gamma_r;
  j["gamma_l"] = c.gamma_l;
  j["gamma_ng"] = c.gamma_ng;
  if (c.phases)
    j["phases"] = *c.phases;
  else
    j["xi"] = c.xi;
  j["delta"] = c.detuning;
  j["n_max"] = c.n_max;
  j["target"] = c.target;
  return j;
}

Json to_json(const SteadyObservables& o) {
  Json j;
  j["n"] = o.n;
  Json nt = Json::array();
  for (double x : o.ntilde) nt.push_back(finite_or_null(x));
  j["ntilde"] = nt;
  j["excited"] = o.excited;
  j["re_cst"] = o.cst().real();
  j["im_cst"] = o.cst().imag();
  j["residual"] = o.residual;
  return j;
}

Json to_json(const CoolingRateFit& f) {
  Json j;
  j["ion"] = f.ion;
  j["W"] = f.rate;
  j["a"] = f.a;
  j["n_st"] = f.n_st;
  j["window"] = Json::array({f.t_lo, f.t_hi});
  j["residual"] = f.rms_residual;
  j["converged"] = f.converged;
  j["monotone"] = f.monotone;
  return j;
}

Json to_json(const analytic::Prediction& p) {
  Json j;
  j["total_decay"] = p.total_decay;
  j["beta"] = p.beta;
  j["n_st_single"] = p.n_st_single;
  j["n1_st"] = p.n1_st ? Json(*p.n1_st) : Json(nullptr);
  j["n1_max"] = p.n1_max;
  j["n1_min"] = p.min.n1_min;
  j["ntilde1_min"] = p.min.n1_min / p.n_st_single;
  j["beta0"] = finite_or_null(p.min.beta0);
  j["gamma_r_min"] = optional_pair(p.min.gamma_r_min);
  j["min_feasible"] = p.min.feasible;
  j["gamma_r_s"] = optional_pair(p.boundary.gamma_r_s);
  j["superior_exists"] = p.boundary.exists;
  j["sideband_regime"] = p.sideband_regime;
  return j;
}

Json to_json(const reduced::ReducedSolution& s) {
  auto cplx_json = [](cplx z) { return Json::array({z.real(), z.imag()}); };
  Json j;
  j["n_ions"] = s.n_ions;
  j["unknowns"] = s.unknowns;
  j["A"] = cplx_json(s.a);
  Json b = Json::array(), c = Json::array(), d = Json::array();
  for (auto z : s.b) b.push_back(cplx_json(z));
  for (auto z : s.c) c.push_back(cplx_json(z));
  for (Eigen::Index r = 0; r < s.d.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index q = 0; q < s.d.cols(); ++q) row.push_back(s.d(r, q));
    d.push_back(row);
  }
  j["B"] = b;
  j["C"] = c;
  j["D"] = d;
  j["rho_e0"] = s.rho_e0;
  j["rho_g1"] = s.rho_g1;
  j["rho_e1"] = s.rho_e1;
  j["n1"] = s.n1;
  j["ntilde1"] = s.ntilde1;
  return j;
}

Json to_json(const reduced::MinSearchResult& r) {
  Json j;
  j["beta"] = r.beta;
  j["gamma_r_over_gamma"] = r.gamma_r_over_gamma;
  j["gamma_r"] = r.gamma_r;
  j["ntilde1_min"] = r.ntilde1_min;
  j["grid"] = Json::array({r.grid_beta, r.grid_gamma});
  j["failed_points"] = r.failed_points;
  return j;
}

std::string content_hash(const Json& j) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["config"] = config;
  j["started"] = started;
  j["finished"] = finished;
  j["version"] = version;
  j["spec_hash"] = spec_hash;
  j["outputs"] = outputs;
  return j;
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest " + path.string());
  out << to_json().dump(2) << '\n';
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace chirocool

#include "chirocool/model.hpp"

#include <cmath>
#include <sstream>

namespace chirocool {

double ChainConfig::phase(int mu) const {
  if (phases) return phases->at(static_cast<std::size_t>(mu - 1));
  return xi * static_cast<double>(mu - 1);
}

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::kLeft:
      return "left";
    case Channel::kRight:
      return "right";
    case Channel::kNonguided:
      return "nonguided";
  }
  return "unknown";
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

ValidationReport validate_config(const ChainConfig& c) {
  ValidationReport r;
  if (c.n_ions < 1) r.errors.push_back("n_ions must be a positive integer");
  if (c.n_max < 1) r.errors.push_back("invalid truncation: n_max must be >= 1");
  if (!(c.eta > 0.0)) r.errors.push_back("eta must be positive, got " + fmt(c.eta));
  if (c.gamma_r < 0.0) r.errors.push_back("negative rate: gamma_r = " + fmt(c.gamma_r));
  if (c.gamma_l < 0.0) r.errors.push_back("negative rate: gamma_l = " + fmt(c.gamma_l));
  if (c.gamma_ng < 0.0) r.errors.push_back("negative rate: gamma_ng = " + fmt(c.gamma_ng));
  if (!(c.total_decay() > 0.0)) r.errors.push_back("total decay rate gamma_r + gamma_l + gamma_ng must be positive");
  if (c.n_ions >= 1 && static_cast<int>(c.omega.size()) != c.n_ions) {
    r.errors.push_back("omega has " + std::to_string(c.omega.size()) + " entries for " +
                       std::to_string(c.n_ions) + " ions");
  }
  for (std::size_t i = 0; i < c.omega.size(); ++i) {
    if (!(c.omega[i] >= 0.0)) r.errors.push_back("omega[" + std::to_string(i) + "] must be >= 0");
  }
  if (c.target < 1 || c.target > c.n_ions) r.errors.push_back("target ion index out of range");
  if (c.phases) {
    if (static_cast<int>(c.phases->size()) != c.n_ions) {
      r.errors.push_back("phases has " + std::to_string(c.phases->size()) + " entries for " +
                         std::to_string(c.n_ions) + " ions");
    } else {
      for (std::size_t i = 1; i < c.phases->size(); ++i) {
        if (!((*c.phases)[i] > (*c.phases)[i - 1])) {
          r.errors.push_back("positions must be strictly increasing");
          break;
        }
      }
    }
  }
  for (double x : {c.detuning, c.eta, c.gamma_r, c.gamma_l, c.gamma_ng, c.xi}) {
    if (!std::isfinite(x)) {
      r.errors.push_back("non-finite parameter value");
      break;
    }
  }
  if (!r.ok()) return r;

  if (std::abs(c.detuning + kTrapFrequency) > 1e-9) {
    r.warnings.push_back("resolved-sideband condition violated: detuning " + fmt(c.detuning) +
                         " differs from -nu; analytic formulas assume detuning = -nu");
  }
  constexpr double kSmall = 0.2 * kTrapFrequency;
  for (std::size_t i = 0; i < c.omega.size(); ++i) {
    if (c.eta * c.omega[i] > kSmall) {
      r.warnings.push_back("Lamb-Dicke assumption eta*omega << nu questionable for ion " +
                           std::to_string(i + 1) + " (eta*omega = " + fmt(c.eta * c.omega[i]) + ")");
    }
  }
  if (c.total_decay() > kSmall) {
    r.warnings.push_back("sideband assumption Gamma << nu questionable (Gamma = " + fmt(c.total_decay()) + ")");
  }
  return r;
}

void require_valid(const ChainConfig& config) {
  const auto report = validate_config(config);
  if (report.ok()) return;
  std::string msg = "invalid config:";
  for (const auto& e : report.errors) msg += " " + e + ";";
  throw InvalidArgument(msg);
}

SpaceDescriptor make_space(const ChainConfig& config) { return SpaceDescriptor(config.n_ions, config.n_max); }

std::vector<SparseMatrix> lowering_operators(const SpaceDescriptor& space) {
  std::vector<SparseMatrix> ops;
  const auto s = local_lowering_spin();
  for (int mu = 1; mu <= space.n_ions(); ++mu) ops.push_back(embed(s, mu, SiteFactor::kSpin, space));
  return ops;
}

std::vector<SparseMatrix> annihilation_operators(const SpaceDescriptor& space) {
  std::vector<SparseMatrix> ops;
  const auto a = local_annihilation(space.n_max());
  for (int mu = 1; mu <= space.n_ions(); ++mu) ops.push_back(embed(a, mu, SiteFactor::kPhonon, space));
  return ops;
}

SparseMatrix build_hamiltonian(const ChainConfig& config, const SpaceDescriptor& space) {
  require_valid(config);
  if (space.n_ions() != config.n_ions || space.n_max() != config.n_max) {
    throw InvalidArgument("space descriptor does not match the config");
  }
  const int n = config.n_ions;
  const auto sig = lowering_operators(space);
  const auto a = annihilation_operators(space);

  SparseMatrix h(space.total_dim(), space.total_dim());
  for (int i = 0; i < n; ++i) {
    const SparseMatrix sd = sig[i].adjoint();
    const SparseMatrix ad = a[i].adjoint();
    h += (-config.detuning) * SparseMatrix(sd * sig[i]);
    h += kTrapFrequency * SparseMatrix(ad * a[i]);
    const SparseMatrix spin_x = sig[i] + sd;
    const SparseMatrix pos = a[i] + ad;
    h += (0.5 * config.eta * config.omega[i]) * SparseMatrix(spin_x * pos);
  }

  // H_L sums mu < nu, H_R sums mu > nu, both with phase exp(i k_s |r_mu - r_nu|).
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      if (mu == nu) continue;
      const double rate = mu < nu ? config.gamma_l : config.gamma_r;
      if (rate == 0.0) continue;
      const cplx ph = std::exp(kI * std::abs(config.phase(mu + 1) - config.phase(nu + 1)));
      const SparseMatrix hop = SparseMatrix(sig[mu].adjoint()) * sig[nu];
      const SparseMatrix term = (ph * hop) - SparseMatrix((ph * hop).adjoint());
      h += (-kI * rate / 2.0) * term;
    }
  }
  h.prune(cplx(0.0, 0.0));
  h.makeCompressed();
  return h;
}

std::vector<DissipatorSpec> build_dissipators(const ChainConfig& config) {
  require_valid(config);
  const int n = config.n_ions;
  Matrix left(n, n), right(n, n);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      const double dr = config.phase(mu + 1) - config.phase(nu + 1);
      left(mu, nu) = config.gamma_l * std::exp(-kI * dr);
      right(mu, nu) = config.gamma_r * std::exp(kI * dr);
    }
  }
  Matrix nonguided = config.gamma_ng * Matrix::Identity(n, n);
  return {{Channel::kLeft, left}, {Channel::kRight, right}, {Channel::kNonguided, nonguided}};
}

}  // namespace chirocool

#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "chirocool/core.hpp"
#include "chirocool/operator_algebra.hpp"

namespace chirocool {

/// Physical and numerical description of an N-ion chain, in units of the
/// trap frequency (nu = 1, times in 1/nu).
struct ChainConfig {
  int n_ions = 2;
  double detuning = -kTrapFrequency;
  double eta = 0.04;
  std::vector<double> omega{1.0, 0.1};  ///< Rabi frequency per ion
  double gamma_r = 0.05;
  double gamma_l = 0.05;
  double gamma_ng = 0.0;
  double xi = 2.0 * std::numbers::pi;  ///< k_s * spacing for equidistant traps
  std::optional<std::vector<double>> phases;  ///< explicit k_s * r_mu, overrides xi
  int n_max = 1;
  int target = 1;

  double gamma() const noexcept { return gamma_r + gamma_l; }
  double total_decay() const noexcept { return gamma_r + gamma_l + gamma_ng; }
  double beta() const noexcept { return gamma() / total_decay(); }

  /// k_s * r_mu for ion mu (1-based).
  double phase(int mu) const;
};

/// Which decay channel a dissipator belongs to.
enum class Channel { kLeft, kRight, kNonguided };

const char* channel_name(Channel c);

/// D[rho] = -1/2 sum_{mu,nu} G_{mu nu} (s_mu^+ s_nu rho + rho s_mu^+ s_nu - 2 s_nu rho s_mu^+)
/// with s_mu the lowering operator of ion mu.
struct DissipatorSpec {
  Channel channel;
  Matrix coefficients;  ///< N x N Hermitian PSD
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return errors.empty(); }
};

ValidationReport validate_config(const ChainConfig& config);

/// Throws InvalidArgument listing every error when the config is invalid.
void require_valid(const ChainConfig& config);

SpaceDescriptor make_space(const ChainConfig& config);

/// H_LD + H_L + H_R on the full chain space.
SparseMatrix build_hamiltonian(const ChainConfig& config, const SpaceDescriptor& space);

/// Left-guided, right-guided and nonguided channels, in that order.
std::vector<DissipatorSpec> build_dissipators(const ChainConfig& config);

/// Embedded lowering operators s_1 ... s_N.
std::vector<SparseMatrix> lowering_operators(const SpaceDescriptor& space);

/// Embedded annihilation operators a_1 ... a_N.
std::vector<SparseMatrix> annihilation_operators(const SpaceDescriptor& space);

}  // namespace chirocool

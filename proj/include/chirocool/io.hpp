#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chirocool/analytic.hpp"
#include "chirocool/model.hpp"
#include "chirocool/rate_fit.hpp"
#include "chirocool/reduced.hpp"
#include "chirocool/steady_state.hpp"

namespace chirocool {

using Json = nlohmann::ordered_json;

/// Builds a config from a JSON object. Required keys: n_ions, eta, omega,
/// gamma_r, gamma_l. Optional: gamma_ng (0), xi or xi_pi (2 pi), phases,
/// delta (-1), n_max (1), target (1). Unknown keys are rejected. Errors name
/// the offending key path.
ChainConfig config_from_json(const Json& j);

/// Values given on the command line; each one replaces the file value.
struct ConfigOverrides {
  std::optional<int> n_ions;
  std::optional<double> eta;
  std::optional<std::vector<double>> omega;
  std::optional<double> gamma_r;
  std::optional<double> gamma_l;
  std::optional<double> gamma_ng;
  std::optional<double> xi;
  std::optional<double> delta;
  std::optional<int> n_max;
};

void apply_overrides(ChainConfig& config, const ConfigOverrides& overrides);

/// Parses a config file, applies the overrides, then validates. Parse errors
/// report the line.
ChainConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

Json to_json(const ChainConfig& config);
Json to_json(const SteadyObservables& obs);
Json to_json(const CoolingRateFit& fit);
Json to_json(const analytic::Prediction& prediction);
Json to_json(const reduced::ReducedSolution& solution);
Json to_json(const reduced::MinSearchResult& result);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string content_hash(const Json& j);

/// UTC timestamp, ISO 8601.
std::string utc_now();

/// Record of one CLI run; written after every other output so that its
/// presence signals a complete run.
struct RunManifest {
  std::string command;
  Json config;
  std::string started;
  std::string finished;
  std::string version;
  std::string spec_hash;
  std::vector<std::string> outputs;

  Json to_json() const;
  void write(const std::filesystem::path& path) const;
};

/// Formats with %.17g so doubles round-trip.
std::string format_double(double x);

}  // namespace chirocool

#pragma once

#include "merton/hjb_solver.hpp"
#include "merton/model_core.hpp"
#include "merton/montecarlo.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace merton {

/// Everything a CLI run needs. Parameter files are flat key=value text:
///
///   mu = 1
///   sigma = 1
///   mu_tilde = 0.5
///   sigma_tilde = 0.5
///   beta = 2
///   alpha = 0.3333333333333333
///   ; optional solver keys: ode_tol, bisect_tol, z_max, max_step
///   ode_tol = 1e-10
///
///   [simulate]
///   ; dt, horizon, paths, seed, x0, y0, antithetic
///   dt = 0.001
///
/// Comments take a whole line. Missing keys keep their defaults; unknown keys
/// are rejected.
struct RunConfig {
  RawParams model{};
  SolverOptions solver{};
  SimConfig sim{};
  std::filesystem::path output_dir = ".";
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Command-line values layered over a file; unset fields leave the file value.
struct ConfigOverrides {
  std::optional<double> mu, sigma, mu_tilde, sigma_tilde, beta, alpha;
  std::optional<double> ode_tol, bisect_tol, z_max, max_step;
  std::optional<double> dt, horizon, x0, y0;
  std::optional<long> paths;
  std::optional<std::uint64_t> seed;
  std::optional<bool> antithetic;
  std::optional<std::string> output_dir;
};

void apply_overrides(RunConfig& cfg, const ConfigOverrides& o);

} // namespace merton

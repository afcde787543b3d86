#pragma once

#include "merton/config.hpp"
#include "merton/hjb_solver.hpp"
#include "merton/k_table.hpp"
#include "merton/montecarlo.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

// Implementation of the `merton` subcommands. Data goes to files under
// cfg.output_dir and to `out`; errors are thrown as merton::Error.
namespace merton::cli {

Summary run_validate(const RunConfig& cfg, std::ostream& out);

/// Solves (with the z_max doubling check) and writes summary.txt and k_table.csv.
FreeBoundary run_solve(const RunConfig& cfg, std::ostream& out);

/// Single shot; writes shoot_k_table.csv.
KSolution run_shoot(const RunConfig& cfg, double z_star, std::ostream& out);

/// Writes classification.csv (index,z_star,classification,z_event) and k_table_<index>.csv
/// per candidate, indices starting at 1.
std::vector<KSolution> run_sweep(const RunConfig& cfg, std::span<const double> z_stars, std::ostream& out);

struct EvalResult {
  double value;
  double consumption_level;
  bool should_sell;
};

/// Evaluates the policy; uses a saved k_table when given, otherwise solves.
EvalResult run_eval(const RunConfig& cfg, double x, double y, std::ostream& out,
                    const std::optional<std::filesystem::path>& table = std::nullopt);

SimEstimate run_simulate(const RunConfig& cfg, std::ostream& out,
                         const std::optional<std::filesystem::path>& per_path_csv = std::nullopt,
                         const std::optional<std::filesystem::path>& table = std::nullopt);

/// Rebuilds an accepted free boundary from a k_table written by run_solve.
FreeBoundary load_boundary(const std::filesystem::path& k_table);

} // namespace merton::cli

// merton: free-boundary solver and Monte Carlo bench for consumption with one
// indivisible asset.
//
//   merton validate|solve|shoot|sweep|eval|simulate [--config PATH] [--out DIR] [overrides]

#include "merton/commands.hpp"
#include "merton/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

void add_overrides(CLI::App& app, merton::ConfigOverrides& o, std::string& config_path) {
  app.add_option("--config", config_path, "key=value parameter file")->check(CLI::ExistingFile);
  app.add_option("--out", o.output_dir, "output directory");
  app.add_option("--mu", o.mu);
  app.add_option("--sigma", o.sigma);
  app.add_option("--mu_tilde,--mu-tilde", o.mu_tilde);
  app.add_option("--sigma_tilde,--sigma-tilde", o.sigma_tilde);
  app.add_option("--beta", o.beta);
  app.add_option("--alpha", o.alpha);
  app.add_option("--ode-tol,--ode_tol", o.ode_tol);
  app.add_option("--bisect-tol,--bisect_tol", o.bisect_tol);
  app.add_option("--z-max,--z_max", o.z_max);
  app.add_option("--max-step,--max_step", o.max_step);
  app.add_option("--dt", o.dt);
  app.add_option("--horizon", o.horizon);
  app.add_option("--paths", o.paths);
  app.add_option("--seed", o.seed);
  app.add_option("--x0", o.x0);
  app.add_option("--y0", o.y0);
  app.add_option("--antithetic", o.antithetic);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-boundary solver and Monte Carlo bench for the Merton problem with one indivisible asset"};
  app.require_subcommand(1);

  merton::ConfigOverrides overrides;
  std::string config_path;
  add_overrides(app, overrides, config_path);

  auto* validate = app.add_subcommand("validate", "check parameters and print closed forms");
  auto* solve = app.add_subcommand("solve", "locate the free boundary; write summary.txt and k_table.csv");

  auto* shoot = app.add_subcommand("shoot", "integrate one shot and classify it");
  double z_star = 0.0;
  shoot->add_option("--z-star,--z_star", z_star)->required();

  auto* sweep = app.add_subcommand("sweep", "classify a list of candidate boundaries");
  std::vector<double> z_stars;
  sweep->add_option("--z-stars,--z_stars", z_stars)->delimiter(',');

  auto* eval = app.add_subcommand("eval", "value, consumption level and sell decision at (x, y)");
  double x = 0.0;
  double y = 0.0;
  std::optional<std::string> table;
  eval->add_option("--x", x)->required();
  eval->add_option("--y", y)->required();
  eval->add_option("--table", table, "k_table.csv from a previous solve");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the value at (x0, y0)");
  std::optional<std::string> per_path_csv;
  simulate->add_option("--per-path-csv", per_path_csv, "write one payoff per path");
  simulate->add_option("--table", table, "k_table.csv from a previous solve");

  for (auto* sub : {validate, solve, shoot, sweep, eval, simulate})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    merton::RunConfig cfg = config_path.empty() ? merton::RunConfig{} : merton::load_config(config_path);
    merton::apply_overrides(cfg, overrides);

    const auto as_path = [](const std::optional<std::string>& s) -> std::optional<std::filesystem::path> {
      if (s)
        return std::filesystem::path(*s);
      return std::nullopt;
    };

    if (*validate)
      merton::cli::run_validate(cfg, std::cout);
    else if (*solve)
      merton::cli::run_solve(cfg, std::cout);
    else if (*shoot)
      merton::cli::run_shoot(cfg, z_star, std::cout);
    else if (*sweep)
      merton::cli::run_sweep(cfg, z_stars, std::cout);
    else if (*eval)
      merton::cli::run_eval(cfg, x, y, std::cout, as_path(table));
    else if (*simulate)
      merton::cli::run_simulate(cfg, std::cout, as_path(per_path_csv), as_path(table));
  } catch (const merton::Error& e) {
    std::cerr << "error: " << merton::error_name(e.kind()) << ": " << e.what() << '\n';
    return merton::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

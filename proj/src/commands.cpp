#include "merton/commands.hpp"

#include "merton/errors.hpp"
#include "merton/policy.hpp"

#include <fstream>
#include <iostream>
#include <stdexcept>

namespace merton::cli {

namespace {

std::filesystem::path prepare_output(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  return cfg.output_dir;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

double max_gap_above_lower_envelope(const ModelParams& p, const KSolution& sol) {
  const Envelopes env(p);
  double gap = 0.0;
  for (std::size_t i = 1; i < sol.size(); ++i)
    gap = std::max(gap, sol.k_values[i] - env.b_lower(sol.grid[i]));
  return gap;
}

Policy make_policy(const ModelParams& p, const RunConfig& cfg,
                   const std::optional<std::filesystem::path>& table) {
  if (table)
    return Policy(p, load_boundary(*table));
  return Policy(p, find_free_boundary(p, cfg.solver));
}

} // namespace

Summary run_validate(const RunConfig& cfg, std::ostream& out) {
  const ModelParams p = validate_params(cfg.model);
  const MertonClosedForm m = merton_closed_form(p);
  Summary s{{"status", "valid"},
            {"A", format_double(m.A)},
            {"c_rate", format_double(m.c_rate)},
            {"z_bar", format_double(zbar_upper_bound(p))}};
  write_summary(out, s);
  return s;
}

FreeBoundary run_solve(const RunConfig& cfg, std::ostream& out) {
  const ModelParams p = validate_params(cfg.model);
  const MertonClosedForm m = merton_closed_form(p);
  TruncationCheck check = find_free_boundary_checked(p, cfg.solver);
  const FreeBoundary& fb = check.primary;
  const GridResidual residual = hjb_residual_on_grid(p, fb.solution);

  const Summary s{
      {"z_hat", format_double(fb.z_hat)},
      {"z_bar", format_double(zbar_upper_bound(p))},
      {"A", format_double(m.A)},
      {"c_rate", format_double(m.c_rate)},
      {"classification", std::string(shot_kind_name(fb.solution.classification.kind))},
      {"z_event", format_double(fb.solution.classification.z_event)},
      {"bracket_low", format_double(fb.bracket_low)},
      {"bracket_high", format_double(fb.bracket_high)},
      {"iterations", std::to_string(fb.iterations)},
      {"grid_points", std::to_string(fb.solution.size())},
      {"z_max", format_double(cfg.solver.shot.z_max)},
      {"z_hat_doubled_z_max", format_double(check.z_hat_doubled)},
      {"truncation_shift", format_double(check.shift())},
      {"hjb_residual_scaled", format_double(residual.max_scaled)},
      {"max_gap_above_b_lower", format_double(max_gap_above_lower_envelope(p, fb.solution))},
  };

  const auto dir = prepare_output(cfg);
  auto summary_file = open_for_write(dir / "summary.txt");
  write_summary(summary_file, s);
  write_k_table(dir / "k_table.csv", p, fb.solution);
  write_summary(out, s);
  return std::move(check.primary);
}

KSolution run_shoot(const RunConfig& cfg, double z_star, std::ostream& out) {
  const ModelParams p = validate_params(cfg.model);
  KSolution sol = integrate_shot(p, z_star, cfg.solver.shot);
  const auto dir = prepare_output(cfg);
  write_k_table(dir / "shoot_k_table.csv", p, sol);
  write_summary(out, {{"z_star", format_double(z_star)},
                      {"classification", std::string(shot_kind_name(sol.classification.kind))},
                      {"z_event", format_double(sol.classification.z_event)},
                      {"grid_points", std::to_string(sol.size())}});
  return sol;
}

std::vector<KSolution> run_sweep(const RunConfig& cfg, std::span<const double> z_stars, std::ostream& out) {
  const ModelParams p = validate_params(cfg.model);
  std::vector<KSolution> shots = sweep_shots(p, z_stars, cfg.solver.shot);
  const auto dir = prepare_output(cfg);
  auto table = open_for_write(dir / "classification.csv");
  table << "index,z_star,classification,z_event\n";
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const auto& s = shots[i];
    const std::string row = std::to_string(i + 1) + ',' + format_double(s.z_star) + ',' +
                            std::string(shot_kind_name(s.classification.kind)) + ',' +
                            format_double(s.classification.z_event);
    table << row << '\n';
    out << row << '\n';
    write_k_table(dir / ("k_table_" + std::to_string(i + 1) + ".csv"), p, s);
  }
  return shots;
}

EvalResult run_eval(const RunConfig& cfg, double x, double y, std::ostream& out,
                    const std::optional<std::filesystem::path>& table) {
  const ModelParams p = validate_params(cfg.model);
  const Policy pol = make_policy(p, cfg, table);
  const EvalResult r{pol.value(x, y), pol.consumption_level(x, y), pol.should_sell(x, y)};
  write_summary(out, {{"value", format_double(r.value)},
                      {"consumption_level", format_double(r.consumption_level)},
                      {"should_sell", yes_no(r.should_sell)}});
  return r;
}

SimEstimate run_simulate(const RunConfig& cfg, std::ostream& out,
                         const std::optional<std::filesystem::path>& per_path_csv,
                         const std::optional<std::filesystem::path>& table) {
  const ModelParams p = validate_params(cfg.model);
  validate_sim_config(cfg.sim);
  const Policy pol = make_policy(p, cfg, table);
  SimEstimate est = estimate_value(pol, cfg.sim, per_path_csv.has_value());

  const bool clamp_flag = static_cast<double>(est.clamp_events) > 1e-3 * static_cast<double>(est.steps);
  if (clamp_flag)
    std::cerr << "warning: " << est.clamp_events << " consumption queries clamped at z_max\n";

  Summary s{{"mean", format_double(est.mean)},
            {"stderr", format_double(est.std_error)},
            {"sold_fraction", format_double(est.sold_fraction)},
            {"clamp_events", std::to_string(est.clamp_events)},
            {"clamp_flag", yes_no(clamp_flag)},
            {"n_paths", std::to_string(est.n_paths)},
            {"horizon", format_double(est.horizon)}};
  const double ratio = cfg.sim.x0 / cfg.sim.y0;
  if (ratio <= pol.z_max())
    s.emplace_back("value_ode", format_double(pol.value(cfg.sim.x0, cfg.sim.y0)));
  write_summary(out, s);

  if (per_path_csv) {
    auto csv = open_for_write(*per_path_csv);
    csv << "path,payoff\n";
    for (std::size_t i = 0; i < est.payoffs.size(); ++i)
      csv << i << ',' << format_double(est.payoffs[i]) << '\n';
  }
  return est;
}

FreeBoundary load_boundary(const std::filesystem::path& k_table) {
  KTable t = read_k_table(k_table);
  if (t.z.size() < 2)
    throw std::runtime_error("k table " + k_table.string() + " has fewer than two rows");
  FreeBoundary fb;
  fb.z_hat = t.z.front();
  fb.bracket_low = fb.z_hat;
  fb.bracket_high = fb.z_hat;
  fb.solution.z_star = fb.z_hat;
  fb.solution.classification = {ShotKind::GlobalWithinBounds, t.z.back()};
  fb.solution.grid = std::move(t.z);
  fb.solution.k_values = std::move(t.k);
  fb.solution.kprime_values = std::move(t.kprime);
  return fb;
}

} // namespace merton::cli

#include "merton/config.hpp"

#include "merton/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <functional>
#include <map>

namespace merton {

namespace {

namespace pt = boost::property_tree;

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_same_v<T, double>)
      v = std::stod(text, &used);
    else if constexpr (std::is_same_v<T, long>)
      v = std::stol(text, &used);
    else
      v = std::stoull(text, &used);
    if (used != text.size())
      throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DomainError(ErrorKind::range, "bad value for " + key + ": '" + text + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes")
    return true;
  if (text == "false" || text == "0" || text == "no")
    return false;
  throw DomainError(ErrorKind::range, "bad value for " + key + ": '" + text + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& top_level_keys() {
  static const std::map<std::string, Setter> keys{
      {"mu", [](RunConfig& c, const std::string& v) { c.model.mu = parse_value<double>("mu", v); }},
      {"sigma", [](RunConfig& c, const std::string& v) { c.model.sigma = parse_value<double>("sigma", v); }},
      {"mu_tilde", [](RunConfig& c, const std::string& v) { c.model.mu_tilde = parse_value<double>("mu_tilde", v); }},
      {"sigma_tilde", [](RunConfig& c, const std::string& v) { c.model.sigma_tilde = parse_value<double>("sigma_tilde", v); }},
      {"beta", [](RunConfig& c, const std::string& v) { c.model.beta = parse_value<double>("beta", v); }},
      {"alpha", [](RunConfig& c, const std::string& v) { c.model.alpha = parse_value<double>("alpha", v); }},
      {"ode_tol", [](RunConfig& c, const std::string& v) { c.solver.shot.ode_tol = parse_value<double>("ode_tol", v); }},
      {"bisect_tol", [](RunConfig& c, const std::string& v) { c.solver.bisect_tol = parse_value<double>("bisect_tol", v); }},
      {"z_max", [](RunConfig& c, const std::string& v) { c.solver.shot.z_max = parse_value<double>("z_max", v); }},
      {"max_step", [](RunConfig& c, const std::string& v) { c.solver.shot.max_step = parse_value<double>("max_step", v); }},
      {"out", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
  };
  return keys;
}

const std::map<std::string, Setter>& simulate_keys() {
  static const std::map<std::string, Setter> keys{
      {"dt", [](RunConfig& c, const std::string& v) { c.sim.dt = parse_value<double>("dt", v); }},
      {"horizon", [](RunConfig& c, const std::string& v) { c.sim.horizon = parse_value<double>("horizon", v); }},
      {"paths", [](RunConfig& c, const std::string& v) { c.sim.n_paths = parse_value<long>("paths", v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.sim.seed = parse_value<std::uint64_t>("seed", v); }},
      {"x0", [](RunConfig& c, const std::string& v) { c.sim.x0 = parse_value<double>("x0", v); }},
      {"y0", [](RunConfig& c, const std::string& v) { c.sim.y0 = parse_value<double>("y0", v); }},
      {"antithetic", [](RunConfig& c, const std::string& v) { c.sim.antithetic = parse_bool("antithetic", v); }},
  };
  return keys;
}

} // namespace

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw DomainError(ErrorKind::range, std::string("config: ") + e.what());
  }

  RunConfig cfg;
  for (const auto& [key, node] : tree) {
    // An empty section reads back as a key with no value.
    if (key == "simulate" && node.empty() && node.data().empty())
      continue;
    if (!node.empty()) {
      if (key != "simulate")
        throw DomainError(ErrorKind::range, "config: unknown section [" + key + "]");
      for (const auto& [sim_key, sim_node] : node) {
        const auto it = simulate_keys().find(sim_key);
        if (it == simulate_keys().end())
          throw DomainError(ErrorKind::range, "config: unknown key simulate." + sim_key);
        it->second(cfg, sim_node.data());
      }
      continue;
    }
    const auto it = top_level_keys().find(key);
    if (it == top_level_keys().end())
      throw DomainError(ErrorKind::range, "config: unknown key " + key);
    it->second(cfg, node.data());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file " + path.string());
  return parse_config(in);
}

void apply_overrides(RunConfig& cfg, const ConfigOverrides& o) {
  const auto set = [](auto& field, const auto& value) {
    if (value)
      field = *value;
  };
  set(cfg.model.mu, o.mu);
  set(cfg.model.sigma, o.sigma);
  set(cfg.model.mu_tilde, o.mu_tilde);
  set(cfg.model.sigma_tilde, o.sigma_tilde);
  set(cfg.model.beta, o.beta);
  set(cfg.model.alpha, o.alpha);
  set(cfg.solver.shot.ode_tol, o.ode_tol);
  set(cfg.solver.bisect_tol, o.bisect_tol);
  set(cfg.solver.shot.z_max, o.z_max);
  set(cfg.solver.shot.max_step, o.max_step);
  set(cfg.sim.dt, o.dt);
  set(cfg.sim.horizon, o.horizon);
  set(cfg.sim.x0, o.x0);
  set(cfg.sim.y0, o.y0);
  set(cfg.sim.n_paths, o.paths);
  set(cfg.sim.seed, o.seed);
  set(cfg.sim.antithetic, o.antithetic);
  if (o.output_dir)
    cfg.output_dir = *o.output_dir;
}

} // namespace merton

#include "merton/commands.hpp"
#include "merton/config.hpp"
#include "merton/errors.hpp"
#include "merton/k_table.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

using namespace merton;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp dir, removed on scope exit.
struct ScratchDir {
  ScratchDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("merton_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path path;
};

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    out.push_back(line);
  return out;
}

std::map<std::string, std::string> summary_of(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos)
      out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

} // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse("mu = 0.8\n"
                            "; comment\n"
                            "alpha=0.25\n"
                            "bisect_tol = 1e-9\n"
                            "out = results\n"
                            "[simulate]\n"
                            "paths = 500\n"
                            "seed = 99\n"
                            "antithetic = true\n");
  CHECK(c.model.mu == 0.8);
  CHECK(c.model.alpha == 0.25);
  CHECK(c.model.sigma == 1.0);
  CHECK(c.solver.bisect_tol == 1e-9);
  CHECK(c.output_dir == fs::path("results"));
  CHECK(c.sim.n_paths == 500);
  CHECK(c.sim.seed == 99);
  CHECK(c.sim.antithetic);
  CHECK(c.sim.dt == 1e-3);

  CHECK_NOTHROW(parse("[simulate]\n"));
  CHECK(parse("").model.beta == 2.0);
}

TEST_CASE("config errors") {
  const auto kind = [](const std::string& text) {
    try {
      parse(text);
    } catch (const DomainError& e) {
      return e.kind();
    }
    FAIL("expected a DomainError for: " << text);
    return ErrorKind::truncation;
  };
  CHECK(kind("gamma = 1\n") == ErrorKind::range);
  CHECK(kind("[solver]\nmu = 1\n") == ErrorKind::range);
  CHECK(kind("[simulate]\nmu = 1\n") == ErrorKind::range);
  CHECK(kind("mu = one\n") == ErrorKind::range);
  CHECK(kind("mu = 1 ; trailing\n") == ErrorKind::range);
  CHECK(kind("[simulate]\nantithetic = maybe\n") == ErrorKind::range);
  CHECK(kind("[simulate]\npaths = 1.5\n") == ErrorKind::range);
  CHECK_THROWS(load_config("/nonexistent/merton.cfg"));
}

TEST_CASE("overrides layer over the file") {
  RunConfig c = parse("beta = 3\nsigma = 2\n");
  ConfigOverrides o;
  o.beta = 2.5;
  o.paths = 7;
  o.output_dir = "elsewhere";
  apply_overrides(c, o);
  CHECK(c.model.beta == 2.5);
  CHECK(c.model.sigma == 2.0);
  CHECK(c.sim.n_paths == 7);
  CHECK(c.output_dir == fs::path("elsewhere"));
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::exp(u(rng)) * (i % 2 ? -1.0 : 1.0);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("solve writes a table that reads back exactly") {
  ScratchDir dir;
  RunConfig cfg;
  cfg.output_dir = dir.path;
  std::ostringstream out;
  const FreeBoundary fb = cli::run_solve(cfg, out);

  const auto summary = summary_of(out.str());
  CHECK(summary.at("classification") == "GlobalWithinBounds");
  CHECK(std::stod(summary.at("z_hat")) == fb.z_hat);
  CHECK(fs::exists(dir.path / "summary.txt"));

  const auto lines = lines_of(dir.path / "k_table.csv");
  REQUIRE(!lines.empty());
  CHECK(lines.front() == kKTableHeader);
  CHECK(lines.size() == fb.solution.size() + 1);

  const KTable t = read_k_table(dir.path / "k_table.csv");
  CHECK(t.z == fb.solution.grid);
  CHECK(t.k == fb.solution.k_values);
  CHECK(t.kprime == fb.solution.kprime_values);

  // Evaluating from the saved table reproduces the in-memory policy.
  std::ostringstream a, b;
  const cli::EvalResult from_solve = cli::run_eval(cfg, 2.0, 1.0, a);
  const cli::EvalResult from_table = cli::run_eval(cfg, 2.0, 1.0, b, dir.path / "k_table.csv");
  CHECK(from_solve.value == from_table.value);
  CHECK(from_solve.consumption_level == from_table.consumption_level);
  CHECK_FALSE(from_solve.should_sell);
  CHECK(summary_of(a.str()).at("should_sell") == "false");

  std::ostringstream c;
  const cli::EvalResult sale = cli::run_eval(cfg, 1.0, 1.0, c, dir.path / "k_table.csv");
  CHECK(sale.should_sell);
  CHECK(std::abs(sale.value - 1.96555604565667) < 1e-13);
  CHECK_THROWS_AS(cli::run_eval(cfg, 1000.0, 1.0, c, dir.path / "k_table.csv"), OutOfRange);
}

TEST_CASE("malformed tables are rejected") {
  std::istringstream bad_header("z,K\n1,2\n");
  CHECK_THROWS(read_k_table(bad_header));
  std::istringstream bad_number(std::string(kKTableHeader) + "\n1,2,x,4,5,6\n");
  CHECK_THROWS(read_k_table(bad_number));
  std::istringstream short_row(std::string(kKTableHeader) + "\n1,2,3\n");
  CHECK_THROWS(read_k_table(short_row));
}

TEST_CASE("sweep output") {
  ScratchDir dir;
  RunConfig cfg;
  cfg.output_dir = dir.path;
  std::ostringstream out;

  SUBCASE("no candidates gives a header-only table") {
    cli::run_sweep(cfg, {}, out);
    const auto lines = lines_of(dir.path / "classification.csv");
    REQUIRE(lines.size() == 1);
    CHECK(lines[0] == "index,z_star,classification,z_event");
  }

  SUBCASE("candidates around the free boundary") {
    const ModelParams p = validate_params(cfg.model);
    const double z_hat = find_free_boundary(p).z_hat;
    const std::vector<double> z_stars{1.0, 1.31696, z_hat, 1.31697, 1.5};
    const auto shots = cli::run_sweep(cfg, z_stars, out);

    const auto lines = lines_of(dir.path / "classification.csv");
    REQUIRE(lines.size() == 6);
    CHECK(lines[3].rfind("3,", 0) == 0);
    CHECK(lines[3].find(",GlobalWithinBounds,") != std::string::npos);
    CHECK(is_below_type(shots[0].classification.kind));
    CHECK(is_above_type(shots[1].classification.kind));
    CHECK(is_above_type(shots[3].classification.kind));
    CHECK(is_above_type(shots[4].classification.kind));

    for (int i = 1; i <= 5; ++i)
      CHECK(fs::exists(dir.path / ("k_table_" + std::to_string(i) + ".csv")));
    const KTable middle = read_k_table(dir.path / "k_table_3.csv");
    for (std::size_t i = 1; i < middle.z.size(); ++i)
      CHECK(middle.k[i] - middle.b_lower[i] > 0.0);
  }
}

TEST_CASE("validate reports the closed forms") {
  std::ostringstream out;
  const Summary s = cli::run_validate(RunConfig{}, out);
  const auto m = summary_of(out.str());
  CHECK(m.at("status") == "valid");
  CHECK(std::abs(std::stod(m.at("c_rate")) - 8.0 / 3.0) < 1e-15);
  CHECK(std::abs(std::stod(m.at("z_bar")) - 1.5) < 1e-14);

  RunConfig bad;
  bad.model.beta = 0.1;
  CHECK_THROWS_AS(cli::run_validate(bad, out), DomainError);
}

TEST_CASE("simulate writes per-path payoffs") {
  ScratchDir dir;
  RunConfig cfg;
  cfg.output_dir = dir.path;
  cfg.sim.n_paths = 20;
  std::ostringstream out;
  const SimEstimate est = cli::run_simulate(cfg, out, dir.path / "paths.csv");
  const auto lines = lines_of(dir.path / "paths.csv");
  REQUIRE(lines.size() == 21);
  CHECK(lines[0] == "path,payoff");
  CHECK(summary_of(out.str()).at("n_paths") == "20");
  CHECK(est.payoffs.size() == 20);
}

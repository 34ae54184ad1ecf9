#include "oslab/config.hpp"

#include <doctest.h>

#include <fstream>

using namespace oslab;

namespace {

// Position of the diagnostic for a rejected config, or (0, 0) if accepted.
std::pair<int, int> error_at(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return {e.line(), e.column()};
  }
  return {0, 0};
}

const char* kFull = R"(# full example
[system]
kind = perturbed_toral
matrix = 2 1; 1 1
delta = 0.05

[horizons]
orbit = 5000
splitting = 80
stats = 3000
renorm_period = 4

[verify]
epsilon = 0.05
eta = 0.1
samples = 50
block_gap = 0.02

[pesin]
alpha = 0.6
beta = 0.7
epsilon = 0.05
k = 2
m_range = 30
n_range = 40

[search]
max_period = 12
seed_orbit_length = 1500
return_radius = 0.04
newton_max_iters = 30
newton_tol = 1e-12
dedup_tol = 1e-7

[run]
seed = 18446744073709551615
threads = 4

[output]
path = out.json
format = csv
)";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("every key is read") {
  const RunConfig c = parse_config_string(kFull);
  CHECK(c.system.kind == SystemKind::perturbed_toral);
  CHECK(c.system.matrix == (Matrix(2, 2) << 2, 1, 1, 1).finished());
  CHECK(c.system.delta == 0.05);
  CHECK(c.verify.orbit_horizon == 5000);
  CHECK(c.verify.splitting_horizon == 80);
  CHECK(c.verify.stats_horizon == 3000);
  CHECK(c.renorm_period == 4);
  CHECK(c.verify.epsilon == 0.05);
  CHECK(c.verify.eta == 0.1);
  CHECK(c.verify.samples == 50);
  CHECK(c.verify.block_gap == 0.02);
  CHECK(c.verify.pesin.alpha == 0.6);
  CHECK(c.verify.pesin.beta == 0.7);
  CHECK(c.verify.pesin.k == 2);
  CHECK(c.verify.pesin.m_range == 30);
  CHECK(c.verify.pesin.n_range == 40);
  CHECK(c.verify.search.max_period == 12);
  CHECK(c.verify.search.seed_orbit_length == 1500);
  CHECK(c.verify.search.return_radius == 0.04);
  CHECK(c.verify.search.newton_max_iters == 30);
  CHECK(c.verify.search.newton_tol == 1e-12);
  CHECK(c.verify.search.dedup_tol == 1e-7);
  CHECK(c.verify.seed == 18446744073709551615ull);
  CHECK(c.verify.threads == 4);
  CHECK(c.output_path == "out.json");
  CHECK(c.format == OutputFormat::csv);
}

TEST_CASE("defaults and minimal configs") {
  const RunConfig c = parse_config_string("[system]\nkind = henon\n");
  CHECK(c.system.kind == SystemKind::henon);
  CHECK(c.system.henon_a == 1.4);
  CHECK(c.verify.orbit_horizon == 10000);
  CHECK(c.format == OutputFormat::json);
  CHECK(c.output_path.empty());

  const RunConfig a3 = parse_config_string("[system]\nkind = toral_automorphism\nmatrix = 1,1,1; 1,2,2; 1,2,3\n");
  CHECK(a3.system.matrix.rows() == 3);
  CHECK(a3.system.matrix(2, 2) == 3.0);
}

TEST_CASE("comments and blank lines are ignored") {
  const RunConfig c = parse_config_string("\n  # lead\n[system]   # trailing\nkind = toral_automorphism # x\n"
                                          "matrix = 2 1; 1 1\n\n");
  CHECK(c.system.matrix(0, 0) == 2.0);
}

TEST_CASE("diagnostics carry line and column") {
  CHECK(error_at("[system]\nkind = henon\n[bogus]\n") == std::pair{3, 2});
  CHECK(error_at("[system]\nkind = henon\ncolour = red\n") == std::pair{3, 1});
  CHECK(error_at("[system]\nkind = henon\n[horizons]\norbit = ten\n").first == 4);
  CHECK(error_at("[system]\nkind = henon\nkind = henon\n").first == 3);
  CHECK(error_at("[system]\nkind = henon\n[system]\n").first == 3);
  CHECK(error_at("kind = henon\n").first == 1);
  CHECK(error_at("[system]\nkind =\n").first == 2);
  CHECK(error_at("[system\n").first == 1);
}

TEST_CASE("structural rejections") {
  CHECK(error_at("[horizons]\norbit = 10\n").first > 0);                             // no system block
  CHECK(error_at("[system]\nkind = toral_automorphism\n") == std::pair{1, 1});         // matrix missing
  CHECK(error_at("[system]\nkind = henon\nmatrix = 1 0; 0 1\n").first == 1);           // matrix not allowed
  CHECK(error_at("[system]\nkind = toral_automorphism\nmatrix = 2 1; 1\n").first == 3);  // ragged
  CHECK(error_at("[system]\nkind = lorenz\n").first == 2);
  CHECK(error_at("[system]\nkind = henon\n[output]\nformat = xml\n").first == 4);
  CHECK(error_at("[system]\nkind = henon\n[horizons]\nstats = 5\n").first > 0);
  CHECK(error_at("[system]\nkind = henon\n[verify]\neta = -1\n").first > 0);
  CHECK(error_at("[system]\nkind = henon\n[horizons]\nrenorm_period = 0\n").first > 0);
}

TEST_CASE("diagnostic message format") {
  try {
    parse_config_string("[system]\nkind = henon\ncolour = red\n");
    FAIL("accepted an unknown key");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("config:3:1: unknown key", 0) == 0);
  }
}

TEST_CASE("load from file") {
  const std::string path = "oslab_test_config.ini";
  {
    std::ofstream out(path);
    out << kFull;
  }
  CHECK(load_config(path).verify.threads == 4);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("does/not/exist.ini"), InputError);
}

TEST_CASE("bundled configs parse") {
  for (const char* name : {"cat2.ini", "perturbed_cat2.ini", "a3.ini"}) {
    CHECK_NOTHROW(load_config(std::string(OSLAB_CONFIG_DIR) + "/" + name));
  }
  CHECK(parse_config_string("[system]\nkind = linear\nmatrix = 2 0; 0 0.5\n").system.matrix(1, 1) == 0.5);
}

}  // TEST_SUITE

#include "oracles.hpp"
#include "oslab/serialize.hpp"

#include <doctest.h>

#include <sstream>

using namespace oslab;

namespace {

Point pt(double a, double b) { return (Point(2) << a, b).finished(); }

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

int line_count(const std::string& text) { return static_cast<int>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("documents start with schema and kind") {
  const System cat(SystemSpec::cat2());
  const Json doc = exponents_document(lyapunov_qr(cat, pt(0.3, 0.4), 1000), SystemSpec::cat2());
  auto it = doc.begin();
  CHECK(it.key() == "schema");
  CHECK(*it == kSchema);
  ++it;
  CHECK(it.key() == "kind");
  CHECK(*it == "exponents");
  CHECK_NOTHROW(check_document(doc, "exponents"));
  CHECK_THROWS_AS(check_document(doc, "periodic"), ValidationError);
  CHECK_THROWS_AS(check_document(Json::array(), "exponents"), ValidationError);
}

TEST_CASE("values survive a round trip through text") {
  const System cat(SystemSpec::cat2());
  const ExponentEstimate e = lyapunov_qr(cat, pt(0.3, 0.4), 1000);
  const Json doc = exponents_document(e, SystemSpec::cat2());
  const Json back = Json::parse(doc.dump(2));
  CHECK(back == doc);
  CHECK(back["exponents"][0].get<double>() == e.values(0));
  CHECK(back["exponents"][1].get<double>() == e.values(1));
  CHECK(back["system"]["matrix"][0][1].get<double>() == 1.0);
}

TEST_CASE("non-finite reals become null") {
  Vector v(3);
  v << 1.0, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity();
  const Json j = to_json(v);
  CHECK(j[0] == 1.0);
  CHECK(j[1].is_null());
  CHECK(j[2].is_null());
}

TEST_CASE("splitting document holds orthonormal block bases") {
  const System cat(SystemSpec::cat2());
  const SplittingSample s = estimate_splitting(cat, pt(0.2, 0.7), 60);
  const Json doc = splitting_document(s, SystemSpec::cat2());
  CHECK_NOTHROW(check_document(doc, "splitting"));
  const Json& blocks = doc["blocks"];
  REQUIRE(blocks.size() == 2);
  Vector u(2);
  u << blocks[1][0][0].get<double>(), blocks[1][0][1].get<double>();
  CHECK(std::abs(u.norm() - 1.0) < 1e-14);
  CHECK(grassmann_distance(Subspace::span(u), Subspace::span(oracle::cat_unstable())) < 1e-10);
}

TEST_CASE("periodic and pesin documents") {
  const System cat(SystemSpec::cat2());
  const PeriodicOrbit po = newton_refine(cat, pt(0, 0), 1, SearchConfig{});
  const Json per = periodic_document({po}, SystemSpec::cat2());
  CHECK_NOTHROW(check_document(per, "periodic"));
  CHECK(per["count"] == 1);
  CHECK(per["orbits"][0]["period"] == 1);
  CHECK(per["orbits"][0]["hyperbolic"] == true);
  CHECK(periodic_document({}, SystemSpec::cat2())["orbits"].empty());

  PesinParams p;
  p.alpha = p.beta = 0.96;
  p.m_range = 2;
  p.n_range = 3;
  PesinOptions opts;
  opts.audit = true;
  const PesinReport r = pesin_check(cat, pt(0.1, 0.1), Subspace::span(oracle::cat_stable()),
                                    Subspace::span(oracle::cat_unstable()), p, opts);
  const Json pd = pesin_document(r, pt(0.1, 0.1), SystemSpec::cat2());
  CHECK_NOTHROW(check_document(pd, "pesin"));
  CHECK(pd["pass"] == true);
  CHECK(pd["params"]["much_greater_factor"] == 10);
  CHECK(pd["audit"]["rows"].size() == 15);
  CHECK(pd["cocycle_margins"].size() == 5);
}

TEST_CASE("verify document is byte-identical across runs") {
  const System cat(SystemSpec::cat2());
  VerifyConfig cfg;
  cfg.orbit_horizon = 1000;
  cfg.stats_horizon = 1000;
  cfg.samples = 20;
  cfg.pesin.m_range = 10;
  cfg.pesin.n_range = 10;
  cfg.search.max_period = 1;
  const std::string a = verify_document(run_full_verification(cat, cfg)).dump(2);
  const std::string b = verify_document(run_full_verification(cat, cfg)).dump(2);
  CHECK(a == b);
  const Json doc = Json::parse(a);
  CHECK_NOTHROW(check_document(doc, "verify"));
  CHECK(doc["verdicts"]["exponents"] == "pass");
  CHECK(doc["orbit"]["period"] == 1);
}

TEST_CASE("csv headers and row counts") {
  const System cat(SystemSpec::cat2());
  std::ostringstream ex;
  write_exponents_csv(ex, lyapunov_qr(cat, pt(0.3, 0.4), 500));
  CHECK(first_line(ex.str()) == "index,exponent");
  CHECK(line_count(ex.str()) == 3);

  std::ostringstream sp;
  write_splitting_csv(sp, estimate_splitting(cat, pt(0.3, 0.4), 60));
  CHECK(first_line(sp.str()) == "block,dim,exponent,vector,c0,c1");
  CHECK(line_count(sp.str()) == 3);

  std::ostringstream per;
  const PeriodicOrbit po =
      newton_refine(cat, pt(0.2, 0.4), oracle::rational_period({{2, 1}, {1, 1}}, {1, 2}, 5), SearchConfig{});
  write_periodic_csv(per, {po});
  CHECK(first_line(per.str()) == "orbit,period,residual,step,x0,x1");
  CHECK(line_count(per.str()) == 1 + po.period);

  std::ostringstream pe;
  PesinParams p;
  p.alpha = p.beta = 0.96;
  p.m_range = 4;
  p.n_range = 4;
  write_pesin_csv(pe, pesin_check(cat, pt(0.1, 0.1), Subspace::span(oracle::cat_stable()),
                                  Subspace::span(oracle::cat_unstable()), p));
  CHECK(first_line(pe.str()) == "m,a,b,c");
  CHECK(line_count(pe.str()) == 10);

  CoverageReport c;
  c.eta = 0.5;
  c.samples.push_back({pt(0.1, 0.2), 0.25, 0});
  c.samples.push_back({pt(0.4, 0.2), 0.75, 0});
  std::ostringstream cov;
  write_coverage_csv(cov, c);
  CHECK(first_line(cov.str()) == "sample,x0,x1,distance,nearest,covered");
  std::istringstream rows(cov.str());
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  CHECK(line.substr(line.size() - 4) == ",0,1");
  std::getline(rows, line);
  CHECK(line.substr(line.size() - 4) == ",0,0");
}

}  // TEST_SUITE

#include "oracles.hpp"
#include "oslab/cocycle.hpp"

#include <doctest.h>

#include <sstream>

using namespace oslab;

namespace {

Point pt(double a, double b) { return (Point(2) << a, b).finished(); }

SplittingSample random_splitting(CounterRng& rng, int d, std::vector<int> dims) {
  SplittingSample g;
  g.base = rng.next_uniform_vector(d);
  g.dims = dims;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    g.spaces.push_back(oracle::random_subspace(rng, d, dims[i]));
    g.exponent_estimates.push_back(static_cast<double>(i));
  }
  return g;
}

const Matrix kCat = (Matrix(2, 2) << 2, 1, 1, 1).finished();

}  // namespace

TEST_SUITE("cocycle") {

TEST_CASE("generate_orbit examples") {
  const System cat(SystemSpec::cat2());
  const OrbitSegment fixed = generate_orbit(cat, pt(0, 0), 5);
  CHECK(fixed.horizon() == 5);
  CHECK(fixed.points.size() == 6);
  for (const auto& p : fixed.points) CHECK(p.norm() == 0.0);
  for (const auto& j : fixed.jacobians) CHECK(j == kCat);

  const OrbitSegment one = generate_orbit(cat, pt(0.2, 0.4), 1);
  CHECK(torus_distance(one.points[1], pt(0.8, 0.6)) < 1e-15);
  CHECK_THROWS_AS(generate_orbit(cat, pt(0, 0), 0), InputError);
}

TEST_CASE("orbit audit passes on random orbits") {
  CounterRng rng(41);
  for (const System& sys : {System(SystemSpec::cat2()), System(SystemSpec::perturbed_cat2(0.05)),
                            System(SystemSpec::a3())}) {
    const OrbitSegment orbit = generate_orbit(sys, rng.next_uniform_vector(sys.dim()), 500);
    CHECK(audit_orbit(sys, orbit) < 1e-12);
  }
}

TEST_CASE("escaping Henon orbit is reported") {
  const System henon(SystemSpec::henon());
  CHECK_THROWS_AS(generate_orbit(henon, pt(3.0, 3.0), 100), NumericError);
}

TEST_CASE("push_subspace examples") {
  CounterRng rng(42);
  const Subspace e = oracle::random_subspace(rng, 3, 2);
  CHECK(grassmann_distance(push_subspace(Matrix::Identity(3, 3), e), e) < 1e-14);
  const Subspace u = Subspace::span(oracle::cat_unstable());
  CHECK(grassmann_distance(push_subspace(kCat, u), u) < 1e-12);
  const Matrix rot = (Matrix(2, 2) << 0, -1, 1, 0).finished();
  CHECK(grassmann_distance(push_subspace(rot, Subspace::coordinate(2, {0})), Subspace::coordinate(2, {1})) < 1e-15);
  const Matrix collapse = (Matrix(2, 2) << 1, 0, 0, 0).finished();
  CHECK_THROWS_AS(push_subspace(collapse, Subspace::coordinate(2, {1})), DegeneracyError);
}

TEST_CASE("stepwise and one-product pushes agree") {
  CounterRng rng(43);
  for (int t = 0; t < 20; ++t) {
    const int n = oracle::random_int(rng, 1, 100);
    const Subspace e = oracle::random_subspace(rng, 2, 1);
    Subspace step = e;
    // Log-scaled product to keep the entries finite.
    Matrix prod = Matrix::Identity(2, 2);
    for (int i = 0; i < n; ++i) {
      step = push_subspace(kCat, step);
      prod = kCat * prod;
      prod /= prod.norm();
    }
    CHECK(grassmann_distance(step, push_subspace(prod, e)) < 1e-9);
  }
}

TEST_CASE("push_splitting") {
  CounterRng rng(44);
  const SplittingSample g = random_splitting(rng, 3, {1, 2});
  const Point y = rng.next_uniform_vector(3);
  const SplittingSample same = push_splitting(Matrix::Identity(3, 3), g, y);
  CHECK(same.base == y);
  for (std::size_t i = 0; i < g.spaces.size(); ++i) CHECK(grassmann_distance(same.spaces[i], g.spaces[i]) < 1e-14);

  SplittingSample eig;
  eig.base = pt(0, 0);
  eig.dims = {1, 1};
  eig.spaces = {Subspace::span(oracle::cat_stable()), Subspace::span(oracle::cat_unstable())};
  eig.exponent_estimates = {-oracle::kCatExponent, oracle::kCatExponent};
  const SplittingSample pushed = push_splitting(kCat, eig, pt(0, 0));
  for (std::size_t i = 0; i < 2; ++i) CHECK(grassmann_distance(pushed.spaces[i], eig.spaces[i]) < 1e-12);
}

TEST_CASE("splitting validation") {
  SplittingSample g;
  g.base = Point::Zero(2);
  g.dims = {1, 1};
  g.spaces = {Subspace::coordinate(2, {0}), Subspace::coordinate(2, {0})};
  g.exponent_estimates = {-1, 1};
  CHECK_THROWS_AS(g.validate(), DegeneracyError);
  g.spaces[1] = Subspace::coordinate(2, {1});
  CHECK_NOTHROW(g.validate());
  g.exponent_estimates = {1, 1};
  CHECK_THROWS_AS(g.validate(), InputError);
  g.exponent_estimates = {-1, 1};
  g.dims = {1};
  CHECK_THROWS_AS(g.validate(), InputError);
}

TEST_CASE("splitting_to_flag examples") {
  SplittingSample two;
  two.base = Point::Zero(2);
  two.dims = {1, 1};
  two.spaces = {Subspace::span(oracle::cat_stable()), Subspace::span(oracle::cat_unstable())};
  two.exponent_estimates = {-1, 1};
  const FlagSample w2 = splitting_to_flag(two);
  REQUIRE(w2.levels() == 1);
  CHECK(grassmann_distance(w2.filtration[0], two.spaces[0]) < 1e-15);
  CHECK(grassmann_distance(w2.cofiltration[0], two.spaces[1]) < 1e-15);

  SplittingSample three;
  three.base = Point::Zero(3);
  three.dims = {1, 1, 1};
  three.spaces = {Subspace::coordinate(3, {0}), Subspace::coordinate(3, {1}), Subspace::coordinate(3, {2})};
  three.exponent_estimates = {-1, 0.5, 1};
  const FlagSample w3 = splitting_to_flag(three);
  REQUIRE(w3.levels() == 2);
  CHECK(w3.level_dims == std::vector<int>{1, 2});
  CHECK(grassmann_distance(w3.filtration[0], Subspace::coordinate(3, {0})) < 1e-15);
  CHECK(grassmann_distance(w3.filtration[1], Subspace::coordinate(3, {0, 1})) < 1e-15);
  CHECK(grassmann_distance(w3.cofiltration[0], Subspace::coordinate(3, {1, 2})) < 1e-15);
  CHECK(grassmann_distance(w3.cofiltration[1], Subspace::coordinate(3, {2})) < 1e-15);
  CHECK_NOTHROW(w3.validate());
}

TEST_CASE("flag round trip on random splittings") {
  CounterRng rng(45);
  for (int t = 0; t < 200; ++t) {
    const int d = oracle::random_int(rng, 2, 6);
    std::vector<int> dims;
    int left = d;
    while (left > 0) {
      const int k = oracle::random_int(rng, 1, left);
      dims.push_back(k);
      left -= k;
    }
    if (dims.size() < 2) continue;
    const SplittingSample g = random_splitting(rng, d, dims);
    const SplittingSample back = flag_to_splitting(splitting_to_flag(g));
    REQUIRE(back.spaces.size() == g.spaces.size());
    // Accuracy degrades with the volume of the concatenated orthonormal bases.
    Matrix all(d, d);
    int col = 0;
    for (const Subspace& e : g.spaces) {
      all.middleCols(col, e.dim()) = e.basis();
      col += e.dim();
    }
    const double tol = 1e-13 / oracle::gram_volume(all);
    for (std::size_t i = 0; i < g.spaces.size(); ++i) CHECK(grassmann_distance(back.spaces[i], g.spaces[i]) < tol);
  }
}

TEST_CASE("flag outside the image is rejected") {
  FlagSample w;
  w.base = Point::Zero(2);
  w.level_dims = {1};
  w.filtration = {Subspace::coordinate(2, {0})};
  w.cofiltration = {Subspace::coordinate(2, {0})};
  CHECK_THROWS_AS(flag_to_splitting(w), DomainError);
}

TEST_CASE("flag nesting is checked") {
  FlagSample w;
  w.base = Point::Zero(3);
  w.level_dims = {1, 2};
  w.filtration = {Subspace::coordinate(3, {2}), Subspace::coordinate(3, {0, 1})};
  w.cofiltration = {Subspace::coordinate(3, {1, 2}), Subspace::coordinate(3, {2})};
  CHECK_THROWS_AS(w.validate(), DomainError);
}

TEST_CASE("flag push is equivariant") {
  CounterRng rng(46);
  for (int t = 0; t < 100; ++t) {
    const SplittingSample g = random_splitting(rng, 3, {1, 1, 1});
    const Matrix j = rng.next_normal_matrix(3, 3) + 2.0 * Matrix::Identity(3, 3);
    const Point y = rng.next_uniform_vector(3);
    const FlagSample a = splitting_to_flag(push_splitting(j, g, y));
    const FlagSample b = push_flag(j, splitting_to_flag(g), y);
    for (int i = 0; i < a.levels(); ++i) {
      const auto iu = static_cast<std::size_t>(i);
      CHECK(grassmann_distance(a.filtration[iu], b.filtration[iu]) < 1e-10);
      CHECK(grassmann_distance(a.cofiltration[iu], b.cofiltration[iu]) < 1e-10);
    }
  }
}

TEST_CASE("phi and psi") {
  CounterRng rng(47);
  const SplittingSample g = random_splitting(rng, 3, {1, 2});
  const FlagSample w = splitting_to_flag(g);
  CHECK(phi(1, Matrix::Identity(3, 3), w) == doctest::Approx(0.0));
  CHECK(psi(1, Matrix::Identity(3, 3), w) == doctest::Approx(0.0));
  CHECK_THROWS_AS(phi(2, Matrix::Identity(3, 3), w), InputError);

  FlagSample u;
  u.base = Point::Zero(2);
  u.level_dims = {1};
  u.filtration = {Subspace::span(oracle::cat_unstable())};
  u.cofiltration = {Subspace::span(oracle::cat_stable())};
  CHECK(phi(1, kCat, u) == doctest::Approx(oracle::kCatExponent).epsilon(1e-14));
  CHECK(psi(1, kCat, u) == doctest::Approx(-oracle::kCatExponent).epsilon(1e-14));
}

TEST_CASE("block log-determinants add up for invariant splittings") {
  // Real Schur-free construction: J = V diag(mu) V^{-1} has the columns of V
  // as invariant lines.
  CounterRng rng(48);
  for (int t = 0; t < 100; ++t) {
    const Matrix v = rng.next_normal_matrix(3, 3) + 2.0 * Matrix::Identity(3, 3);
    const Vector mu = rng.next_uniform_vector(3, 0.2, 4.0);
    const Matrix j = v * mu.asDiagonal() * v.inverse();
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += log_det_restricted(j, Subspace::span(Vector(v.col(i))));
    CHECK(std::abs(sum - std::log(std::abs(j.determinant()))) < 1e-9);
  }
}

TEST_CASE("orbit csv layout") {
  const System cat(SystemSpec::cat2());
  std::ostringstream out;
  write_orbit_csv(out, generate_orbit(cat, pt(0.2, 0.4), 2));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "step,x0,x1,j00,j01,j10,j11");
  std::getline(in, line);
  CHECK(line.rfind("0,0.2", 0) == 0);
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

}  // TEST_SUITE

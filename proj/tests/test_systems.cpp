#include "oracles.hpp"
#include "oslab/systems.hpp"

#include <doctest.h>

using namespace oslab;

namespace {

Point pt(double a, double b) { return (Point(2) << a, b).finished(); }

std::vector<System> all_kinds() {
  return {System(SystemSpec::cat2()), System(SystemSpec::a3()), System(SystemSpec::perturbed_cat2(0.05)),
          System(SystemSpec::perturbed_cat2(0.1)), System(SystemSpec::henon())};
}

Point random_point(CounterRng& rng, const System& sys) {
  if (sys.kind() == SystemKind::henon) return rng.next_uniform_vector(2, -1.0, 1.0);
  return rng.next_uniform_vector(sys.dim());
}

}  // namespace

TEST_SUITE("systems") {

TEST_CASE("kind names round-trip") {
  for (SystemKind k : {SystemKind::toral_automorphism, SystemKind::perturbed_toral, SystemKind::henon,
                       SystemKind::linear}) {
    CHECK(system_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(system_kind_from_string("lorenz"), InputError);
}

TEST_CASE("apply examples") {
  const System cat(SystemSpec::cat2());
  CHECK(cat.apply(pt(0, 0)).norm() == 0.0);
  CHECK(torus_distance(cat.apply(pt(0.2, 0.4)), pt(0.8, 0.6)) < 1e-15);
  const System henon(SystemSpec::henon(1.4, 0.3));
  CHECK((henon.apply(pt(0, 0)) - pt(1, 0)).norm() == 0.0);
}

TEST_CASE("jacobian examples") {
  const System cat(SystemSpec::cat2());
  const Matrix a = (Matrix(2, 2) << 2, 1, 1, 1).finished();
  CHECK(cat.jacobian(pt(0.3, 0.9)) == a);
  const System pert(SystemSpec::perturbed_cat2(0.07));
  CHECK((pert.jacobian(pt(0.6, 0.25)) - a).cwiseAbs().maxCoeff() < 1e-17);
  CHECK(pert.jacobian(pt(0.6, 0.0))(0, 1) == doctest::Approx(1.07).epsilon(1e-15));
  const System henon(SystemSpec::henon(1.4, 0.3));
  CHECK((henon.jacobian(pt(1, 0)) - (Matrix(2, 2) << -2.8, 1, 0.3, 0).finished()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("jacobian matches central differences") {
  CounterRng rng(31);
  for (const System& sys : all_kinds()) {
    for (int t = 0; t < 20; ++t) {
      const Point x = random_point(rng, sys);
      const Matrix j = sys.jacobian(x);
      const double h = 1e-6;
      for (int c = 0; c < sys.dim(); ++c) {
        Point xp = x, xm = x;
        xp(c) += h;
        xm(c) -= h;
        const Vector col = (sys.apply_lift(xp) - sys.apply_lift(xm)) / (2 * h);
        CHECK((col - j.col(c)).norm() < 1e-6);
      }
    }
  }
}

TEST_CASE("inverse examples") {
  const System cat(SystemSpec::cat2());
  CHECK(torus_distance(cat.apply_inverse(pt(0.8, 0.6)), pt(0.2, 0.4)) < 1e-15);
  const System henon(SystemSpec::henon(1.4, 0.3));
  CHECK((henon.apply_inverse(pt(1, 0)) - pt(0, 0)).norm() < 1e-15);
}

TEST_CASE("inverse round trip on 1000 points per kind") {
  CounterRng rng(32);
  for (const System& sys : all_kinds()) {
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const Point x = random_point(rng, sys);
      worst = std::max(worst, sys.distance(sys.apply(sys.apply_inverse(x)), x));
      worst = std::max(worst, sys.distance(sys.apply_inverse(sys.apply(x)), x));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("inverse jacobian inverts the forward jacobian") {
  CounterRng rng(33);
  for (const System& sys : all_kinds()) {
    for (int t = 0; t < 20; ++t) {
      const Point x = random_point(rng, sys);
      const Matrix prod = sys.inverse_jacobian(sys.apply(x)) * sys.jacobian(x);
      CHECK((prod - Matrix::Identity(sys.dim(), sys.dim())).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("validate_hyperbolic") {
  const SpectrumReport cat = validate_hyperbolic(SystemSpec::cat2());
  CHECK(cat.exponents(0) == doctest::Approx(-oracle::kCatExponent).epsilon(1e-14));
  CHECK(cat.exponents(1) == doctest::Approx(oracle::kCatExponent).epsilon(1e-14));
  CHECK(cat.block_dims == std::vector<int>{1, 1});

  const SpectrumReport a3 = validate_hyperbolic(SystemSpec::a3());
  const auto roots = oracle::cubic_roots(-6.0, 5.0, -1.0);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(a3.exponents(i) - std::log(roots[static_cast<std::size_t>(i)])) < 1e-12);
  CHECK(a3.block_dims == std::vector<int>{1, 1, 1});
  CHECK(std::abs(a3.determinant - 1.0) < 1e-12);
  CHECK(a3.exponents(0) == doctest::Approx(-1.178).epsilon(1e-3));
  CHECK(a3.exponents(2) == doctest::Approx(1.619).epsilon(1e-3));

  SystemSpec parabolic;
  parabolic.matrix = (Matrix(2, 2) << 1, 1, 0, 1).finished();
  CHECK_THROWS_AS(validate_hyperbolic(parabolic), ValidationError);
  SystemSpec stretched;
  stretched.matrix = (Matrix(2, 2) << 3, 1, 1, 1).finished();  // det 2
  CHECK_THROWS_AS(System{stretched}, ValidationError);
  SystemSpec fractional;
  fractional.matrix = (Matrix(2, 2) << 2, 1.5, 1, 1).finished();
  CHECK_THROWS_AS(System{fractional}, ValidationError);
  CHECK_THROWS(System{SystemSpec::perturbed_cat2(-0.1)});
  CHECK_THROWS(System{SystemSpec::henon(1.4, 0.0)});
}

TEST_CASE("jacobian determinants") {
  CounterRng rng(34);
  const System pert(SystemSpec::perturbed_cat2(0.1));
  const System a3(SystemSpec::a3());
  const System henon(SystemSpec::henon(1.4, 0.3));
  for (int t = 0; t < 200; ++t) {
    // The perturbation enters before the matrix acts, so the determinant is
    // 1 - delta cos(2 pi x2) rather than 1.
    const Point x = rng.next_uniform_vector(2);
    CHECK(std::abs(pert.jacobian(x).determinant() - (1.0 - 0.1 * std::cos(2 * std::numbers::pi * x(1)))) < 1e-14);
    CHECK(std::abs(std::abs(a3.jacobian(rng.next_uniform_vector(3)).determinant()) - 1.0) < 1e-12);
    CHECK(std::abs(henon.jacobian(rng.next_uniform_vector(2, -2, 2)).determinant() + 0.3) < 1e-15);
  }
}

TEST_CASE("toral maps commute with integer translations") {
  CounterRng rng(35);
  for (const System& sys : {System(SystemSpec::cat2()), System(SystemSpec::perturbed_cat2(0.05)),
                            System(SystemSpec::a3())}) {
    for (int t = 0; t < 200; ++t) {
      // Points straddling the boundary of the unit cell.
      Point x = rng.next_uniform_vector(sys.dim(), -1e-9, 1e-9);
      Point shifted = x;
      for (int i = 0; i < sys.dim(); ++i) shifted(i) += static_cast<double>(oracle::random_int(rng, -3, 3));
      CHECK(sys.distance(sys.apply(x), sys.apply(shifted)) < 1e-12);
      const Point y = sys.apply(x);
      CHECK((y.array() >= 0.0).all());
      CHECK((y.array() < 1.0).all());
    }
  }
}

TEST_CASE("torus distance wraps") {
  CHECK(torus_distance(pt(0.01, 0.5), pt(0.99, 0.5)) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(torus_distance(pt(0.0, 0.0), pt(0.5, 0.5)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

}  // TEST_SUITE

#include "doctest.h"

#include <chrono>
#include <cmath>
#include <vector>

#include "semithermo/errors.hpp"
#include "semithermo/transfer.hpp"

using namespace semithermo;

namespace {

Polynomial poly(std::vector<Complex> c) { return Polynomial(std::move(c)); }

GeneratorSet gen_square() { return GeneratorSet({RationalMap(poly({0, 0, 1}), poly({1}))}); }

GeneratorSet gen_square_cube() {
  return GeneratorSet({RationalMap(poly({0, 0, 1}), poly({1})),
                       RationalMap(poly({0, 0, 0, 1}), poly({1}))});
}

GeneratorSet gen_basilica() { return GeneratorSet({RationalMap(poly({-1, 0, 1}), poly({1}))}); }

}  // namespace

TEST_CASE("one application of the weighted preimage sum") {
  const GeneratorSet g = gen_square_cube();
  const Potential psi = Potential::constant(0.0, 2);
  // Counting preimages of a generic point: 2 + 3.
  const double count =
      apply_operator(g, psi, [](const ExtComplex&) { return 1.0; }, ExtComplex(Complex(0.4, 0.3)));
  CHECK(count == doctest::Approx(5.0).epsilon(1e-12));
  // Weighting by exp(c) scales the branch of that generator.
  const Potential per = Potential::constant_per_generator({1.0, 0.0});
  const double weighted =
      apply_operator(g, per, [](const ExtComplex&) { return 1.0; }, ExtComplex(Complex(0.4, 0.3)));
  CHECK(weighted == doctest::Approx(2.0 * std::exp(1.0) + 3.0).epsilon(1e-12));
}

TEST_CASE("exact iterates count the full backward tree") {
  const GeneratorSet g = gen_square();
  const Potential zero1 = Potential::constant(0.0, 1);
  CHECK(iterate_indicator_exact(g, zero1, ExtComplex(Complex(0.7, 0.1)), 10) ==
        doctest::Approx(1024.0).epsilon(1e-12));
  const GeneratorSet g2 = gen_square_cube();
  const Potential zero2 = Potential::constant(0.0, 2);
  CHECK(iterate_indicator_exact(g2, zero2, ExtComplex(Complex(0.7, 0.1)), 6) ==
        doctest::Approx(15625.0).epsilon(1e-12));
  CHECK(iterate_indicator_exact(g2, zero2, ExtComplex(2.0), 0) == 1.0);
}

TEST_CASE("exact iterate with the expansion weight has a closed value on the circle") {
  // Every preimage of a circle point stays on the circle where the squaring
  // map expands by exactly 2, so the n-fold sum is 2^n 2^(-n/2).
  const GeneratorSet g = gen_square();
  const Potential psi = Potential::geometric(0.5, 1);
  CHECK(iterate_indicator_exact(g, psi, ExtComplex(1.0), 3) ==
        doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-12));
  CHECK(iterate_indicator_exact(g, psi, ExtComplex(Complex(0, 1)), 5) ==
        doctest::Approx(std::pow(2.0, 2.5)).epsilon(1e-12));
}

TEST_CASE("exact iterates are independent of the partition split") {
  const GeneratorSet g = gen_square_cube();
  const Potential psi = Potential::geometric(0.4, 2);
  const ExtComplex z(Complex(0.3, -0.2));
  const double whole = iterate_indicator_exact(g, psi, z, 5, kDefaultNodeBudget, 1);
  for (const int hint : {2, 3, 7}) {
    const double split = iterate_indicator_exact(g, psi, z, 5, kDefaultNodeBudget, hint);
    CHECK(split == doctest::Approx(whole).epsilon(1e-12));
  }
}

TEST_CASE("exact iterates refuse to exceed the node budget") {
  const GeneratorSet g = gen_square_cube();
  const Potential psi = Potential::geometric(0.5, 2);
  // 5^12 backward leaves overflow the default budget.
  CHECK_THROWS_AS(iterate_indicator_exact(g, psi, ExtComplex(1.0), 12), NumericError);
  CHECK_THROWS_AS(iterate_indicator_exact(g, psi, ExtComplex(1.0), 4, 100.0), NumericError);
}

TEST_CASE("monte carlo iterates are unbiased and reproducible") {
  const GeneratorSet g = gen_basilica();
  const Potential psi = Potential::geometric(0.5, 1);
  const ExtComplex z(Complex(0.3, 0.2));
  const double exact = iterate_indicator_exact(g, psi, z, 6);
  const McEstimate mc = iterate_indicator_mc(g, psi, z, 6, 20000, 4);
  CHECK(mc.paths == 20000);
  CHECK(mc.std_error > 0.0);
  CHECK(std::abs(mc.mean - exact) <= 4.0 * mc.std_error);
  const McEstimate again = iterate_indicator_mc(g, psi, z, 6, 20000, 4);
  CHECK(again.mean == mc.mean);
  CHECK(again.std_error == mc.std_error);
  const McEstimate other = iterate_indicator_mc(g, psi, z, 6, 20000, 5);
  CHECK(other.mean != mc.mean);
  CHECK(std::abs(other.mean - exact) <= 4.0 * other.std_error);
}

TEST_CASE("monte carlo with a constant weight is exact") {
  // Every path carries the same weight, so the sample mean has no variance.
  const GeneratorSet g = gen_square_cube();
  const McEstimate mc =
      iterate_indicator_mc(g, Potential::constant(0.0, 2), ExtComplex(Complex(0.4, 0.1)), 6, 50, 2);
  CHECK(mc.mean == doctest::Approx(15625.0).epsilon(1e-12));
  CHECK(mc.std_error == doctest::Approx(0.0));
}

TEST_CASE("pointwise growth rate of the free systems") {
  const PressureEstimate one =
      pressure_pointwise(gen_square(), Potential::constant(0.0, 1), ExtComplex(Complex(0.5, 0.5)), 12);
  CHECK(one.method == "exact");
  CHECK(one.a.size() == 12);
  CHECK(one.b.size() == 12);
  CHECK(one.window == 4);  // final third of 12 increments
  CHECK(one.estimate == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(one.dispersion < 1e-9);
  for (const double b : one.b) CHECK(b == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const PressureEstimate two = pressure_pointwise(gen_square_cube(), Potential::constant(0.0, 2),
                                                  ExtComplex(Complex(0.5, 0.5)), 12);
  CHECK(two.estimate == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("constant weights reach depths the backward tree never could") {
  // At depth 40 the tree has 2^40 leaves; the constant-weight recursion
  // collapses to a closed form and must answer instantly.
  const auto t0 = std::chrono::steady_clock::now();
  const PressureEstimate est =
      pressure_pointwise(gen_square(), Potential::constant(0.0, 1), ExtComplex(2.0), 40);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  CHECK(est.estimate == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(ms < 1000);
}

TEST_CASE("expansion-weighted growth rate on the circle") {
  // b_n is exactly 0.5 log 2 at every depth, so the estimate is exact.
  const PressureEstimate est =
      pressure_pointwise(gen_square(), Potential::geometric(0.5, 1), ExtComplex(1.0), 10);
  CHECK(est.estimate == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(est.dispersion < 1e-9);
}

TEST_CASE("monte carlo growth rate tracks the exact one") {
  const GeneratorSet g = gen_basilica();
  const Potential psi = Potential::geometric(0.5, 1);
  const ExtComplex z(Complex(0.3, 0.2));
  const PressureEstimate ex = pressure_pointwise(g, psi, z, 10, PressureMode::kExact);
  const PressureEstimate mc =
      pressure_pointwise(g, psi, z, 10, PressureMode::kMonteCarlo, kDefaultNodeBudget, 40000, 11);
  CHECK(mc.method == "montecarlo");
  CHECK(mc.dispersion > 0.0);
  CHECK(std::abs(mc.estimate - ex.estimate) < std::max(0.05, 4.0 * mc.dispersion));
}

TEST_CASE("global growth rate across cloud points") {
  const GeneratorSet g = gen_square();
  const JuliaCloud cloud = julia_backward_sample(g, ExtComplex(Complex(0.5, 0.5)), 500, 100, 7);
  const GlobalPressure gp = pressure_global(g, Potential::constant(0.0, 1), cloud, 5, 12);
  CHECK(gp.per_point.size() == 5);
  CHECK(gp.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(gp.spread < 1e-9);
  CHECK(gp.max_dispersion < 1e-9);
  for (const PressureEstimate& p : gp.per_point) CHECK(!p.base_point.is_infinity());
  CHECK_THROWS_AS(pressure_global(g, Potential::constant(0.0, 1), JuliaCloud{}, 5, 12), ConfigError);
}

TEST_CASE("depth validation") {
  const GeneratorSet g = gen_square();
  const Potential psi = Potential::constant(0.0, 1);
  CHECK_THROWS_AS(iterate_indicator_exact(g, psi, ExtComplex(1.0), -1), ConfigError);
  CHECK_THROWS_AS(iterate_indicator_mc(g, psi, ExtComplex(1.0), -1, 100, 1), ConfigError);
  CHECK_THROWS_AS(iterate_indicator_mc(g, psi, ExtComplex(1.0), 3, 1, 1), ConfigError);
  CHECK_THROWS_AS(pressure_pointwise(g, psi, ExtComplex(1.0), 0), ConfigError);
}

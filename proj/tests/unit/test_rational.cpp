#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "semithermo/errors.hpp"
#include "semithermo/polynomial.hpp"
#include "semithermo/rational.hpp"

using namespace semithermo;

namespace {

Polynomial poly(std::vector<Complex> c) { return Polynomial(std::move(c)); }

RationalMap square() { return RationalMap(poly({0, 0, 1}), poly({1})); }
RationalMap cube() { return RationalMap(poly({0, 0, 0, 1}), poly({1})); }

// Sorted by real then imaginary part, for order-free comparison.
std::vector<Complex> sorted_finite(const std::vector<ExtComplex>& pts) {
  std::vector<Complex> out;
  for (const ExtComplex& p : pts)
    if (p.is_finite()) out.push_back(p.value());
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

bool contains_near(const std::vector<ExtComplex>& pts, const ExtComplex& target, double tol) {
  for (const ExtComplex& p : pts)
    if (chordal_distance(p, target) < tol) return true;
  return false;
}

}  // namespace

TEST_CASE("polynomial evaluation, derivative, reversal") {
  const Polynomial p = poly({1, -2, 3});  // 3z^2 - 2z + 1
  CHECK(p.degree() == 2);
  CHECK(p.evaluate(Complex(2, 0)) == Complex(9, 0));
  const Polynomial d = p.derivative();  // 6z - 2
  CHECK(d.degree() == 1);
  CHECK(d.evaluate(Complex(1, 0)) == Complex(4, 0));
  // p(1/w) w^2 has the coefficients reversed.
  const Polynomial r = p.reversed(2);
  CHECK(r.coeff(0) == Complex(3, 0));
  CHECK(r.coeff(2) == Complex(1, 0));
  // Exact trailing zeros trim on construction.
  CHECK(poly({1, 2, 0, 0}).degree() == 1);
  CHECK(poly({}).is_zero());
  CHECK(poly({0, 0}).is_zero());
}

TEST_CASE("polynomial arithmetic and trimming") {
  const Polynomial a = poly({1, 1});   // z + 1
  const Polynomial b = poly({-1, 1});  // z - 1
  const Polynomial prod = a * b;       // z^2 - 1
  CHECK(prod.degree() == 2);
  CHECK(prod.evaluate(Complex(3, 0)) == Complex(8, 0));
  CHECK((a + b).degree() == 1);      // 2z
  CHECK((a - a).is_zero());
  const Polynomial dusty = poly({1e-18, 0, 1});
  CHECK(dusty.trimmed(1e-12).coeff(0) == Complex(0, 0));
  CHECK(dusty.trimmed(1e-12).degree() == 2);
}

TEST_CASE("root finder recovers roots with multiplicity") {
  // (z - 1)^2 (z + 2) = z^3 - 3z + 2
  const auto roots = find_roots(poly({2, -3, 0, 1}));
  REQUIRE(roots.size() == 3);
  int near_one = 0, near_minus_two = 0;
  for (const Complex r : roots) {
    if (std::abs(r - Complex(1, 0)) < 1e-5) ++near_one;
    if (std::abs(r - Complex(-2, 0)) < 1e-8) ++near_minus_two;
  }
  CHECK(near_one == 2);
  CHECK(near_minus_two == 1);
}

TEST_CASE("construction rejects degenerate fractions") {
  // Shared root z = 1.
  CHECK_THROWS_AS(RationalMap(poly({-1, 0, 1}), poly({-1, 1})), ConfigError);
  // Zero denominator.
  CHECK_THROWS_AS(RationalMap(poly({1, 1}), poly({})), ConfigError);
  // Constant map.
  CHECK_THROWS_AS(RationalMap(poly({5}), poly({1})), ConfigError);
  // Coprime pair of honest degrees is fine.
  CHECK_NOTHROW(RationalMap(poly({-1, 0, 1}), poly({2, 1})));
}

TEST_CASE("squaring map basics") {
  const RationalMap f = square();
  CHECK(f.degree() == 2);
  CHECK(f.evaluate(Complex(3, 0)).value() == Complex(9, 0));
  CHECK(f.evaluate(ExtComplex::infinity()).is_infinity());
  CHECK(f.derivative_value(Complex(3, 0)) == Complex(6, 0));
  // Wronskian P'Q - PQ' = 2z, degree within 2e-2.
  CHECK(f.wronskian().degree() == 1);
  CHECK(f.wronskian().evaluate(Complex(1, 0)) == Complex(2, 0));
}

TEST_CASE("squaring map preimages form the full multiset") {
  const RationalMap f = square();
  const auto pre4 = f.preimages(ExtComplex(4.0));
  REQUIRE(pre4.size() == 2);
  const auto vals = sorted_finite(pre4);
  CHECK(std::abs(vals[0] - Complex(-2, 0)) < 1e-12);
  CHECK(std::abs(vals[1] - Complex(2, 0)) < 1e-12);

  // 0 is a double preimage of 0: the multiset still has two entries.
  const auto pre0 = f.preimages(ExtComplex(0.0));
  REQUIRE(pre0.size() == 2);
  for (const auto& p : pre0) CHECK(chordal_distance(p, ExtComplex(0.0)) < 1e-6);

  const auto preinf = f.preimages(ExtComplex::infinity());
  REQUIRE(preinf.size() == 2);
  for (const auto& p : preinf) CHECK(p.is_infinity());
}

TEST_CASE("degree-drop preimages land at infinity") {
  // f(z) = 1/z^2 sends infinity to 0 with multiplicity two.
  const RationalMap f(poly({1}), poly({0, 0, 1}));
  const auto pre = f.preimages(ExtComplex(0.0));
  REQUIRE(pre.size() == 2);
  for (const auto& p : pre) CHECK(p.is_infinity());
}

TEST_CASE("forward map evaluates preimages back to the target") {
  const RationalMap maps[] = {square(), cube(), RationalMap(poly({1, 0, 1}), poly({0, 2})),
                              RationalMap(poly({-1, 0, 1}), poly({1}))};
  const ExtComplex targets[] = {ExtComplex(Complex(0.3, 0.4)), ExtComplex(Complex(-2, 1)),
                                ExtComplex(5.0)};
  for (const RationalMap& f : maps) {
    for (const ExtComplex& w : targets) {
      const auto pre = f.preimages(w);
      CHECK(static_cast<int>(pre.size()) == f.degree());
      for (const auto& x : pre) {
        if (!x.is_finite()) continue;
        CHECK(chordal_distance(f.evaluate(x), w) < 1e-7);
      }
    }
  }
}

TEST_CASE("critical points of the squaring map") {
  const RationalMap f = square();
  const auto cps = f.critical_points();
  REQUIRE(cps.size() == 2);  // 2e - 2
  CHECK(contains_near(cps, ExtComplex(0.0), 1e-9));
  CHECK(contains_near(cps, ExtComplex::infinity(), 1e-9));
  const auto cvs = f.critical_values();
  CHECK(contains_near(cvs, ExtComplex(0.0), 1e-9));
  CHECK(contains_near(cvs, ExtComplex::infinity(), 1e-9));
}

TEST_CASE("critical points of (z^2+1)/(2z)") {
  const RationalMap f(poly({1, 0, 1}), poly({0, 2}));
  const auto cps = f.critical_points();
  REQUIRE(cps.size() == 2);
  CHECK(contains_near(cps, ExtComplex(1.0), 1e-9));
  CHECK(contains_near(cps, ExtComplex(-1.0), 1e-9));
  const auto cvs = f.critical_values();
  REQUIRE(cvs.size() == 2);
  CHECK(contains_near(cvs, ExtComplex(1.0), 1e-9));
  CHECK(contains_near(cvs, ExtComplex(-1.0), 1e-9));
}

TEST_CASE("critical points of (z^2-1)/(2z)") {
  const RationalMap f(poly({-1, 0, 1}), poly({0, 2}));
  const auto cps = f.critical_points();
  REQUIRE(cps.size() == 2);
  CHECK(contains_near(cps, ExtComplex(Complex(0, 1)), 1e-9));
  CHECK(contains_near(cps, ExtComplex(Complex(0, -1)), 1e-9));
  const auto cvs = f.critical_values();
  REQUIRE(cvs.size() == 2);
  CHECK(contains_near(cvs, ExtComplex(Complex(0, 1)), 1e-9));
  CHECK(contains_near(cvs, ExtComplex(Complex(0, -1)), 1e-9));
}

TEST_CASE("spherical derivative vanishes exactly at reported critical points") {
  const RationalMap maps[] = {square(), cube(), RationalMap(poly({1, 0, 1}), poly({0, 2})),
                              RationalMap(poly({-1, 0, 1}), poly({0, 2})),
                              RationalMap(poly({-1, 0, 0, 1}), poly({1}))};
  for (const RationalMap& f : maps) {
    CHECK(static_cast<int>(f.critical_points().size()) == 2 * f.degree() - 2);
    for (const auto& c : f.critical_points()) CHECK(f.spherical_derivative(c) < 1e-7);
  }
}

TEST_CASE("spherical derivative at pinned points") {
  const RationalMap f = square();
  // |2z| (1 + |z|^2) / (1 + |z^2|^2) at z = 1.
  CHECK(f.spherical_derivative(ExtComplex(1.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.spherical_derivative(ExtComplex(0.0)) == doctest::Approx(0.0));
  CHECK(f.spherical_derivative(ExtComplex::infinity()) == doctest::Approx(0.0));
  // On the unit circle the factor is exactly 2 everywhere.
  CHECK(f.spherical_derivative(ExtComplex(Complex(0.6, 0.8))) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cube().spherical_derivative(ExtComplex(Complex(0, 1))) ==
        doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("spherical derivative agrees with a chordal difference quotient") {
  const RationalMap f(poly({1, 0, 1}), poly({0, 2}));
  const Complex zs[] = {{0.4, 0.9}, {2.0, 0.3}, {-1.5, -0.2}};
  for (const Complex z : zs) {
    const double h = 1e-6;
    const ExtComplex fz = f.evaluate(z);
    const ExtComplex fzh = f.evaluate(z + Complex(h, 0));
    const double quotient = chordal_distance(fz, fzh) / chordal_distance(ExtComplex(z), ExtComplex(z + Complex(h, 0)));
    CHECK(f.spherical_derivative(ExtComplex(z)) == doctest::Approx(quotient).epsilon(1e-4));
  }
}

TEST_CASE("composition multiplies degrees") {
  const RationalMap c = compose(square(), cube());  // z^6
  CHECK(c.degree() == 6);
  CHECK(c.evaluate(Complex(2, 0)).value().real() == doctest::Approx(64.0).epsilon(1e-12));
  const RationalMap j(poly({1, 0, 1}), poly({0, 2}));
  const RationalMap jj = compose(j, j);
  CHECK(jj.degree() == 4);
  const Complex z(0.7, 0.2);
  CHECK(std::abs(jj.evaluate(z).value() - j.evaluate(j.evaluate(z).value()).value()) < 1e-12);
}

TEST_CASE("rational map JSON round trip") {
  const RationalMap f(poly({Complex(1, 0), Complex(0, 0), Complex(0.5, -0.25)}), poly({0, 2}));
  const RationalMap g = RationalMap::from_json_string(f.to_json_string());
  CHECK(g.degree() == f.degree());
  const Complex zs[] = {{0.2, 0.1}, {1.5, -2.0}, {-0.3, 0.9}};
  for (const Complex z : zs)
    CHECK(std::abs(g.evaluate(z).value() - f.evaluate(z).value()) < 1e-14);
  CHECK_THROWS_AS(RationalMap::from_json_string("{not json"), ConfigError);
  CHECK_THROWS_AS(RationalMap::from_json_string("{\"num\": [[1,0]]}"), ConfigError);
}

TEST_CASE("point clustering merges representatives but keeps multiplicity") {
  std::vector<ExtComplex> pts = {ExtComplex(1.0), ExtComplex(1.0 + 1e-9), ExtComplex(2.0),
                                 ExtComplex::infinity()};
  const auto clustered = cluster_points(pts, 1e-7);
  REQUIRE(clustered.size() == 4);
  CHECK(clustered[0] == clustered[1]);  // merged onto one centroid
  CHECK(std::abs(clustered[0].value() - Complex(1.0 + 5e-10, 0.0)) < 1e-12);
  CHECK(clustered[3].is_infinity());
}

#pragma once

#include <string>
#include <vector>

#include "semithermo/polynomial.hpp"
#include "semithermo/sphere.hpp"

namespace semithermo {

// Distinct-root tolerance: preimages and critical points closer than this in
// chordal distance are one root with aggregate multiplicity.
inline constexpr double kRootClusterTol = 1e-7;

// A rational map P/Q on the sphere in lowest terms. Construction rejects a
// shared root of P and Q (resultant below 1e-10 relative to coefficient
// scale) and degree zero. Immutable after construction.
class RationalMap {
public:
  RationalMap(Polynomial num, Polynomial den);

  int degree() const { return e_; }
  const Polynomial& num() const { return p_; }
  const Polynomial& den() const { return q_; }
  // P'Q - PQ', top coefficient cancelled structurally; degree <= 2e-2.
  const Polynomial& wronskian() const { return w_; }

  ExtComplex evaluate(const ExtComplex& z) const;
  ExtComplex evaluate(Complex z) const { return evaluate(ExtComplex(z)); }

  // Chordal expansion factor |f'(z)| (1+|z|^2) / (1+|f(z)|^2), evaluated
  // pole-free in the chart where |z| <= 1.
  double spherical_derivative(const ExtComplex& z) const;

  // Complex-chart derivative W(z)/Q(z)^2; z finite and not a pole.
  Complex derivative_value(Complex z) const;

  // Full preimage multiset of z, exactly degree() entries. Degree-drop roots
  // are assigned to infinity; clustered to kRootClusterTol.
  std::vector<ExtComplex> preimages(const ExtComplex& z) const;

  // Critical points with multiplicity, exactly 2*degree()-2 entries.
  std::vector<ExtComplex> critical_points() const;

  // Images of the critical points, deduplicated to kRootClusterTol.
  std::vector<ExtComplex> critical_values() const;

  std::string to_json_string() const;
  static RationalMap from_json_string(const std::string& text);

private:
  Polynomial p_, q_;    // numerator, denominator
  Polynomial dp_, dq_;  // their derivatives
  Polynomial rp_, rq_;  // reversed pair: f(1/w) = rp/rq
  Polynomial w_, rw_;   // wronskians of both charts
  int e_;
  std::vector<ExtComplex> crit_pts_, crit_vals_;  // computed at construction
};

// outer(inner(z)) as a rational map; degrees multiply.
RationalMap compose(const RationalMap& outer, const RationalMap& inner);

// Helpers shared with semigroup-level code.
std::vector<ExtComplex> cluster_points(std::vector<ExtComplex> pts, double tol);

}  // namespace semithermo

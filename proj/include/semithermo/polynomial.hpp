#pragma once

#include <vector>

#include "semithermo/sphere.hpp"

namespace semithermo {

// Dense polynomial over C, coefficients lowest degree first. Exact trailing
// zeros are trimmed on construction, so the leading coefficient of a nonzero
// polynomial is nonzero. The zero polynomial has an empty coefficient list
// and degree -1.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coeffs);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Complex>& coeffs() const { return c_; }
  Complex coeff(int k) const;
  Complex leading() const;
  double max_abs_coeff() const;

  Complex evaluate(Complex z) const;  // Horner
  Polynomial derivative() const;

  // Coefficients reversed within length n+1 (n >= degree): p(1/w) * w^n.
  Polynomial reversed(int n) const;

  // Coefficients with magnitude <= rel_tol * max_abs_coeff dropped, then
  // retrimmed. Used where exact leading-term cancellation is expected but
  // floating arithmetic leaves dust.
  Polynomial trimmed(double rel_tol) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Complex s, const Polynomial& a);

private:
  std::vector<Complex> c_;
};

// All roots of a nonconstant polynomial, with multiplicity, by simultaneous
// (Aberth) iteration plus one Newton polish per root. Coefficients are scaled
// to max modulus 1 first. Throws NumericError with the residual norm when the
// iteration fails to converge.
std::vector<Complex> find_roots(const Polynomial& p);

// |Res(p, q)| relative to coefficient scale, via Sylvester matrix elimination.
// Zero polynomials give 0.
double resultant_magnitude(const Polynomial& p, const Polynomial& q);

}  // namespace semithermo

#include "semithermo/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semithermo/errors.hpp"

namespace semithermo {

Polynomial::Polynomial(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {
  while (!c_.empty() && c_.back() == Complex(0.0, 0.0)) c_.pop_back();
}

Complex Polynomial::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return {0.0, 0.0};
  return c_[static_cast<std::size_t>(k)];
}

Complex Polynomial::leading() const { return c_.empty() ? Complex(0.0, 0.0) : c_.back(); }

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const Complex& c : c_) m = std::max(m, std::abs(c));
  return m;
}

Complex Polynomial::evaluate(Complex z) const {
  Complex acc(0.0, 0.0);
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<Complex> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::reversed(int n) const {
  std::vector<Complex> r(static_cast<std::size_t>(n) + 1, Complex(0.0, 0.0));
  for (std::size_t k = 0; k < c_.size(); ++k) r[static_cast<std::size_t>(n) - k] = c_[k];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::trimmed(double rel_tol) const {
  const double cut = rel_tol * max_abs_coeff();
  std::vector<Complex> t = c_;
  for (Complex& c : t)
    if (std::abs(c) <= cut) c = Complex(0.0, 0.0);
  return Polynomial(std::move(t));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Complex> s(std::max(a.c_.size(), b.c_.size()), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) s[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) s[i] += b.c_[i];
  return Polynomial(std::move(s));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  std::vector<Complex> s(std::max(a.c_.size(), b.c_.size()), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) s[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) s[i] -= b.c_[i];
  return Polynomial(std::move(s));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<Complex> s(a.c_.size() + b.c_.size() - 1, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) s[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(s));
}

Polynomial operator*(Complex s, const Polynomial& a) {
  std::vector<Complex> c = a.c_;
  for (Complex& x : c) x *= s;
  return Polynomial(std::move(c));
}

namespace {

// Residual scale sum |c_k| |z|^k; |p(z)| below eps times this means z is an
// exact root of a coefficient-wise nearby polynomial.
double residual_scale(const std::vector<Complex>& c, Complex z) {
  double s = 0.0;
  double zp = 1.0;
  const double az = std::abs(z);
  for (const Complex& ck : c) {
    s += std::abs(ck) * zp;
    zp *= az;
  }
  return s;
}

std::vector<Complex> solve_quadratic(Complex a, Complex b, Complex c) {
  // Stable form: the larger root via -b -/+ sqrt(disc) matched in sign.
  const Complex disc = std::sqrt(b * b - 4.0 * a * c);
  const Complex u = (std::real(std::conj(b) * disc) >= 0.0) ? -b - disc : -b + disc;
  const Complex r1 = u / (2.0 * a);
  // r1 * r2 = c / a; guard r1 == 0 (then b == +-disc and c == 0).
  const Complex r2 = (r1 == Complex(0.0, 0.0)) ? -b / a - r1 : (c / a) / r1;
  return {r1, r2};
}

}  // namespace

std::vector<Complex> find_roots(const Polynomial& p) {
  const int n = p.degree();
  if (n < 1) throw ConfigError("find_roots: polynomial must be nonconstant");

  // Scale to max |coeff| = 1 for conditioning.
  const double scale = p.max_abs_coeff();
  std::vector<Complex> c = p.coeffs();
  for (Complex& x : c) x /= scale;

  if (n == 1) return {-c[0] / c[1]};
  if (n == 2) return solve_quadratic(c[2], c[1], c[0]);

  // Aberth simultaneous iteration from a perturbed circle of radius the
  // Cauchy root bound.
  const std::size_t un = static_cast<std::size_t>(n);
  double bound = 0.0;
  for (std::size_t k = 0; k < un; ++k) bound = std::max(bound, std::abs(c[k] / c[un]));
  const double r0 = 1.0 + bound;

  std::vector<Complex> z(un);
  for (std::size_t k = 0; k < un; ++k) {
    const double th = 6.283185307179586 * (static_cast<double>(k) + 0.5) / static_cast<double>(n) + 0.4;
    z[k] = r0 * Complex(std::cos(th), std::sin(th));
  }

  const Polynomial ps{std::vector<Complex>(c)};
  const Polynomial dps = ps.derivative();

  const int max_iters = 200;
  bool converged = false;
  for (int it = 0; it < max_iters && !converged; ++it) {
    converged = true;
    for (std::size_t k = 0; k < un; ++k) {
      const Complex pv = ps.evaluate(z[k]);
      if (std::abs(pv) <= 1e-14 * residual_scale(c, z[k])) continue;
      const Complex dv = dps.evaluate(z[k]);
      if (dv == Complex(0.0, 0.0)) {
        z[k] += Complex(1e-8, 1e-8);
        converged = false;
        continue;
      }
      const Complex w = pv / dv;
      Complex s(0.0, 0.0);
      for (std::size_t j = 0; j < un; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      const Complex corr = w / (1.0 - w * s);
      z[k] -= corr;
      if (std::abs(corr) > 1e-14 * (1.0 + std::abs(z[k]))) converged = false;
    }
  }

  if (!converged) {
    double resid = 0.0;
    for (std::size_t k = 0; k < un; ++k)
      resid = std::max(resid, std::abs(ps.evaluate(z[k])) / residual_scale(c, z[k]));
    // Accept backward-stable roots even when corrections still move.
    if (resid > 1e-10) {
      std::ostringstream msg;
      msg << "find_roots: no convergence after " << max_iters
          << " iterations, max relative residual " << resid;
      throw NumericError(msg.str());
    }
  }

  // One Newton polish per root.
  for (std::size_t k = 0; k < un; ++k) {
    const Complex dv = dps.evaluate(z[k]);
    if (dv != Complex(0.0, 0.0)) {
      const Complex step = ps.evaluate(z[k]) / dv;
      if (std::abs(step) < 1.0) z[k] -= step;
    }
  }
  return z;
}

double resultant_magnitude(const Polynomial& p, const Polynomial& q) {
  const int dp = p.degree(), dq = q.degree();
  if (dp < 0 || dq < 0) return 0.0;
  if (dp == 0) return std::pow(std::abs(p.leading()), dq);
  if (dq == 0) return std::pow(std::abs(q.leading()), dp);

  // Sylvester matrix, then |det| by Gaussian elimination with partial pivots.
  const int n = dp + dq;
  std::vector<std::vector<Complex>> m(static_cast<std::size_t>(n),
                                      std::vector<Complex>(static_cast<std::size_t>(n), Complex(0.0, 0.0)));
  for (int r = 0; r < dq; ++r)
    for (int k = 0; k <= dp; ++k) m[r][r + k] = p.coeff(dp - k);
  for (int r = 0; r < dp; ++r)
    for (int k = 0; k <= dq; ++k) m[dq + r][r + k] = q.coeff(dq - k);

  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) == 0.0) return 0.0;
    std::swap(m[col], m[pivot]);
    det *= std::abs(m[col][col]);
    for (int r = col + 1; r < n; ++r) {
      const Complex f = m[r][col] / m[col][col];
      for (int k = col; k < n; ++k) m[r][k] -= f * m[col][k];
    }
  }
  return det;
}

}  // namespace semithermo

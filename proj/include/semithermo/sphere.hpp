#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace semithermo {

using Complex = std::complex<double>;

// Chordal diameter of the sphere under the metric used throughout.
inline constexpr double kSphereDiameter = 2.0;

// Finite points beyond this modulus count as the point at infinity in
// containment and clustering decisions. Arithmetic never rounds them.
inline constexpr double kInfinityThreshold = 1e8;

// A point of the Riemann sphere: either a finite complex value or the
// point at infinity. The marker carries no coordinates.
class ExtComplex {
public:
  ExtComplex() : v_(0.0, 0.0), inf_(false) {}
  ExtComplex(Complex v) : v_(v), inf_(false) {}
  ExtComplex(double re, double im = 0.0) : v_(re, im), inf_(false) {}

  static ExtComplex infinity() {
    ExtComplex p;
    p.inf_ = true;
    return p;
  }

  bool is_infinity() const { return inf_; }
  bool is_finite() const { return !inf_; }

  // Finite value; meaningless when is_infinity().
  Complex value() const { return v_; }

  friend bool operator==(const ExtComplex& a, const ExtComplex& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.v_ == b.v_;
  }
  friend bool operator!=(const ExtComplex& a, const ExtComplex& b) { return !(a == b); }

private:
  Complex v_;
  bool inf_;
};

// True when z should be treated as infinity in containment tests.
inline bool effectively_infinite(const ExtComplex& z) {
  return z.is_infinity() || std::abs(z.value()) > kInfinityThreshold;
}

// Chordal distance, diameter 2: 2|a-b| / sqrt((1+|a|^2)(1+|b|^2)), with
// distance 2/sqrt(1+|a|^2) to infinity. Scaled to avoid overflow.
inline double chordal_distance(const ExtComplex& a, const ExtComplex& b) {
  if (a.is_infinity() && b.is_infinity()) return 0.0;
  if (a.is_infinity() || b.is_infinity()) {
    const Complex v = a.is_infinity() ? b.value() : a.value();
    return 2.0 / std::hypot(1.0, std::abs(v));
  }
  const double sa = std::hypot(1.0, std::abs(a.value()));
  const double sb = std::hypot(1.0, std::abs(b.value()));
  return 2.0 * (std::abs(a.value() - b.value()) / sa) / sb;
}

inline double chordal_distance(Complex a, Complex b) {
  return chordal_distance(ExtComplex(a), ExtComplex(b));
}

// Normalized spherical area (total sphere area 1) of a chordal ball of
// radius r <= 2: exactly r^2/4 in this normalization.
inline double chordal_ball_area(double r) { return r * r / 4.0; }

}  // namespace semithermo

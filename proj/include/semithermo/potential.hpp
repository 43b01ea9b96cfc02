#pragma once

#include <string>
#include <vector>

#include "semithermo/semigroup.hpp"
#include "semithermo/sphere.hpp"

namespace semithermo {

// Expansion factors below this are clipped before taking logs in geometric
// potentials, so critical points give large finite values instead of -inf.
inline constexpr double kDerivClip = 1e-12;

// Summary of how far a potential sits from the pressure-gap threshold.
struct GapReport {
  double pressure = 0.0;      // supplied pointwise pressure estimate
  double sup = 0.0, inf = 0.0;  // potential extremes over the sampled set
  double log_generator_count = 0.0;
  double log_degree_sum = 0.0;
  // pressure - sup - log s; positive means the summability gap holds.
  double gap = 0.0;
  // (log degree sum - log s) - (sup - inf); positive is the oscillation
  // criterion that guarantees a positive gap for every pressure.
  double slack = 0.0;
};

// Per-generator weight field psi_j. One of: constant values, the geometric
// family -t log|f_j'| (spherical derivative, clipped), or a field tabulated
// on a rectangular grid with bilinear interpolation (clamped outside).
class Potential {
public:
  static Potential constant(double value, int generator_count);
  static Potential constant_per_generator(std::vector<double> values);
  static Potential geometric(double t, int generator_count);
  struct GridTable {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    std::size_t nx = 0, ny = 0;          // node counts per axis, >= 2
    std::vector<std::vector<double>> values;  // one nx*ny table per generator
  };
  static Potential grid(GridTable table);

  double evaluate(const GeneratorSet& g, int j, const ExtComplex& z) const;

  // Adds c to every generator field.
  Potential shifted(double c) const;

  bool is_constant() const { return kind_ == Kind::kConstant; }
  int generator_count() const { return count_; }

  std::string to_json_string() const;
  static Potential from_json_string(const std::string& text, int generator_count);

private:
  enum class Kind { kConstant, kGeometric, kGrid };
  Kind kind_ = Kind::kConstant;
  int count_ = 0;
  std::vector<double> values_;  // constants per generator
  double t_ = 0.0;              // geometric exponent
  double shift_ = 0.0;          // uniform offset, used by shifted()
  GridTable table_;
};

// Extremes of the potential over cloud points and generators.
struct SupInf {
  double sup = 0.0;
  double inf = 0.0;
};
SupInf sup_inf_estimate(const Potential& psi, const GeneratorSet& g, const JuliaCloud& cloud);

// Gap diagnostics given a pointwise pressure estimate.
GapReport gap_check(const Potential& psi, const GeneratorSet& g, double pressure_estimate,
                    const JuliaCloud& cloud);

// Sum of psi along the skew orbit: psi(prefix[k], z_k) for k < n with
// z_{k+1} = f_{prefix[k]}(z_k). Requires n <= prefix length.
double birkhoff_sum(const GeneratorSet& g, const Potential& psi, const Word& prefix,
                    const ExtComplex& z, int n);

}  // namespace semithermo

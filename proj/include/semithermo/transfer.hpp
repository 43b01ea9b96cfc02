#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semithermo/potential.hpp"
#include "semithermo/semigroup.hpp"

namespace semithermo {

// Leaf cap for exact backward-tree sums: (sum of degrees)^n must stay under
// this or the operation refuses and points to the Monte Carlo estimator.
inline constexpr double kDefaultNodeBudget = 1e7;

// One application of the weighted preimage sum: over generators j and every
// preimage x of z under f_j (with multiplicity), add exp(psi_j(x)) fn(x).
double apply_operator(const GeneratorSet& g, const Potential& psi,
                      const std::function<double(const ExtComplex&)>& fn, const ExtComplex& z);

// n-fold iterate at the constant one function, by full backward-tree
// enumeration. partition_hint many top-level chunks are summed separately and
// then reduced; the result must not depend on the split beyond roundoff.
double iterate_indicator_exact(const GeneratorSet& g, const Potential& psi, const ExtComplex& z,
                               int n, double node_budget = kDefaultNodeBudget,
                               int partition_hint = 1);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
};

// Unbiased single-path estimator of the n-fold iterate: each step picks one
// of the degree_sum() backward branches uniformly and multiplies the weight
// by degree_sum() * exp(psi at the branch). Path i draws from a stream
// derived from (seed, i) alone, so results are independent of scheduling.
McEstimate iterate_indicator_mc(const GeneratorSet& g, const Potential& psi, const ExtComplex& z,
                                int n, std::size_t paths, std::uint64_t seed);

// Growth diagnostics of log iterates at a base point. a[k] = (1/(k+1)) log
// of the (k+1)-iterate; b[k] = successive log increments; the headline value
// averages the final third of the increments, and dispersion is their spread
// in that window (plus the propagated standard error in Monte Carlo mode).
struct PressureEstimate {
  ExtComplex base_point;
  std::string method;       // "exact" or "montecarlo"
  std::vector<double> a;    // size n_max
  std::vector<double> b;    // size n_max, b[k] = log L^{k+1} - log L^k
  double estimate = 0.0;
  double dispersion = 0.0;
  int window = 0;           // number of trailing increments averaged
};

enum class PressureMode { kExact, kMonteCarlo };

PressureEstimate pressure_pointwise(const GeneratorSet& g, const Potential& psi,
                                    const ExtComplex& z, int n_max,
                                    PressureMode mode = PressureMode::kExact,
                                    double node_budget = kDefaultNodeBudget,
                                    std::size_t mc_paths = 20000, std::uint64_t seed = 1);

// Pointwise estimates across sample_count cloud points (evenly strided).
// value is the largest estimate; spread the max-min across points.
struct GlobalPressure {
  double value = 0.0;
  double spread = 0.0;
  double max_dispersion = 0.0;
  std::vector<PressureEstimate> per_point;
};

GlobalPressure pressure_global(const GeneratorSet& g, const Potential& psi, const JuliaCloud& cloud,
                               int sample_count, int n_max,
                               PressureMode mode = PressureMode::kExact,
                               double node_budget = kDefaultNodeBudget,
                               std::size_t mc_paths = 20000, std::uint64_t seed = 1);

}  // namespace semithermo

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semithermo/rational.hpp"
#include "semithermo/rng.hpp"
#include "semithermo/sphere.hpp"

namespace semithermo {

// Finite symbol sequence over {1..s}. Symbols are stored in application
// order: symbols[0] acts first.
struct Word {
  std::vector<int> symbols;
};

// The finitely many generators of a rational semigroup. Every generator must
// have degree at least two; this is what makes the Moebius part of the
// semigroup controllable and is checked at construction.
class GeneratorSet {
public:
  explicit GeneratorSet(std::vector<RationalMap> generators);

  int count() const { return static_cast<int>(gens_.size()); }
  // Sum of the generator degrees: the branch count of the skew product.
  int degree_sum() const { return degree_sum_; }
  // 1-based generator access.
  const RationalMap& map(int j) const { return gens_[static_cast<std::size_t>(j - 1)]; }

  std::string to_json_string() const;
  static GeneratorSet from_json_string(const std::string& text);

private:
  std::vector<RationalMap> gens_;
  int degree_sum_;
};

// A point of the skew product: an explicit finite stretch of the symbol
// sequence plus the fiber coordinate. next indexes the first unconsumed
// symbol.
struct SkewPoint {
  std::vector<int> tail;
  std::size_t next = 0;
  ExtComplex z;
};

// Backward-iteration sample of the Julia set, with the sampling metadata
// needed to reproduce it.
struct JuliaCloud {
  std::vector<ExtComplex> points;
  std::uint64_t seed = 0;
  int burn_in = 0;
};

enum class Verdict { kHolds, kInconclusive };

// Results of the checkable parts of the semigroup hypotheses. Verdicts are
// only ever "holds" or "inconclusive": a sampled cloud can certify distance
// from trouble but cannot certify membership in it.
struct ConditionReport {
  Verdict degree_condition = Verdict::kHolds;  // holds by construction
  Verdict critical_values_clear = Verdict::kInconclusive;
  Verdict no_superattracting_cycles = Verdict::kInconclusive;
  double delta = 0.0;                 // clearance radius used
  double min_cv_distance = 0.0;       // over finite critical values of all generators
  std::string witness;                // human-readable detail for inconclusive verdicts
  bool all_hold() const {
    return degree_condition == Verdict::kHolds && critical_values_clear == Verdict::kHolds &&
           no_superattracting_cycles == Verdict::kHolds;
  }
};

// One step of the skew product: consume the next symbol, move the fiber.
SkewPoint skew_step(const GeneratorSet& g, const SkewPoint& p);

// Apply the symbols of the word in order: symbols[0] first.
ExtComplex word_apply(const GeneratorSet& g, const Word& w, const ExtComplex& z);

// Chain-rule product of the generator expansion factors along the orbit.
double word_spherical_derivative(const GeneratorSet& g, const Word& w, const ExtComplex& z);

// Critical values of the composed word map, accumulated factor by factor:
// each step maps the collected values forward and adjoins its own.
std::vector<ExtComplex> word_critical_values(const GeneratorSet& g, const Word& w);

// Backward chaos game: repeatedly pull z back through a uniformly random
// generator and a uniformly random preimage branch. Points are recorded
// after burn_in pull-backs. A seed whose backward orbit freezes in place for
// 20 consecutive steps (movement below 1e-12) is rejected as exceptional.
JuliaCloud julia_backward_sample(const GeneratorSet& g, const ExtComplex& seed_point,
                                 std::size_t count, int burn_in, std::uint64_t seed);

// Median over the cloud of the chordal distance to the nearest other point.
double nearest_neighbor_spacing(const JuliaCloud& cloud);

// Smallest chordal distance from z to a cloud point.
double distance_to_cloud(const JuliaCloud& cloud, const ExtComplex& z);

// One-sided Hausdorff-style distance: max over a of min over b.
double cloud_hausdorff(const JuliaCloud& a, const JuliaCloud& b);

// Empirical screening of the semigroup hypotheses against a sampled cloud.
// delta <= 0 selects the default clearance 3x nearest-neighbor spacing.
// Orbit returns are searched over words of length at most orbit_length.
ConditionReport check_conditions(const GeneratorSet& g, const JuliaCloud& cloud,
                                 int orbit_length, double delta = 0.0);

}  // namespace semithermo

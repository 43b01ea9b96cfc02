#pragma once

#include <cstdint>
#include <vector>

#include "semithermo/semigroup.hpp"

namespace semithermo {

// Two continuations of the same fiber closer than this are treated as
// having merged; the branch is no longer single valued.
inline constexpr double kCollisionTol = 1e-7;

// Disk in the finite chart: Euclidean center and radius.
struct Ball {
  Complex center;
  double radius = 0.0;
};

// Largest chordal distance from the center to the rim, probed at spokes
// directions.
double ball_chordal_radius(const Ball& ball, int spokes = 16);

// One inverse branch of the word map over a ball, tracked on a polar grid:
// track[m][t] is the branch value over center + (t/T) R e^{i 2 pi m / M}.
// Alive means the continuation stayed single valued across the whole fiber.
struct InverseBranch {
  Word word;  // application order
  Ball base;
  Complex center_value;
  std::vector<std::vector<Complex>> track;  // [spokes][steps+1]
  bool collided = false;
  int collision_step = -1;  // radial step at which the fiber first merged

  // Largest chordal distance between tracked values with radial index <= t_steps.
  double image_diameter(int t_steps) const;
};

// Continue the root_choice-th preimage of the ball center under the word map
// outward along spokes radial lines in steps steps, advancing by Newton
// correction seeded at the previous value. Every fiber element is tracked so
// collisions are detected; the returned branch is the chosen one.
// The ball center must not be a critical value of the word map.
InverseBranch continue_branch(const GeneratorSet& g, const Word& word, const Ball& ball,
                              std::size_t root_choice, int spokes = 16, int steps = 64);

// sup over sampled pairs w, z in the t-shrunk ball of the ratio of branch
// derivative moduli; derivatives via the reciprocal of the forward word's
// spherical derivative at the branch values.
double distortion_ratio(const GeneratorSet& g, const InverseBranch& branch, double t);

// One level of the nested family construction.
struct FamilyLevel {
  int level = 0;
  std::size_t candidates = 0;  // single-valued extensions examined
  std::size_t survivors = 0;
  std::size_t pruned_area = 0;   // failed the area bound lambda^n
  std::size_t pruned_cv = 0;     // image met the next block's critical values
  std::size_t collided = 0;      // extensions that lost single-valuedness
  double pruning_allowance = 0.0;  // d q + lambda^{-n}
  double max_diameter = 0.0;       // inner-ball image diameter, max over survivors
  double distortion_t50 = 0.0;     // max over survivors at t = 1/2
  std::vector<InverseBranch> branches;
};

// Symbols consumed blockwise by build_family. Either an explicit repeating
// pattern or a seeded stream of uniform symbols.
struct SymbolStream {
  std::vector<int> pattern;  // repeated cyclically when nonempty
  std::uint64_t seed = 0;    // used when pattern is empty
};

// Nested inverse-branch families over B(z, 2R): level n extends the
// survivors of level n-1 by all single-valued inverse branches of the next
// q-symbol block, then prunes by the area bound and by critical values of
// the block after. Stops early (with fewer levels) when nothing survives.
std::vector<FamilyLevel> build_family(const GeneratorSet& g, const SymbolStream& stream, Complex z,
                                      double radius, double lambda, int q, int n_max,
                                      int spokes = 16, int steps = 64,
                                      std::size_t max_branches = 4096);

}  // namespace semithermo

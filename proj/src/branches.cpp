#include "semithermo/branches.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "semithermo/errors.hpp"
#include "semithermo/rng.hpp"

namespace semithermo {
namespace {

constexpr std::size_t kMaxFiber = 4096;

Complex spoke_direction(int m, int spokes) {
  const double theta = 2.0 * 3.14159265358979323846 * static_cast<double>(m) / spokes;
  return Complex(std::cos(theta), std::sin(theta));
}

std::vector<std::vector<Complex>> ball_grid(const Ball& ball, int spokes, int steps) {
  std::vector<std::vector<Complex>> pts(static_cast<std::size_t>(spokes));
  for (int m = 0; m < spokes; ++m) {
    auto& row = pts[static_cast<std::size_t>(m)];
    row.resize(static_cast<std::size_t>(steps) + 1);
    const Complex dir = spoke_direction(m, spokes);
    for (int t = 0; t <= steps; ++t) {
      row[static_cast<std::size_t>(t)] =
          ball.center + ball.radius * (static_cast<double>(t) / steps) * dir;
    }
  }
  return pts;
}

// Forward value of the word map at a finite w, with the complex-chart chain
// derivative when deriv is non-null. The orbit must stay in the finite chart
// and off the poles.
Complex word_forward(const GeneratorSet& g, const Word& word, Complex w, Complex* deriv) {
  Complex v = w;
  Complex d(1.0, 0.0);
  for (int sym : word.symbols) {
    if (std::abs(v) > kInfinityThreshold) {
      throw NumericError("inverse branch track left the finite chart");
    }
    const RationalMap& f = g.map(sym);
    const Complex qv = f.den().evaluate(v);
    if (!(std::abs(qv) > 0.0)) {
      throw NumericError("inverse branch track crossed a pole");
    }
    if (deriv != nullptr) d *= f.derivative_value(v);
    v = f.num().evaluate(v) / qv;
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericError("inverse branch track overflowed");
    }
  }
  if (deriv != nullptr) *deriv = d;
  return v;
}

// Move a tracked preimage to the fiber over target, seeded at the value over
// the previous grid point. Newton on the forward word; quadratic once the
// grid is fine enough for the seed to sit in the right basin.
Complex newton_to_target(const GeneratorSet& g, const Word& word, Complex seed, Complex target) {
  Complex w = seed;
  const double tol = 1e-12 * (1.0 + std::abs(target));
  double residual = 0.0;
  for (int it = 0; it < 24; ++it) {
    Complex deriv;
    const Complex value = word_forward(g, word, w, &deriv);
    residual = std::abs(value - target);
    if (residual <= tol) return w;
    if (!(std::abs(deriv) > 0.0)) {
      throw NumericError("inverse branch continuation hit a critical point");
    }
    const Complex step = (value - target) / deriv;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
      throw NumericError("inverse branch continuation diverged");
    }
    w -= step;
  }
  if (residual <= 1e-10 * (1.0 + std::abs(target))) return w;
  std::ostringstream msg;
  msg << "inverse branch continuation did not converge (forward residual " << residual << ")";
  throw NumericError(msg.str());
}

// Full fiber of the word map over v, inverting the last applied symbol first.
// Order is deterministic: the preimage order of each generator, depth first.
std::vector<ExtComplex> enumerate_fiber(const GeneratorSet& g, const Word& word,
                                        const ExtComplex& v) {
  if (word.symbols.empty()) return {v};
  std::size_t fiber_size = 1;
  for (int sym : word.symbols) {
    fiber_size *= static_cast<std::size_t>(g.map(sym).degree());
    if (fiber_size > kMaxFiber) {
      throw ConfigError("word fiber exceeds the tracking budget of 4096 preimages");
    }
  }
  Word prefix;
  prefix.symbols.assign(word.symbols.begin(), word.symbols.end() - 1);
  std::vector<ExtComplex> out;
  for (const ExtComplex& y : g.map(word.symbols.back()).preimages(v)) {
    for (const ExtComplex& x : enumerate_fiber(g, prefix, y)) out.push_back(x);
  }
  return out;
}

struct FiberTracks {
  // values[f][m][t], prefilled with the center fiber so every entry is
  // meaningful even after an early stop.
  std::vector<std::vector<std::vector<Complex>>> values;
  bool collided = false;
  int collision_step = -1;
};

// Continue every finite fiber element over the grid of targets. Two
// continuations of the same target closer than kCollisionTol mean the
// branches have merged and single-valuedness is lost.
FiberTracks track_fiber(const GeneratorSet& g, const Word& word,
                        const std::vector<std::vector<Complex>>& targets,
                        const std::vector<Complex>& center_fiber) {
  const std::size_t spokes = targets.size();
  const std::size_t len = targets.empty() ? 0 : targets[0].size();
  const std::size_t nf = center_fiber.size();
  FiberTracks out;
  out.values.assign(nf, std::vector<std::vector<Complex>>(
                            spokes, std::vector<Complex>(len, Complex(0.0, 0.0))));
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t m = 0; m < spokes; ++m) {
      std::fill(out.values[f][m].begin(), out.values[f][m].end(), center_fiber[f]);
    }
  }
  for (std::size_t a = 0; a < nf; ++a) {
    for (std::size_t b = a + 1; b < nf; ++b) {
      if (chordal_distance(center_fiber[a], center_fiber[b]) < kCollisionTol) {
        out.collided = true;
        out.collision_step = 0;
        return out;
      }
    }
  }
  for (std::size_t m = 0; m < spokes; ++m) {
    for (std::size_t t = 1; t < len; ++t) {
      for (std::size_t f = 0; f < nf; ++f) {
        const Complex w =
            newton_to_target(g, word, out.values[f][m][t - 1], targets[m][t]);
        if (std::abs(w) > kInfinityThreshold) {
          throw NumericError("inverse branch track left the finite chart");
        }
        out.values[f][m][t] = w;
      }
      for (std::size_t a = 0; a < nf && !out.collided; ++a) {
        for (std::size_t b = a + 1; b < nf; ++b) {
          if (chordal_distance(out.values[a][m][t], out.values[b][m][t]) < kCollisionTol) {
            out.collided = true;
            out.collision_step = static_cast<int>(t);
            break;
          }
        }
      }
      if (out.collided) return out;
    }
  }
  return out;
}

void validate_grid_params(int spokes, int steps) {
  if (spokes < 4) throw ConfigError("spokes must be at least 4");
  if (steps < 2 || steps % 2 != 0) throw ConfigError("steps must be even and at least 2");
}

// Coarsest chordal spacing of the tracked grid, used as the resolution limit
// when testing whether an image meets a critical value.
double track_resolution(const InverseBranch& branch) {
  const std::size_t spokes = branch.track.size();
  if (spokes == 0) return 0.0;
  const std::size_t len = branch.track[0].size();
  double res = 0.0;
  for (std::size_t m = 0; m < spokes; ++m) {
    for (std::size_t t = 1; t < len; ++t) {
      res = std::max(res, chordal_distance(branch.track[m][t], branch.track[m][t - 1]));
    }
    const std::size_t m2 = (m + 1) % spokes;
    res = std::max(res, chordal_distance(branch.track[m][len - 1], branch.track[m2][len - 1]));
  }
  return res;
}

bool track_meets_values(const InverseBranch& branch, const std::vector<ExtComplex>& values,
                        double margin) {
  for (const auto& spoke : branch.track) {
    for (const Complex& w : spoke) {
      for (const ExtComplex& cv : values) {
        if (chordal_distance(ExtComplex(w), cv) < margin) return true;
      }
    }
  }
  return false;
}

std::vector<int> stream_symbols(const SymbolStream& stream, int generator_count,
                                std::size_t total) {
  std::vector<int> symbols;
  symbols.reserve(total);
  if (!stream.pattern.empty()) {
    for (int sym : stream.pattern) {
      if (sym < 1 || sym > generator_count) {
        throw ConfigError("symbol pattern entry out of range");
      }
    }
    for (std::size_t i = 0; i < total; ++i) {
      symbols.push_back(stream.pattern[i % stream.pattern.size()]);
    }
  } else {
    RngStream rng(stream.seed);
    for (std::size_t i = 0; i < total; ++i) {
      symbols.push_back(1 + static_cast<int>(rng.uniform_index(
                                static_cast<std::uint64_t>(generator_count))));
    }
  }
  return symbols;
}

}  // namespace

double ball_chordal_radius(const Ball& ball, int spokes) {
  double r = 0.0;
  for (int m = 0; m < spokes; ++m) {
    const Complex rim = ball.center + ball.radius * spoke_direction(m, spokes);
    r = std::max(r, chordal_distance(ball.center, rim));
  }
  return r;
}

double InverseBranch::image_diameter(int t_steps) const {
  std::vector<Complex> pts;
  for (const auto& spoke : track) {
    const std::size_t hi = std::min<std::size_t>(spoke.size(), static_cast<std::size_t>(t_steps) + 1);
    for (std::size_t t = 0; t < hi; ++t) pts.push_back(spoke[t]);
  }
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      d = std::max(d, chordal_distance(pts[i], pts[j]));
    }
  }
  return d;
}

InverseBranch continue_branch(const GeneratorSet& g, const Word& word, const Ball& ball,
                              std::size_t root_choice, int spokes, int steps) {
  validate_grid_params(spokes, steps);
  if (!(ball.radius > 0.0)) throw ConfigError("ball radius must be positive");
  for (const ExtComplex& cv : word_critical_values(g, word)) {
    if (chordal_distance(cv, ExtComplex(ball.center)) < kCollisionTol) {
      throw ConfigError("ball center is a critical value of the word map");
    }
  }
  const std::vector<ExtComplex> fiber = enumerate_fiber(g, word, ExtComplex(ball.center));
  if (root_choice >= fiber.size()) {
    std::ostringstream msg;
    msg << "root choice " << root_choice << " out of range, fiber has " << fiber.size()
        << " elements";
    throw ConfigError(msg.str());
  }
  if (effectively_infinite(fiber[root_choice])) {
    throw NumericError("chosen inverse branch passes through infinity");
  }
  std::vector<Complex> finite;
  std::size_t chosen = 0;
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    if (effectively_infinite(fiber[i])) continue;
    if (i == root_choice) chosen = finite.size();
    finite.push_back(fiber[i].value());
  }
  const auto targets = ball_grid(ball, spokes, steps);
  FiberTracks tracks = track_fiber(g, word, targets, finite);
  InverseBranch branch;
  branch.word = word;
  branch.base = ball;
  branch.center_value = finite[chosen];
  branch.track = std::move(tracks.values[chosen]);
  branch.collided = tracks.collided;
  branch.collision_step = tracks.collision_step;
  return branch;
}

double distortion_ratio(const GeneratorSet& g, const InverseBranch& branch, double t) {
  if (branch.track.empty() || branch.track[0].empty()) return 1.0;
  const int steps = static_cast<int>(branch.track[0].size()) - 1;
  const int ring = std::clamp(static_cast<int>(std::lround(t * steps)), 0, steps);
  if (ring == 0) return 1.0;
  std::vector<Complex> samples;
  samples.push_back(branch.track[0][0]);
  for (const auto& spoke : branch.track) {
    samples.push_back(spoke[static_cast<std::size_t>(ring)]);
    samples.push_back(spoke[static_cast<std::size_t>(ring / 2)]);
  }
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const Complex& w : samples) {
    const double d = word_spherical_derivative(g, branch.word, ExtComplex(w));
    if (!(d > 0.0)) {
      throw NumericError("word derivative vanishes on the branch image");
    }
    if (first) {
      lo = hi = d;
      first = false;
    } else {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  return hi / lo;
}

std::vector<FamilyLevel> build_family(const GeneratorSet& g, const SymbolStream& stream, Complex z,
                                      double radius, double lambda, int q, int n_max, int spokes,
                                      int steps, std::size_t max_branches) {
  validate_grid_params(spokes, steps);
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("lambda must lie in (0, 1)");
  if (q < 1) throw ConfigError("block length q must be at least 1");
  if (n_max < 0) throw ConfigError("n_max must be nonnegative");

  // Blocks for levels 1..n_max plus one lookahead block for the final
  // critical-value prune.
  const std::vector<int> symbols =
      stream_symbols(stream, g.count(), static_cast<std::size_t>(q) * (n_max + 1));
  auto block_word = [&](int level) {
    Word w;
    const std::size_t base = static_cast<std::size_t>(q) * (level - 1);
    w.symbols.assign(symbols.begin() + static_cast<std::ptrdiff_t>(base),
                     symbols.begin() + static_cast<std::ptrdiff_t>(base + q));
    return w;
  };

  int d_max = 0;
  for (int j = 1; j <= g.count(); ++j) d_max = std::max(d_max, 2 * g.map(j).degree() - 2);

  const Ball ball{z, radius};
  const auto base_targets = ball_grid(ball, spokes, steps);
  const int inner = steps / 2;

  std::vector<FamilyLevel> levels;

  FamilyLevel root;
  root.level = 0;
  root.candidates = 1;
  root.survivors = 1;
  root.pruning_allowance = d_max * q + 1.0;  // lambda^0
  InverseBranch identity;
  identity.word = Word{};
  identity.base = ball;
  identity.center_value = z;
  identity.track = base_targets;
  root.max_diameter = identity.image_diameter(inner);
  root.distortion_t50 = 1.0;
  root.branches.push_back(std::move(identity));
  levels.push_back(std::move(root));

  for (int n = 1; n <= n_max; ++n) {
    const Word block = block_word(n);
    const std::vector<ExtComplex> next_cvs = word_critical_values(g, block_word(n + 1));

    FamilyLevel lvl;
    lvl.level = n;
    lvl.pruning_allowance = d_max * q + std::pow(lambda, -static_cast<double>(n));
    const double area_cap = std::pow(lambda, static_cast<double>(n));

    for (const InverseBranch& parent : levels.back().branches) {
      std::vector<Complex> finite_fiber;
      try {
        for (const ExtComplex& y :
             enumerate_fiber(g, block, ExtComplex(parent.center_value))) {
          if (effectively_infinite(y)) {
            ++lvl.collided;  // untrackable in the finite chart
            continue;
          }
          finite_fiber.push_back(y.value());
        }
      } catch (const NumericError&) {
        continue;
      }
      FiberTracks tracks;
      try {
        tracks = track_fiber(g, block, parent.track, finite_fiber);
      } catch (const NumericError&) {
        lvl.collided += finite_fiber.size();
        continue;
      }
      if (tracks.collided) {
        lvl.collided += finite_fiber.size();
        continue;
      }
      for (std::size_t f = 0; f < finite_fiber.size(); ++f) {
        ++lvl.candidates;
        InverseBranch child;
        child.word.symbols = block.symbols;
        child.word.symbols.insert(child.word.symbols.end(), parent.word.symbols.begin(),
                                  parent.word.symbols.end());
        child.base = ball;
        child.center_value = finite_fiber[f];
        child.track = tracks.values[f];
        const double diam = child.image_diameter(inner);
        if (chordal_ball_area(diam / 2.0) > area_cap) {
          ++lvl.pruned_area;
          continue;
        }
        const double margin = 2.0 * track_resolution(child);
        if (track_meets_values(child, next_cvs, margin)) {
          ++lvl.pruned_cv;
          continue;
        }
        lvl.max_diameter = std::max(lvl.max_diameter, diam);
        lvl.branches.push_back(std::move(child));
        if (lvl.branches.size() > max_branches) {
          throw ConfigError("branch family exceeds max_branches, raise the cap or prune harder");
        }
      }
    }
    lvl.survivors = lvl.branches.size();
    for (const InverseBranch& b : lvl.branches) {
      lvl.distortion_t50 = std::max(lvl.distortion_t50, distortion_ratio(g, b, 0.5));
    }
    const bool empty = lvl.branches.empty();
    levels.push_back(std::move(lvl));
    if (empty) break;
  }
  return levels;
}

}  // namespace semithermo

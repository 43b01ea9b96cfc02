#include "semithermo/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semithermo/errors.hpp"

namespace semithermo {

double apply_operator(const GeneratorSet& g, const Potential& psi,
                      const std::function<double(const ExtComplex&)>& fn, const ExtComplex& z) {
  double acc = 0.0;
  for (int j = 1; j <= g.count(); ++j) {
    for (const ExtComplex& x : g.map(j).preimages(z)) acc += std::exp(psi.evaluate(g, j, x)) * fn(x);
  }
  return acc;
}

namespace {

void check_budget(const GeneratorSet& g, int n, double node_budget) {
  const double leaves = std::pow(static_cast<double>(g.degree_sum()), n);
  if (leaves > node_budget) {
    std::ostringstream msg;
    msg << "backward tree needs " << leaves << " leaves at depth " << n << ", over the budget of "
        << node_budget << "; use the Monte Carlo estimator instead";
    throw NumericError(msg.str());
  }
}

// Depth-first accumulation of every level sum of the backward tree rooted at
// z: level_sums[k] += sum over depth-k backward orbits of exp(weight so far).
void accumulate_levels(const GeneratorSet& g, const Potential& psi, const ExtComplex& z,
                       double weight, int depth, int max_depth, std::vector<double>& level_sums) {
  level_sums[static_cast<std::size_t>(depth)] += weight;
  if (depth == max_depth) return;
  for (int j = 1; j <= g.count(); ++j) {
    for (const ExtComplex& x : g.map(j).preimages(z)) {
      accumulate_levels(g, psi, x, weight * std::exp(psi.evaluate(g, j, x)), depth + 1, max_depth,
                        level_sums);
    }
  }
}

}  // namespace

double iterate_indicator_exact(const GeneratorSet& g, const Potential& psi, const ExtComplex& z,
                               int n, double node_budget, int partition_hint) {
  if (n < 0) throw ConfigError("iterate_indicator_exact: negative depth");
  if (n == 0) return 1.0;
  check_budget(g, n, node_budget);

  // First level expanded by hand so the remaining subtrees can be split into
  // independent chunks; the chunk sums are reduced in fixed order.
  struct Branch {
    ExtComplex x;
    double w;
  };
  std::vector<Branch> branches;
  for (int j = 1; j <= g.count(); ++j)
    for (const ExtComplex& x : g.map(j).preimages(z))
      branches.push_back({x, std::exp(psi.evaluate(g, j, x))});

  const int chunks = std::max(1, partition_hint);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
  for (std::size_t i = 0; i < branches.size(); ++i) {
    std::vector<double> levels(static_cast<std::size_t>(n), 0.0);
    accumulate_levels(g, psi, branches[i].x, branches[i].w, 0, n - 1, levels);
    partial[i % static_cast<std::size_t>(chunks)] += levels[static_cast<std::size_t>(n - 1)];
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

McEstimate iterate_indicator_mc(const GeneratorSet& g, const Potential& psi, const ExtComplex& z,
                                int n, std::size_t paths, std::uint64_t seed) {
  if (n < 0) throw ConfigError("iterate_indicator_mc: negative depth");
  if (paths < 2) throw ConfigError("iterate_indicator_mc: need at least two paths");
  const double branch_count = static_cast<double>(g.degree_sum());

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < paths; ++i) {
    // Stream depends only on (seed, i): scheduling and partitioning cannot
    // change the estimate.
    RngStream rng(seed ^ ((i + 1) * 0x9e3779b97f4a7c15ull));
    ExtComplex x = z;
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      std::size_t pick = rng.uniform_index(static_cast<std::size_t>(g.degree_sum()));
      int j = 1;
      while (pick >= static_cast<std::size_t>(g.map(j).degree())) {
        pick -= static_cast<std::size_t>(g.map(j).degree());
        ++j;
      }
      const std::vector<ExtComplex> pre = g.map(j).preimages(x);
      x = pre[pick];
      w *= branch_count * std::exp(psi.evaluate(g, j, x));
    }
    sum += w;
    sum_sq += w * w;
  }

  McEstimate est;
  est.paths = paths;
  est.mean = sum / static_cast<double>(paths);
  const double var =
      std::max(0.0, sum_sq / static_cast<double>(paths) - est.mean * est.mean);
  est.std_error = std::sqrt(var / static_cast<double>(paths - 1));
  return est;
}

namespace {

PressureEstimate summarize(PressureEstimate est, const std::vector<double>& log_l, int n_max,
                           double extra_dispersion) {
  est.a.resize(static_cast<std::size_t>(n_max));
  est.b.resize(static_cast<std::size_t>(n_max));
  for (int k = 1; k <= n_max; ++k)
    est.a[static_cast<std::size_t>(k - 1)] = log_l[static_cast<std::size_t>(k)] / k;
  for (int k = 0; k < n_max; ++k)
    est.b[static_cast<std::size_t>(k)] =
        log_l[static_cast<std::size_t>(k + 1)] - log_l[static_cast<std::size_t>(k)];

  const int window = (n_max + 2) / 3;  // ceil(n_max / 3)
  est.window = window;
  double mean = 0.0, lo = est.b[static_cast<std::size_t>(n_max - window)], hi = lo;
  for (int k = n_max - window; k < n_max; ++k) {
    const double v = est.b[static_cast<std::size_t>(k)];
    mean += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  est.estimate = mean / window;
  est.dispersion = std::max(hi - lo, extra_dispersion);
  return est;
}

}  // namespace

PressureEstimate pressure_pointwise(const GeneratorSet& g, const Potential& psi,
                                    const ExtComplex& z, int n_max, PressureMode mode,
                                    double node_budget, std::size_t mc_paths, std::uint64_t seed) {
  if (n_max < 1) throw ConfigError("pressure_pointwise: n_max must be positive");
  PressureEstimate est;
  est.base_point = z;

  std::vector<double> log_l(static_cast<std::size_t>(n_max) + 1, 0.0);
  double extra_dispersion = 0.0;

  if (mode == PressureMode::kExact) {
    est.method = "exact";
    if (psi.is_constant()) {
      // A constant weight makes one application position independent:
      // L1 = sum_j e_j exp(c_j) everywhere, so the n-fold iterate is its
      // n-th power and no tree walk is needed.
      double level = 0.0;
      for (int j = 1; j <= g.count(); ++j)
        level += g.map(j).degree() * std::exp(psi.evaluate(g, j, ExtComplex(0.0)));
      const double log_level = std::log(level);
      for (int k = 1; k <= n_max; ++k) log_l[static_cast<std::size_t>(k)] = k * log_level;
    } else {
      check_budget(g, n_max, node_budget);
      std::vector<double> levels(static_cast<std::size_t>(n_max) + 1, 0.0);
      accumulate_levels(g, psi, z, 1.0, 0, n_max, levels);
      for (int k = 1; k <= n_max; ++k) {
        if (!(levels[static_cast<std::size_t>(k)] > 0.0))
          throw NumericError("pressure_pointwise: vanishing iterate, log undefined");
        log_l[static_cast<std::size_t>(k)] = std::log(levels[static_cast<std::size_t>(k)]);
      }
    }
  } else {
    est.method = "montecarlo";
    std::vector<double> rel_se(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int k = 1; k <= n_max; ++k) {
      const McEstimate mc = iterate_indicator_mc(g, psi, z, k, mc_paths,
                                                 seed ^ (static_cast<std::uint64_t>(k) << 32));
      if (!(mc.mean > 0.0))
        throw NumericError("pressure_pointwise: Monte Carlo iterate vanished, log undefined");
      log_l[static_cast<std::size_t>(k)] = std::log(mc.mean);
      rel_se[static_cast<std::size_t>(k)] = mc.std_error / mc.mean;
    }
    // The averaged window telescopes to the two endpoint log iterates;
    // propagate their standard errors.
    const int window = (n_max + 2) / 3;
    const double se = std::hypot(rel_se[static_cast<std::size_t>(n_max)],
                                 rel_se[static_cast<std::size_t>(n_max - window)]) /
                      window;
    extra_dispersion = se;
  }

  return summarize(std::move(est), log_l, n_max, extra_dispersion);
}

GlobalPressure pressure_global(const GeneratorSet& g, const Potential& psi, const JuliaCloud& cloud,
                               int sample_count, int n_max, PressureMode mode, double node_budget,
                               std::size_t mc_paths, std::uint64_t seed) {
  if (cloud.points.empty()) throw ConfigError("pressure_global: empty cloud");
  if (sample_count < 1) throw ConfigError("pressure_global: sample_count must be positive");
  const std::size_t m = std::min(static_cast<std::size_t>(sample_count), cloud.points.size());

  GlobalPressure global;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t idx = (i * cloud.points.size()) / m;
    PressureEstimate est = pressure_pointwise(g, psi, cloud.points[idx], n_max, mode, node_budget,
                                              mc_paths, seed + i);
    if (i == 0) {
      lo = hi = est.estimate;
    } else {
      lo = std::min(lo, est.estimate);
      hi = std::max(hi, est.estimate);
    }
    global.max_dispersion = std::max(global.max_dispersion, est.dispersion);
    global.per_point.push_back(std::move(est));
  }
  global.value = hi;
  global.spread = hi - lo;
  return global;
}

}  // namespace semithermo

#include "semithermo/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "semithermo/errors.hpp"
#include "semithermo/rng.hpp"

namespace semithermo {

std::size_t Grid::locate(const ExtComplex& z) const {
  if (!z.is_finite()) return npos;
  const double x = z.value().real(), y = z.value().imag();
  const long gx = static_cast<long>(std::floor((x - x0_) / delta_));
  const long gy = static_cast<long>(std::floor((y - y0_) / delta_));
  if (gx < 0 || gy < 0 || gx >= nx_ || gy >= ny_) return npos;
  const auto it = index_.find(static_cast<long long>(gy) * nx_ + gx);
  return it == index_.end() ? npos : it->second;
}

Grid build_grid(const JuliaCloud& cloud, std::size_t target_cells) {
  if (cloud.points.empty()) throw ConfigError("build_grid: empty cloud");
  if (target_cells < 1) throw ConfigError("build_grid: need a positive cell target");
  for (const ExtComplex& p : cloud.points)
    if (!p.is_finite()) throw ConfigError("build_grid: cloud contains the point at infinity");

  double x0 = cloud.points[0].value().real(), x1 = x0;
  double y0 = cloud.points[0].value().imag(), y1 = y0;
  for (const ExtComplex& p : cloud.points) {
    x0 = std::min(x0, p.value().real());
    x1 = std::max(x1, p.value().real());
    y0 = std::min(y0, p.value().imag());
    y1 = std::max(y1, p.value().imag());
  }
  const double w = x1 - x0, h = y1 - y0;

  Grid grid;
  if (std::max(w, h) < 1e-12) {
    grid.delta_ = 1e-6;  // a single tiny cell around a pointlike cloud
  } else if (std::min(w, h) < 1e-12) {
    grid.delta_ = std::max(w, h) / static_cast<double>(target_cells);
  } else {
    grid.delta_ = std::sqrt(w * h / static_cast<double>(target_cells));
  }
  grid.x0_ = x0;
  grid.y0_ = y0;
  grid.nx_ = static_cast<long>(std::floor(w / grid.delta_)) + 1;
  grid.ny_ = static_cast<long>(std::floor(h / grid.delta_)) + 1;

  // Retained lattice cells in row-major order.
  std::vector<long long> keys;
  {
    std::unordered_map<long long, bool> seen;
    for (const ExtComplex& p : cloud.points) {
      const long gx = std::min<long>(static_cast<long>(std::floor((p.value().real() - x0) / grid.delta_)),
                                     grid.nx_ - 1);
      const long gy = std::min<long>(static_cast<long>(std::floor((p.value().imag() - y0) / grid.delta_)),
                                     grid.ny_ - 1);
      const long long key = static_cast<long long>(gy) * grid.nx_ + gx;
      if (!seen[key]) {
        seen[key] = true;
        keys.push_back(key);
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const long gx = static_cast<long>(keys[i] % grid.nx_);
    const long gy = static_cast<long>(keys[i] / grid.nx_);
    grid.index_[keys[i]] = i;
    grid.coords_.emplace_back(gx, gy);
    grid.centers_.emplace_back(x0 + (static_cast<double>(gx) + 0.5) * grid.delta_,
                               y0 + (static_cast<double>(gy) + 0.5) * grid.delta_);
  }

  // Collocation nodes: per cell, the cloud point closest to the center.
  grid.nodes_ = grid.centers_;
  std::vector<double> best(grid.centers_.size(), std::numeric_limits<double>::infinity());
  for (const ExtComplex& p : cloud.points) {
    const std::size_t i = grid.locate(p);
    if (i == Grid::npos) continue;  // only the bbox edge rounding can do this
    const double d = std::abs(p.value() - grid.centers_[i]);
    if (d < best[i]) {
      best[i] = d;
      grid.nodes_[i] = p.value();
    }
  }
  return grid;
}

UlamOperator build_ulam(const GeneratorSet& g, const Potential& psi, const Grid& grid) {
  UlamOperator op;
  op.grid = grid;
  const std::size_t n = grid.cell_count();
  op.row_mass.assign(n, 0.0);
  op.row_leak.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const ExtComplex node(grid.node(i));
    for (int j = 1; j <= g.count(); ++j) {
      for (const ExtComplex& x : g.map(j).preimages(node)) {
        const double w = std::exp(psi.evaluate(g, j, x));
        const std::size_t k = grid.locate(x);
        if (k == Grid::npos) {
          op.row_leak[i] += w;
        } else {
          op.entries.push_back({i, k, j, w});
          op.row_mass[i] += w;
        }
      }
    }
  }

  const double kept = std::accumulate(op.row_mass.begin(), op.row_mass.end(), 0.0);
  const double leaked = std::accumulate(op.row_leak.begin(), op.row_leak.end(), 0.0);
  op.leak_fraction = leaked / std::max(kept + leaked, 1e-300);
  if (op.leak_fraction > kMaxLeakFraction) {
    std::ostringstream msg;
    msg << "build_ulam: " << (100.0 * op.leak_fraction)
        << "% of the preimage weight fell outside the retained cells; refine the grid or "
           "densify the cloud";
    throw NumericError(msg.str());
  }
  return op;
}

namespace {

// Strongly connected components of the entry pattern (Tarjan, iterative).
std::vector<std::vector<std::size_t>> strongly_connected_components(
    std::size_t n, const std::vector<UlamOperator::Entry>& entries) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : entries) adj[e.row].push_back(e.col);

  std::vector<int> idx(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> sccs;
  int counter = 0;

  struct Frame {
    std::size_t v;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (idx[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.edge < adj[f.v].size()) {
        const std::size_t u = adj[f.v][f.edge++];
        if (idx[u] == -1) {
          idx[u] = low[u] = counter++;
          stack.push_back(u);
          on_stack[u] = true;
          frames.push_back({u, 0});
        } else if (on_stack[u]) {
          low[f.v] = std::min(low[f.v], idx[u]);
        }
      } else {
        if (low[f.v] == idx[f.v]) {
          std::vector<std::size_t> scc;
          while (true) {
            const std::size_t u = stack.back();
            stack.pop_back();
            on_stack[u] = false;
            scc.push_back(u);
            if (u == f.v) break;
          }
          sccs.push_back(std::move(scc));
        }
        const std::size_t v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }
  return sccs;
}

// Crude spectral radius of the block: a few power steps on the submatrix.
double block_growth(const std::vector<std::size_t>& block,
                    const std::vector<UlamOperator::Entry>& entries, std::size_t n) {
  std::vector<std::size_t> pos(n, Grid::npos);
  for (std::size_t t = 0; t < block.size(); ++t) pos[block[t]] = t;
  std::vector<std::pair<std::size_t, std::pair<std::size_t, double>>> sub;
  for (const auto& e : entries)
    if (pos[e.row] != Grid::npos && pos[e.col] != Grid::npos)
      sub.push_back({pos[e.row], {pos[e.col], e.weight}});
  if (sub.empty()) return 0.0;

  std::vector<double> v(block.size(), 1.0 / static_cast<double>(block.size()));
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    std::vector<double> y(block.size(), 0.0);
    for (const auto& e : sub) y[e.first] += e.second.second * v[e.second.first];
    lambda = std::accumulate(y.begin(), y.end(), 0.0);
    if (lambda <= 0.0) return 0.0;
    for (double& x : y) x /= lambda;
    v.swap(y);
  }
  return lambda;
}

double power_iterate(std::size_t n, const std::vector<UlamOperator::Entry>& entries, bool transpose,
                     double tol, int max_iters, RngStream& rng, std::vector<double>& vec,
                     double& residual, int& iterations) {
  std::vector<double> v(n);
  for (double& x : v) x = 0.5 + rng.uniform01();
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= s;

  double lambda = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    std::vector<double> y(n, 0.0);
    if (transpose) {
      for (const auto& e : entries) y[e.col] += e.weight * v[e.row];
    } else {
      for (const auto& e : entries) y[e.row] += e.weight * v[e.col];
    }
    lambda = std::accumulate(y.begin(), y.end(), 0.0);
    if (!(lambda > 0.0))
      throw NumericError("leading_triple: operator annihilated the iterate; matrix too sparse");
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += std::abs(y[i] - lambda * v[i]);
    r /= lambda;
    for (double& x : y) x /= lambda;
    v.swap(y);
    if (r <= tol) {
      vec = std::move(v);
      residual = r;
      iterations = it;
      return lambda;
    }
  }
  std::ostringstream msg;
  msg << "leading_triple: power iteration did not reach residual " << tol << " in " << max_iters
      << " steps";
  throw NumericError(msg.str());
}

}  // namespace

EigenTriple leading_triple(const UlamOperator& op, double tol, int max_iters,
                           std::uint64_t start_seed) {
  const std::size_t n = op.grid.cell_count();
  if (n == 0) throw ConfigError("leading_triple: empty grid");

  // A unique strongly connected block must dominate the growth; competing
  // blocks make the limit depend on the start vector.
  const auto sccs = strongly_connected_components(n, op.entries);
  double best = -1.0, second = -1.0;
  for (const auto& scc : sccs) {
    const double growth = block_growth(scc, op.entries, n);
    if (growth > best) {
      second = best;
      best = growth;
    } else if (growth > second) {
      second = growth;
    }
  }
  if (best <= 0.0) throw NumericError("leading_triple: no growing block in the sparsity pattern");
  if (second > best * (1.0 - 1e-6)) {
    throw NumericError(
        "leading_triple: two strongly connected blocks grow at the same rate; "
        "the discretized operator is reducible");
  }

  EigenTriple triple;
  RngStream rng(start_seed);
  int it_h = 0, it_m = 0;
  const double lam_h =
      power_iterate(n, op.entries, false, tol, max_iters, rng, triple.h, triple.residual_h, it_h);
  const double lam_m =
      power_iterate(n, op.entries, true, tol, max_iters, rng, triple.m, triple.residual_m, it_m);
  triple.iterations = std::max(it_h, it_m);
  triple.lambda = lam_h;
  if (std::abs(lam_h - lam_m) > 1e-6 * std::max(1.0, std::abs(lam_h)))
    throw NumericError("leading_triple: left and right growth rates disagree");

  // Normalize: total m mass one, then unit average of h against m.
  const double ms = std::accumulate(triple.m.begin(), triple.m.end(), 0.0);
  for (double& x : triple.m) x /= ms;
  double hm = 0.0;
  for (std::size_t i = 0; i < n; ++i) hm += triple.h[i] * triple.m[i];
  if (!(hm > 0.0)) throw NumericError("leading_triple: h has no mass against m");
  for (double& x : triple.h) x /= hm;
  return triple;
}

std::vector<double> equilibrium_from(const EigenTriple& triple) {
  std::vector<double> mu(triple.h.size());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = triple.h[i] * triple.m[i];
  const double s = std::accumulate(mu.begin(), mu.end(), 0.0);
  if (!(s > 0.0)) throw NumericError("equilibrium_from: zero total mass");
  for (double& x : mu) x /= s;
  return mu;
}

double jacobian_residual(const GeneratorSet& g, const Potential& psi, const UlamOperator& op,
                         const EigenTriple& triple, int sample_count, std::uint64_t seed) {
  const Grid& grid = op.grid;
  const std::size_t n = grid.cell_count();
  if (sample_count < 1) throw ConfigError("jacobian_residual: need a positive sample count");
  RngStream rng(seed);
  const double log_lambda = std::log(triple.lambda);

  double num = 0.0, den = 0.0;
  int used = 0;
  for (int s = 0; s < sample_count; ++s) {
    const std::size_t a = rng.uniform_index(n);
    const int j = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(g.count()))) + 1;
    const Complex ca = grid.center(a);

    // Patch: retained cells within 3.2 grid steps of the anchor center.
    std::vector<std::size_t> patch;
    const double radius = 3.2 * grid.delta();
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(grid.center(i) - ca) <= radius) patch.push_back(i);

    double patch_diam = 0.0;
    for (std::size_t u = 0; u < patch.size(); ++u)
      for (std::size_t v = u + 1; v < patch.size(); ++v)
        patch_diam = std::max(patch_diam,
                              chordal_distance(Complex(grid.center(patch[u])), Complex(grid.center(patch[v]))));
    // Cell-diagonal pad, measured at the anchor so the sphere scale is local.
    patch_diam += chordal_distance(ca, ca + Complex(grid.delta(), grid.delta()));

    // Injectivity prescreen: the patch keeps clear of every critical point
    // of f_j by its own diameter.
    bool injective = true;
    for (const ExtComplex& c : g.map(j).critical_points()) {
      for (const std::size_t i : patch) {
        if (chordal_distance(c, ExtComplex(grid.center(i))) < patch_diam) {
          injective = false;
          break;
        }
      }
      if (!injective) break;
    }
    if (!injective || patch.empty()) continue;

    std::vector<bool> in_patch(n, false);
    for (std::size_t i : patch) in_patch[i] = true;

    // Collocation measure of the image: cells whose center has a preimage
    // inside the patch. Two distinct preimages of one center landing in the
    // patch would mean f_j folds it; that anchor is discarded.
    double lhs = 0.0;
    for (std::size_t k = 0; k < n && injective; ++k) {
      int hits = 0;
      for (const ExtComplex& x : g.map(j).preimages(ExtComplex(grid.node(k)))) {
        const std::size_t loc = grid.locate(x);
        if (loc != Grid::npos && in_patch[loc]) ++hits;
      }
      if (hits > 1) injective = false;
      if (hits > 0) lhs += triple.m[k];
    }
    if (!injective) continue;

    double rhs = 0.0;
    for (std::size_t i : patch)
      rhs += std::exp(log_lambda - psi.evaluate(g, j, ExtComplex(grid.node(i)))) * triple.m[i];

    num += std::abs(lhs - rhs);
    den += std::abs(rhs);
    ++used;
  }

  if (used == 0)
    throw NumericError(
        "jacobian_residual: no sampled pair passed the injectivity screen; the grid is too "
        "coarse near the critical points");
  if (!(den > 0.0)) throw NumericError("jacobian_residual: sampled mass is zero");
  return num / den;
}

double invariance_residual(const UlamOperator& op, const EigenTriple& triple, std::size_t quanta,
                           std::uint64_t seed) {
  const std::size_t n = op.grid.cell_count();
  const std::vector<double> mu = equilibrium_from(triple);

  // Transition decomposition of the operator: an entry (row i, col k,
  // symbol j, weight w) moves mass from cell k one skew step forward, to
  // cell i under generator j, with probability m_i w / (lambda m_k). The
  // probabilities of a cell sum to one minus the leak-induced deficit;
  // deficit mass is dropped, not redistributed.
  std::vector<std::vector<std::size_t>> by_col(n);
  for (std::size_t e = 0; e < op.entries.size(); ++e) by_col[op.entries[e].col].push_back(e);
  auto flow = [&](std::size_t e) {
    const auto& entry = op.entries[e];
    return triple.m[entry.row] * entry.weight /
           (triple.lambda * std::max(triple.m[entry.col], 1e-300));
  };

  std::vector<double> pushed(n, 0.0);
  if (quanta == 0) {
    // Exact expectation of the sampled pushforward.
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t e : by_col[k]) pushed[op.entries[e].row] += mu[k] * flow(e);
  } else {
    RngStream rng(seed);
    // Quantize mu into equal mass quanta (largest remainders first), then
    // move each quantum by one random skew step.
    std::vector<std::size_t> quota(n, 0);
    std::vector<std::pair<double, std::size_t>> remainder(n);
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double exact = mu[k] * static_cast<double>(quanta);
      quota[k] = static_cast<std::size_t>(exact);
      remainder[k] = {exact - static_cast<double>(quota[k]), k};
      assigned += quota[k];
    }
    std::sort(remainder.begin(), remainder.end(),
              [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    for (std::size_t r = 0; assigned < quanta && r < remainder.size(); ++r, ++assigned)
      quota[remainder[r].second] += 1;

    const double quantum = 1.0 / static_cast<double>(quanta);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t q = 0; q < quota[k]; ++q) {
        double pick = rng.uniform01();
        for (std::size_t e : by_col[k]) {
          pick -= flow(e);
          if (pick < 0.0) {
            pushed[op.entries[e].row] += quantum;
            break;
          }
        }
      }
    }
  }

  double tv = 0.0;
  for (std::size_t i = 0; i < n; ++i) tv += std::abs(mu[i] - pushed[i]);
  return tv;
}

}  // namespace semithermo

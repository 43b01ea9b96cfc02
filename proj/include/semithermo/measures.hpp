#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "semithermo/potential.hpp"
#include "semithermo/semigroup.hpp"

namespace semithermo {

// Hard bound on the fraction of preimage weight allowed to fall outside the
// retained cells before the discretization is rejected.
inline constexpr double kMaxLeakFraction = 0.2;

// Square-cell covering of a point cloud. Cells are half-open
// [x, x+delta) x [y, y+delta); only cells containing at least one cloud
// point are retained, indexed in row-major lattice order.
class Grid {
public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  double delta() const { return delta_; }
  std::size_t cell_count() const { return centers_.size(); }
  const std::vector<Complex>& centers() const { return centers_; }
  Complex center(std::size_t i) const { return centers_[i]; }

  // Collocation node of cell i: the cloud point in the cell closest to its
  // center. Nodes sit on the sampled invariant set, so their preimages do
  // too; collocating at bare cell centers instead leaks a grid-independent
  // few percent of the preimage weight off the retained cells and biases
  // the leading eigenvalue by the same amount.
  Complex node(std::size_t i) const { return nodes_[i]; }

  // Retained-cell index containing z, or npos when z lies outside every
  // retained cell (the point at infinity always does).
  std::size_t locate(const ExtComplex& z) const;

  friend Grid build_grid(const JuliaCloud& cloud, std::size_t target_cells);

private:
  double x0_ = 0.0, y0_ = 0.0, delta_ = 1.0;
  long nx_ = 0, ny_ = 0;
  std::vector<Complex> centers_;
  std::vector<Complex> nodes_;
  std::vector<std::pair<long, long>> coords_;
  std::unordered_map<long long, std::size_t> index_;
};

// Covering of the cloud by roughly target_cells square cells over its
// bounding box. All cloud points must be finite.
Grid build_grid(const JuliaCloud& cloud, std::size_t target_cells);

// Collocation discretization of the weighted preimage sum on the retained
// cells: entry (i, k, j, w) adds w = exp(psi_j(x)) for each preimage x of
// the node of cell i under generator j landing in cell k. Weight landing
// outside the retained cells is recorded as leak, never renormalized away.
struct UlamOperator {
  struct Entry {
    std::size_t row;  // target cell i (the point whose preimages were taken)
    std::size_t col;  // preimage cell k
    int symbol;       // generator j
    double weight;
  };
  Grid grid;
  std::vector<Entry> entries;
  std::vector<double> row_mass;  // retained weight per row
  std::vector<double> row_leak;  // escaped weight per row
  double leak_fraction = 0.0;
};

UlamOperator build_ulam(const GeneratorSet& g, const Potential& psi, const Grid& grid);

// Leading eigendata of the discretized operator: lambda with left vector m
// (sum 1) and right vector h (sum of h against m is 1).
struct EigenTriple {
  double lambda = 0.0;
  std::vector<double> h;  // right eigenvector
  std::vector<double> m;  // left eigenvector
  double residual_h = 0.0;  // |Mh - lambda h|_1 / (lambda |h|_1)
  double residual_m = 0.0;
  int iterations = 0;
};

// Power iteration on the operator and its transpose from a seeded positive
// start, run until both relative residuals fall below tol. The sparsity
// pattern must have a unique dominant strongly connected block; anything
// else is an error, as is hitting max_iters.
EigenTriple leading_triple(const UlamOperator& op, double tol = 1e-10, int max_iters = 100000,
                           std::uint64_t start_seed = 1);

// Cellwise product mu_i = h_i m_i, normalized to total mass one.
std::vector<double> equilibrium_from(const EigenTriple& triple);

// Conformality check: over sampled cell patches A and generators j with f_j
// injective near A, compare the measure of the forward image f_j(A) with
// sum over A of exp(log lambda - psi_j) m. Returns the relative L1 aggregate.
// Errors when no sampled pair passes the injectivity screen.
double jacobian_residual(const GeneratorSet& g, const Potential& psi, const UlamOperator& op,
                         const EigenTriple& triple, int sample_count, std::uint64_t seed);

// Forward-invariance check of the equilibrium weights: push each mass
// quantum one skew step forward, drawing the generator and the landing cell
// from the operator's transition decomposition (entry k -> i via symbol j
// with probability m_i w / (lambda m_k); the deficit left by leak drops the
// quantum), and measure the total variation against the original weights.
// quanta == 0 uses the exact expectation instead of sampling.
double invariance_residual(const UlamOperator& op, const EigenTriple& triple, std::size_t quanta,
                           std::uint64_t seed);

}  // namespace semithermo

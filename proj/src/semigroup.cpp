#include "semithermo/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "semithermo/errors.hpp"

namespace semithermo {

GeneratorSet::GeneratorSet(std::vector<RationalMap> generators) : gens_(std::move(generators)) {
  if (gens_.empty()) throw ConfigError("GeneratorSet: needs at least one generator");
  degree_sum_ = 0;
  for (std::size_t j = 0; j < gens_.size(); ++j) {
    if (gens_[j].degree() < 2) {
      std::ostringstream msg;
      msg << "GeneratorSet: generator " << (j + 1) << " has degree " << gens_[j].degree()
          << "; every generator must have degree >= 2";
      throw ConfigError(msg.str());
    }
    degree_sum_ += gens_[j].degree();
  }
}

std::string GeneratorSet::to_json_string() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const RationalMap& f : gens_) arr.push_back(nlohmann::json::parse(f.to_json_string()));
  nlohmann::json j;
  j["generators"] = arr;
  return j.dump();
}

GeneratorSet GeneratorSet::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("GeneratorSet: bad JSON: ") + e.what());
  }
  if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty())
    throw ConfigError("GeneratorSet: missing nonempty 'generators' array");
  std::vector<RationalMap> gens;
  for (const auto& item : j["generators"]) gens.push_back(RationalMap::from_json_string(item.dump()));
  return GeneratorSet(std::move(gens));
}

SkewPoint skew_step(const GeneratorSet& g, const SkewPoint& p) {
  if (p.next >= p.tail.size()) throw ConfigError("skew_step: symbol tail exhausted");
  const int j = p.tail[p.next];
  if (j < 1 || j > g.count()) throw ConfigError("skew_step: symbol out of range");
  SkewPoint q = p;
  q.next += 1;
  q.z = g.map(j).evaluate(p.z);
  return q;
}

ExtComplex word_apply(const GeneratorSet& g, const Word& w, const ExtComplex& z) {
  ExtComplex x = z;
  for (int j : w.symbols) {
    if (j < 1 || j > g.count()) throw ConfigError("word_apply: symbol out of range");
    x = g.map(j).evaluate(x);
  }
  return x;
}

double word_spherical_derivative(const GeneratorSet& g, const Word& w, const ExtComplex& z) {
  double acc = 1.0;
  ExtComplex x = z;
  for (int j : w.symbols) {
    if (j < 1 || j > g.count()) throw ConfigError("word_spherical_derivative: symbol out of range");
    acc *= g.map(j).spherical_derivative(x);
    x = g.map(j).evaluate(x);
  }
  return acc;
}

std::vector<ExtComplex> word_critical_values(const GeneratorSet& g, const Word& w) {
  std::vector<ExtComplex> cv;
  for (int j : w.symbols) {
    if (j < 1 || j > g.count()) throw ConfigError("word_critical_values: symbol out of range");
    const RationalMap& f = g.map(j);
    for (ExtComplex& v : cv) v = f.evaluate(v);
    for (const ExtComplex& v : f.critical_values()) cv.push_back(v);
    cv = cluster_points(std::move(cv), kRootClusterTol);
    std::vector<ExtComplex> dedup;
    for (const ExtComplex& v : cv)
      if (dedup.empty() || !(dedup.back() == v)) dedup.push_back(v);
    cv = std::move(dedup);
  }
  return cv;
}

JuliaCloud julia_backward_sample(const GeneratorSet& g, const ExtComplex& seed_point,
                                 std::size_t count, int burn_in, std::uint64_t seed) {
  RngStream rng(seed);
  JuliaCloud cloud;
  cloud.seed = seed;
  cloud.burn_in = burn_in;
  cloud.points.reserve(count);

  ExtComplex z = seed_point;
  int frozen_steps = 0;
  const std::size_t total = count + static_cast<std::size_t>(burn_in);
  for (std::size_t step = 0; step < total; ++step) {
    const int j = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(g.count()))) + 1;
    const std::vector<ExtComplex> pre = g.map(j).preimages(z);
    const ExtComplex next = pre[rng.uniform_index(pre.size())];
    if (chordal_distance(next, z) < 1e-12) {
      if (++frozen_steps >= 20)
        throw NumericError(
            "julia_backward_sample: backward orbit frozen for 20 steps; "
            "seed point appears to be exceptional for the semigroup");
    } else {
      frozen_steps = 0;
    }
    z = next;
    if (step >= static_cast<std::size_t>(burn_in)) cloud.points.push_back(z);
  }
  return cloud;
}

namespace {

// Uniform-cell index over the finite cloud points; queries return exact
// chordal nearest distances via expanding ring search with a chordal lower
// bound cut.
class SpatialIndex {
public:
  explicit SpatialIndex(const std::vector<ExtComplex>& pts) {
    for (const ExtComplex& p : pts)
      if (p.is_finite()) finite_.push_back(p.value());
    has_infinite_ = finite_.size() != pts.size();
    if (finite_.empty()) return;

    double x0 = finite_[0].real(), x1 = x0, y0 = finite_[0].imag(), y1 = y0;
    s_max_ = 1.0;
    for (const Complex& p : finite_) {
      x0 = std::min(x0, p.real());
      x1 = std::max(x1, p.real());
      y0 = std::min(y0, p.imag());
      y1 = std::max(y1, p.imag());
      s_max_ = std::max(s_max_, std::hypot(1.0, std::abs(p)));
    }
    const double span = std::max({x1 - x0, y1 - y0, 1e-12});
    n_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(finite_.size()))));
    cell_ = span / static_cast<double>(n_);
    ox_ = x0;
    oy_ = y0;
    buckets_.assign(n_ * n_, {});
    for (std::size_t i = 0; i < finite_.size(); ++i) buckets_[bucket_of(finite_[i])].push_back(i);
  }

  // Smallest chordal distance from q to an indexed point, skipping the point
  // with index skip (pass npos to consider all).
  double nearest(const ExtComplex& q, std::size_t skip) const {
    double best = q.is_infinity() ? (has_infinite_ ? 0.0 : 4.0) : 4.0;
    if (finite_.empty() || best == 0.0) return best;
    const Complex qv = q.is_infinity() ? Complex(0.0, 0.0) : q.value();
    const double sq = q.is_infinity() ? 1.0 : std::hypot(1.0, std::abs(qv));

    if (q.is_infinity()) {
      for (const Complex& p : finite_) best = std::min(best, chordal_distance(ExtComplex::infinity(), ExtComplex(p)));
      return best;
    }

    const long cx = cell_x(qv.real());
    const long cy = cell_y(qv.imag());
    for (long ring = 0; ring < static_cast<long>(n_) + 2; ++ring) {
      // Any point outside this ring is at least ring-1 cells away.
      if (ring > 1) {
        const double lb = 2.0 * (static_cast<double>(ring - 1) * cell_) / (sq * s_max_);
        if (lb > best) break;
      }
      for (long dx = -ring; dx <= ring; ++dx) {
        for (long dy = -ring; dy <= ring; ++dy) {
          if (std::max(std::labs(dx), std::labs(dy)) != ring) continue;
          const long bx = cx + dx, by = cy + dy;
          if (bx < 0 || by < 0 || bx >= static_cast<long>(n_) || by >= static_cast<long>(n_)) continue;
          for (std::size_t i : buckets_[static_cast<std::size_t>(by) * n_ + static_cast<std::size_t>(bx)]) {
            if (i == skip) continue;
            best = std::min(best, chordal_distance(qv, finite_[i]));
          }
        }
      }
    }
    if (has_infinite_) best = std::min(best, chordal_distance(q, ExtComplex::infinity()));
    return best;
  }

  std::size_t finite_count() const { return finite_.size(); }
  const Complex& finite_point(std::size_t i) const { return finite_[i]; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  std::size_t bucket_of(const Complex& p) const {
    return static_cast<std::size_t>(cell_y(p.imag())) * n_ + static_cast<std::size_t>(cell_x(p.real()));
  }
  long cell_x(double x) const {
    return std::clamp<long>(static_cast<long>((x - ox_) / cell_), 0, static_cast<long>(n_) - 1);
  }
  long cell_y(double y) const {
    return std::clamp<long>(static_cast<long>((y - oy_) / cell_), 0, static_cast<long>(n_) - 1);
  }

  std::vector<Complex> finite_;
  std::vector<std::vector<std::size_t>> buckets_;
  std::size_t n_ = 1;
  double cell_ = 1.0, ox_ = 0.0, oy_ = 0.0, s_max_ = 1.0;
  bool has_infinite_ = false;
};

}  // namespace

double nearest_neighbor_spacing(const JuliaCloud& cloud) {
  if (cloud.points.size() < 2) throw ConfigError("nearest_neighbor_spacing: need at least two points");
  const SpatialIndex index(cloud.points);
  std::vector<double> d;
  d.reserve(index.finite_count());
  for (std::size_t i = 0; i < index.finite_count(); ++i)
    d.push_back(index.nearest(ExtComplex(index.finite_point(i)), i));
  if (d.empty()) return 0.0;
  std::sort(d.begin(), d.end());
  return d[d.size() / 2];
}

double distance_to_cloud(const JuliaCloud& cloud, const ExtComplex& z) {
  if (cloud.points.empty()) throw ConfigError("distance_to_cloud: empty cloud");
  const SpatialIndex index(cloud.points);
  return index.nearest(z, SpatialIndex::npos);
}

double cloud_hausdorff(const JuliaCloud& a, const JuliaCloud& b) {
  if (a.points.empty() || b.points.empty()) throw ConfigError("cloud_hausdorff: empty cloud");
  const SpatialIndex index(b.points);
  double worst = 0.0;
  for (const ExtComplex& p : a.points) worst = std::max(worst, index.nearest(p, SpatialIndex::npos));
  return worst;
}

ConditionReport check_conditions(const GeneratorSet& g, const JuliaCloud& cloud,
                                 int orbit_length, double delta) {
  ConditionReport report;
  report.degree_condition = Verdict::kHolds;
  report.delta = delta > 0.0 ? delta : 3.0 * nearest_neighbor_spacing(cloud);

  const SpatialIndex index(cloud.points);
  auto dist = [&](const ExtComplex& z) { return index.nearest(z, SpatialIndex::npos); };

  // Critical values staying clear of the sampled set. Only finite critical
  // values are measured; the clouds handled here are finite.
  double min_cv = 4.0;
  std::ostringstream cv_witness;
  for (int j = 1; j <= g.count(); ++j) {
    for (const ExtComplex& v : g.map(j).critical_values()) {
      if (v.is_infinity()) continue;
      const double d = dist(v);
      if (d < min_cv) {
        min_cv = d;
        cv_witness.str("");
        cv_witness << "generator " << j << " critical value (" << v.value().real() << ", "
                   << v.value().imag() << ") at cloud distance " << d;
      }
    }
  }
  report.min_cv_distance = min_cv;
  report.critical_values_clear = (min_cv > report.delta) ? Verdict::kHolds : Verdict::kInconclusive;
  if (report.critical_values_clear == Verdict::kInconclusive) report.witness = cv_witness.str();

  // Superattracting-cycle screen: a critical point near the sampled set whose
  // orbit under some short word returns to it while staying near the set.
  report.no_superattracting_cycles = Verdict::kHolds;
  RngStream rng(cloud.seed ^ 0x5eedc0deull);
  for (int j = 1; j <= g.count() && report.no_superattracting_cycles == Verdict::kHolds; ++j) {
    for (const ExtComplex& c : g.map(j).critical_points()) {
      if (c.is_infinity() || dist(c) > report.delta) continue;
      // Enumerate words up to the length cap, or sample when too many.
      for (int len = 1; len <= orbit_length; ++len) {
        double total_words = std::pow(static_cast<double>(g.count()), len);
        const bool enumerate = total_words <= 256.0;
        const std::size_t n_words = enumerate ? static_cast<std::size_t>(total_words) : 256;
        for (std::size_t wi = 0; wi < n_words; ++wi) {
          Word w;
          if (enumerate) {
            std::size_t code = wi;
            for (int k = 0; k < len; ++k) {
              w.symbols.push_back(static_cast<int>(code % static_cast<std::size_t>(g.count())) + 1);
              code /= static_cast<std::size_t>(g.count());
            }
          } else {
            for (int k = 0; k < len; ++k)
              w.symbols.push_back(static_cast<int>(rng.uniform_index(static_cast<std::size_t>(g.count()))) + 1);
          }
          ExtComplex z = c;
          bool stayed_near = true;
          for (int k = 0; k < len && stayed_near; ++k) {
            z = g.map(w.symbols[static_cast<std::size_t>(k)]).evaluate(z);
            if (dist(z) > report.delta) stayed_near = false;
          }
          if (stayed_near && chordal_distance(z, c) < report.delta) {
            report.no_superattracting_cycles = Verdict::kInconclusive;
            std::ostringstream msg;
            msg << "critical point of generator " << j
                << " approximately returns to itself under a word of length " << len;
            report.witness = report.witness.empty() ? msg.str() : report.witness + "; " + msg.str();
            break;
          }
        }
        if (report.no_superattracting_cycles == Verdict::kInconclusive) break;
      }
      if (report.no_superattracting_cycles == Verdict::kInconclusive) break;
    }
  }
  return report;
}

}  // namespace semithermo

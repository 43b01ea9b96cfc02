#include "semithermo/rational.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "semithermo/errors.hpp"

namespace semithermo {

namespace {

// P'Q - PQ'. When deg P == deg Q the top convolution coefficient cancels
// exactly in exact arithmetic; force the cancellation so rounding dust cannot
// raise the degree.
Polynomial wronskian_of(const Polynomial& p, const Polynomial& q) {
  Polynomial w = p.derivative() * q - p * q.derivative();
  if (p.degree() == q.degree() && w.degree() == p.degree() + q.degree() - 1) {
    std::vector<Complex> c = w.coeffs();
    c.back() = Complex(0.0, 0.0);
    w = Polynomial(std::move(c));
  }
  return w;
}

}  // namespace

RationalMap::RationalMap(Polynomial num, Polynomial den) : p_(std::move(num)), q_(std::move(den)) {
  if (q_.is_zero()) throw ConfigError("RationalMap: denominator is the zero polynomial");
  if (p_.is_zero() && q_.degree() < 1)
    throw ConfigError("RationalMap: map is constant");
  e_ = std::max(p_.degree(), q_.degree());
  if (e_ < 1) throw ConfigError("RationalMap: degree must be at least 1");

  const double res = resultant_magnitude(p_, q_);
  const double scale = std::pow(std::max(p_.max_abs_coeff(), 1e-300), q_.degree()) *
                       std::pow(std::max(q_.max_abs_coeff(), 1e-300), p_.degree());
  if (p_.degree() >= 1 && q_.degree() >= 1 && res <= 1e-10 * scale)
    throw ConfigError("RationalMap: numerator and denominator share a root");

  rp_ = p_.reversed(e_);
  rq_ = q_.reversed(e_);
  dp_ = p_.derivative();
  dq_ = q_.derivative();
  w_ = wronskian_of(p_, q_);
  rw_ = wronskian_of(rp_, rq_);
  if (w_.is_zero()) throw ConfigError("RationalMap: derivative vanishes identically");

  const int target = 2 * e_ - 2;
  if (w_.degree() >= 1) {
    for (const Complex& root : find_roots(w_)) {
      if (std::abs(root) > kInfinityThreshold)
        crit_pts_.push_back(ExtComplex::infinity());
      else
        crit_pts_.push_back(ExtComplex(root));
    }
  }
  while (crit_pts_.size() < static_cast<std::size_t>(target)) crit_pts_.push_back(ExtComplex::infinity());
  if (crit_pts_.size() != static_cast<std::size_t>(target))
    throw NumericError("RationalMap: wronskian degree exceeds 2e-2");
  crit_pts_ = cluster_points(std::move(crit_pts_), kRootClusterTol);

  std::vector<ExtComplex> vals;
  for (const ExtComplex& c : crit_pts_) vals.push_back(evaluate(c));
  vals = cluster_points(std::move(vals), kRootClusterTol);
  for (const ExtComplex& v : vals)
    if (crit_vals_.empty() || !(crit_vals_.back() == v)) crit_vals_.push_back(v);
}

ExtComplex RationalMap::evaluate(const ExtComplex& z) const {
  // Evaluate in the chart that keeps the argument inside the unit disk.
  Complex w;
  const Polynomial *np, *dp;
  if (z.is_finite() && std::abs(z.value()) <= 1.0) {
    w = z.value();
    np = &p_;
    dp = &q_;
  } else {
    w = z.is_infinity() ? Complex(0.0, 0.0) : 1.0 / z.value();
    np = &rp_;
    dp = &rq_;
  }
  const Complex n = np->evaluate(w);
  const Complex d = dp->evaluate(w);
  if (d == Complex(0.0, 0.0)) {
    if (n == Complex(0.0, 0.0)) {
      // Reversed pair can share the factor w; strip by one derivative step.
      const Complex n1 = np->derivative().evaluate(w);
      const Complex d1 = dp->derivative().evaluate(w);
      if (d1 == Complex(0.0, 0.0)) return ExtComplex::infinity();
      return ExtComplex(n1 / d1);
    }
    return ExtComplex::infinity();
  }
  return ExtComplex(n / d);
}

double RationalMap::spherical_derivative(const ExtComplex& z) const {
  Complex w;
  const Polynomial *np, *dp, *wp;
  if (z.is_finite() && std::abs(z.value()) <= 1.0) {
    w = z.value();
    np = &p_;
    dp = &q_;
    wp = &w_;
  } else {
    w = z.is_infinity() ? Complex(0.0, 0.0) : 1.0 / z.value();
    np = &rp_;
    dp = &rq_;
    wp = &rw_;
  }
  const double nn = std::norm(np->evaluate(w));
  const double dd = std::norm(dp->evaluate(w));
  if (nn + dd == 0.0) {
    // Common factor w^k of the reversed pair; differentiate it away.
    const Polynomial np1 = np->derivative(), dp1 = dp->derivative();
    const double n1 = std::norm(np1.evaluate(w)), d1 = std::norm(dp1.evaluate(w));
    const double w1 = std::abs(wronskian_of(np1, dp1).evaluate(w));
    return w1 * (1.0 + std::norm(w)) / (n1 + d1);
  }
  return std::abs(wp->evaluate(w)) * (1.0 + std::norm(w)) / (nn + dd);
}

Complex RationalMap::derivative_value(Complex z) const {
  const Complex d = q_.evaluate(z);
  return w_.evaluate(z) / (d * d);
}

std::vector<ExtComplex> cluster_points(std::vector<ExtComplex> pts, double tol) {
  // Greedy chordal clustering; representative is the running centroid of the
  // finite members, or infinity when the cluster sits at infinity.
  std::vector<ExtComplex> reps;
  std::vector<int> counts;
  std::vector<Complex> sums;
  std::vector<std::size_t> order;  // cluster index per input point
  for (const ExtComplex& pt : pts) {
    const ExtComplex q = effectively_infinite(pt) ? ExtComplex::infinity() : pt;
    bool placed = false;
    for (std::size_t k = 0; k < reps.size() && !placed; ++k) {
      if (chordal_distance(q, reps[k]) < tol) {
        counts[k] += 1;
        if (q.is_finite()) {
          sums[k] += q.value();
          if (reps[k].is_finite())
            reps[k] = ExtComplex(sums[k] / static_cast<double>(counts[k]));
        }
        order.push_back(k);
        placed = true;
      }
    }
    if (!placed) {
      reps.push_back(q);
      counts.push_back(1);
      sums.push_back(q.is_finite() ? q.value() : Complex(0.0, 0.0));
      order.push_back(reps.size() - 1);
    }
  }
  std::vector<ExtComplex> out;
  out.reserve(pts.size());
  for (std::size_t k = 0; k < reps.size(); ++k)
    for (int c = 0; c < counts[k]; ++c) out.push_back(reps[k]);
  return out;
}

std::vector<ExtComplex> RationalMap::preimages(const ExtComplex& z) const {
  std::vector<ExtComplex> raw;
  raw.reserve(static_cast<std::size_t>(e_));

  Polynomial r;
  if (effectively_infinite(z)) {
    r = q_;  // poles, plus infinity itself when deg P > deg Q
  } else {
    r = p_ - (z.value() * q_);
    // A genuinely cancelled leading term drops the degree; the lost roots
    // sit at infinity.
    r = r.trimmed(1e-12);
  }

  if (r.degree() >= 1) {
    for (const Complex& root : find_roots(r)) {
      if (std::abs(root) > kInfinityThreshold)
        raw.push_back(ExtComplex::infinity());
      else
        raw.push_back(ExtComplex(root));
    }
  }
  while (raw.size() < static_cast<std::size_t>(e_)) raw.push_back(ExtComplex::infinity());

  // One Newton polish in the conditioned chart, then cluster.
  for (ExtComplex& x : raw) {
    if (x.is_infinity() || effectively_infinite(z)) continue;
    const Complex w = x.value();
    const Complex num = p_.evaluate(w) - z.value() * q_.evaluate(w);
    const Complex den = dp_.evaluate(w) - z.value() * dq_.evaluate(w);
    if (den != Complex(0.0, 0.0)) {
      const Complex step = num / den;
      if (std::abs(step) < 1.0) x = ExtComplex(w - step);
    }
  }
  return cluster_points(std::move(raw), kRootClusterTol);
}

std::vector<ExtComplex> RationalMap::critical_points() const { return crit_pts_; }

std::vector<ExtComplex> RationalMap::critical_values() const { return crit_vals_; }

RationalMap compose(const RationalMap& outer, const RationalMap& inner) {
  const Polynomial& p1 = inner.num();
  const Polynomial& q1 = inner.den();
  const int e2 = outer.degree();

  // Powers of the inner pair up to e2.
  std::vector<Polynomial> pp(static_cast<std::size_t>(e2) + 1), qp(static_cast<std::size_t>(e2) + 1);
  pp[0] = Polynomial({Complex(1.0, 0.0)});
  qp[0] = Polynomial({Complex(1.0, 0.0)});
  for (int k = 1; k <= e2; ++k) {
    pp[static_cast<std::size_t>(k)] = pp[static_cast<std::size_t>(k - 1)] * p1;
    qp[static_cast<std::size_t>(k)] = qp[static_cast<std::size_t>(k - 1)] * q1;
  }

  Polynomial num, den;
  for (int k = 0; k <= e2; ++k) {
    const Polynomial term = pp[static_cast<std::size_t>(k)] * qp[static_cast<std::size_t>(e2 - k)];
    num = num + outer.num().coeff(k) * term;
    den = den + outer.den().coeff(k) * term;
  }
  return RationalMap(std::move(num), std::move(den));
}

std::string RationalMap::to_json_string() const {
  nlohmann::json j;
  auto dump = [](const Polynomial& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Complex& c : p.coeffs()) arr.push_back({c.real(), c.imag()});
    return arr;
  };
  j["num"] = dump(p_);
  j["den"] = dump(q_);
  return j.dump();
}

RationalMap RationalMap::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("RationalMap: bad JSON: ") + e.what());
  }
  auto parse = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_array())
      throw ConfigError(std::string("RationalMap: missing coefficient array '") + key + "'");
    std::vector<Complex> c;
    for (const auto& item : j[key]) {
      if (!item.is_array() || item.size() != 2)
        throw ConfigError(std::string("RationalMap: entry of '") + key + "' is not [re, im]");
      c.emplace_back(item[0].get<double>(), item[1].get<double>());
    }
    return Polynomial(std::move(c));
  };
  return RationalMap(parse("num"), parse("den"));
}

}  // namespace semithermo

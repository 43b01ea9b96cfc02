#include "semithermo/potential.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "semithermo/errors.hpp"

namespace semithermo {

Potential Potential::constant(double value, int generator_count) {
  return constant_per_generator(std::vector<double>(static_cast<std::size_t>(generator_count), value));
}

Potential Potential::constant_per_generator(std::vector<double> values) {
  if (values.empty()) throw ConfigError("Potential: need at least one generator value");
  Potential p;
  p.kind_ = Kind::kConstant;
  p.count_ = static_cast<int>(values.size());
  p.values_ = std::move(values);
  return p;
}

Potential Potential::geometric(double t, int generator_count) {
  if (generator_count < 1) throw ConfigError("Potential: need at least one generator");
  Potential p;
  p.kind_ = Kind::kGeometric;
  p.count_ = generator_count;
  p.t_ = t;
  return p;
}

Potential Potential::grid(GridTable table) {
  if (table.values.empty()) throw ConfigError("Potential: grid table needs generator entries");
  if (table.nx < 2 || table.ny < 2) throw ConfigError("Potential: grid needs at least 2x2 nodes");
  if (!(table.x1 > table.x0) || !(table.y1 > table.y0))
    throw ConfigError("Potential: grid box is degenerate");
  for (const auto& v : table.values)
    if (v.size() != table.nx * table.ny)
      throw ConfigError("Potential: grid value count does not match nx*ny");
  Potential p;
  p.kind_ = Kind::kGrid;
  p.count_ = static_cast<int>(table.values.size());
  p.table_ = std::move(table);
  return p;
}

double Potential::evaluate(const GeneratorSet& g, int j, const ExtComplex& z) const {
  if (j < 1 || j > count_) throw ConfigError("Potential: generator index out of range");
  switch (kind_) {
    case Kind::kConstant:
      return values_[static_cast<std::size_t>(j - 1)] + shift_;
    case Kind::kGeometric: {
      const double d = std::max(g.map(j).spherical_derivative(z), kDerivClip);
      return -t_ * std::log(d) + shift_;
    }
    case Kind::kGrid: {
      // Clamp to the table box; the point at infinity clamps like a far
      // finite point.
      double x = z.is_finite() ? z.value().real() : table_.x1;
      double y = z.is_finite() ? z.value().imag() : table_.y1;
      x = std::clamp(x, table_.x0, table_.x1);
      y = std::clamp(y, table_.y0, table_.y1);
      const double fx = (x - table_.x0) / (table_.x1 - table_.x0) * static_cast<double>(table_.nx - 1);
      const double fy = (y - table_.y0) / (table_.y1 - table_.y0) * static_cast<double>(table_.ny - 1);
      const std::size_t ix = std::min(static_cast<std::size_t>(fx), table_.nx - 2);
      const std::size_t iy = std::min(static_cast<std::size_t>(fy), table_.ny - 2);
      const double ux = fx - static_cast<double>(ix);
      const double uy = fy - static_cast<double>(iy);
      const std::vector<double>& v = table_.values[static_cast<std::size_t>(j - 1)];
      auto node = [&](std::size_t a, std::size_t b) { return v[b * table_.nx + a]; };
      const double val = (1 - ux) * (1 - uy) * node(ix, iy) + ux * (1 - uy) * node(ix + 1, iy) +
                         (1 - ux) * uy * node(ix, iy + 1) + ux * uy * node(ix + 1, iy + 1);
      return val + shift_;
    }
  }
  throw ConfigError("Potential: unknown kind");
}

Potential Potential::shifted(double c) const {
  Potential p = *this;
  if (p.kind_ == Kind::kConstant) {
    for (double& v : p.values_) v += c;
  } else {
    p.shift_ += c;
  }
  return p;
}

std::string Potential::to_json_string() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::kConstant:
      j["kind"] = "constant";
      j["params"]["values"] = values_;
      break;
    case Kind::kGeometric:
      j["kind"] = "geometric";
      j["params"]["t"] = t_;
      break;
    case Kind::kGrid:
      j["kind"] = "grid";
      j["params"]["x0"] = table_.x0;
      j["params"]["x1"] = table_.x1;
      j["params"]["y0"] = table_.y0;
      j["params"]["y1"] = table_.y1;
      j["params"]["nx"] = table_.nx;
      j["params"]["ny"] = table_.ny;
      j["params"]["values"] = table_.values;
      break;
  }
  if (shift_ != 0.0) j["params"]["shift"] = shift_;
  return j.dump();
}

Potential Potential::from_json_string(const std::string& text, int generator_count) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("Potential: bad JSON: ") + e.what());
  }
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("Potential: missing 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  Potential p;
  if (kind == "constant") {
    if (params.contains("values")) {
      auto values = params["values"].get<std::vector<double>>();
      if (static_cast<int>(values.size()) != generator_count)
        throw ConfigError("Potential: 'values' length must equal the generator count");
      p = constant_per_generator(std::move(values));
    } else {
      p = constant(params.value("value", 0.0), generator_count);
    }
  } else if (kind == "geometric") {
    if (!params.contains("t")) throw ConfigError("Potential: geometric kind needs params.t");
    p = geometric(params["t"].get<double>(), generator_count);
  } else if (kind == "grid") {
    GridTable t;
    try {
      t.x0 = params.at("x0").get<double>();
      t.x1 = params.at("x1").get<double>();
      t.y0 = params.at("y0").get<double>();
      t.y1 = params.at("y1").get<double>();
      t.nx = params.at("nx").get<std::size_t>();
      t.ny = params.at("ny").get<std::size_t>();
      t.values = params.at("values").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("Potential: bad grid params: ") + e.what());
    }
    if (static_cast<int>(t.values.size()) == 1 && generator_count > 1) {
      // A single table is shared across generators.
      t.values.resize(static_cast<std::size_t>(generator_count), t.values[0]);
    }
    if (static_cast<int>(t.values.size()) != generator_count)
      throw ConfigError("Potential: grid 'values' must have one table per generator");
    p = grid(std::move(t));
  } else {
    throw ConfigError("Potential: unknown kind '" + kind + "'");
  }
  if (params.contains("shift")) p = p.shifted(params["shift"].get<double>());
  return p;
}

SupInf sup_inf_estimate(const Potential& psi, const GeneratorSet& g, const JuliaCloud& cloud) {
  if (cloud.points.empty()) throw ConfigError("sup_inf_estimate: empty cloud");
  SupInf r;
  bool first = true;
  for (const ExtComplex& z : cloud.points) {
    for (int j = 1; j <= g.count(); ++j) {
      const double v = psi.evaluate(g, j, z);
      if (first) {
        r.sup = r.inf = v;
        first = false;
      } else {
        r.sup = std::max(r.sup, v);
        r.inf = std::min(r.inf, v);
      }
    }
  }
  return r;
}

GapReport gap_check(const Potential& psi, const GeneratorSet& g, double pressure_estimate,
                    const JuliaCloud& cloud) {
  const SupInf si = sup_inf_estimate(psi, g, cloud);
  GapReport r;
  r.pressure = pressure_estimate;
  r.sup = si.sup;
  r.inf = si.inf;
  r.log_generator_count = std::log(static_cast<double>(g.count()));
  r.log_degree_sum = std::log(static_cast<double>(g.degree_sum()));
  r.gap = pressure_estimate - si.sup - r.log_generator_count;
  r.slack = (r.log_degree_sum - r.log_generator_count) - (si.sup - si.inf);
  return r;
}

double birkhoff_sum(const GeneratorSet& g, const Potential& psi, const Word& prefix,
                    const ExtComplex& z, int n) {
  if (n < 0 || n > static_cast<int>(prefix.symbols.size()))
    throw ConfigError("birkhoff_sum: n exceeds prefix length");
  double acc = 0.0;
  ExtComplex x = z;
  for (int k = 0; k < n; ++k) {
    const int j = prefix.symbols[static_cast<std::size_t>(k)];
    acc += psi.evaluate(g, j, x);
    x = g.map(j).evaluate(x);
  }
  return acc;
}

}  // namespace semithermo

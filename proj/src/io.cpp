#include "semithermo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "semithermo/errors.hpp"

namespace semithermo {

std::string version_string() { return SEMITHERMO_VERSION; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string output_header(const std::string& command, std::uint64_t seed) {
  std::ostringstream os;
  os << "# semithermo " << version_string() << " command=" << command << " seed=" << seed << "\n";
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

void write_cloud_ppm(const std::string& path, const JuliaCloud& cloud, int size, double cx,
                     double cy, double hw) {
  if (size < 1) throw ConfigError("image size must be positive");
  if (!(hw > 0.0)) throw ConfigError("viewport half-width must be positive");
  std::vector<unsigned char> pixels(static_cast<std::size_t>(size) * size * 3, 255);
  const double lo_x = cx - hw;
  const double hi_y = cy + hw;
  const double scale = size / (2.0 * hw);
  for (const ExtComplex& p : cloud.points) {
    if (p.is_infinity()) continue;
    const int px = static_cast<int>((p.value().real() - lo_x) * scale);
    const int py = static_cast<int>((hi_y - p.value().imag()) * scale);
    if (px < 0 || px >= size || py < 0 || py >= size) continue;
    const std::size_t at = 3 * (static_cast<std::size_t>(py) * size + px);
    pixels[at] = pixels[at + 1] = pixels[at + 2] = 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << "P6\n" << size << " " << size << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace semithermo

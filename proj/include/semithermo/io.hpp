#pragma once

#include <cstdint>
#include <string>

#include "semithermo/semigroup.hpp"

namespace semithermo {

std::string version_string();

// 17 significant digits, C locale: doubles round-trip exactly.
std::string format_double(double v);

// RFC 4180 quoting, applied only when the field needs it.
std::string csv_quote(const std::string& field);

// First line of every output file: tool version, command, seed.
std::string output_header(const std::string& command, std::uint64_t seed);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// P6 raster of the finite cloud points: black dots on a white square
// viewport centered at (cx, cy) with half-width hw, y increasing upward.
void write_cloud_ppm(const std::string& path, const JuliaCloud& cloud, int size, double cx,
                     double cy, double hw);

}  // namespace semithermo

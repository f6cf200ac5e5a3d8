#pragma once

#include "prd/core.hpp"

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace prd {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

// Min-max scaling of a field to 8-bit gray; a constant field maps to 128.
std::vector<std::uint8_t> to_gray8(const Mat& field);

void write_pgm(const std::vector<std::uint8_t>& pixels, int height, int width,
               const std::string& path);

std::string sha256_file(const std::string& path);

}  // namespace prd

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cpf {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Locale-independent formatting, 17 significant digits, '.' separator.
// All numeric columns written by the artifact go through this.
std::string format_g17(double v);

// Two-column CSV (t,value). Header row optional, LF or CRLF endings.
// Throws ConfigError with a line number on malformed input.
std::vector<std::pair<double, double>> read_csv_pairs(const std::string& path);

// Writes rows of already-formatted cells with LF endings.
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

std::string read_file(const std::string& path);

} // namespace cpf

#include "cpf/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cpf {

std::string format_g17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

bool parse_double(std::string field, double& out) {
  // trim spaces and a trailing CR
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r' ||
                            field.back() == '\t'))
    field.pop_back();
  std::size_t b = 0;
  while (b < field.size() && (field[b] == ' ' || field[b] == '\t')) ++b;
  field = field.substr(b);
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = first + field.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

} // namespace

std::vector<std::pair<double, double>> read_csv_pairs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open CSV file: " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected two comma-separated columns");
    double t = 0, y = 0;
    const bool ok = parse_double(line.substr(0, comma), t) &&
                    parse_double(line.substr(comma + 1), y);
    if (!ok) {
      if (lineno == 1 && rows.empty()) continue; // header row
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": malformed numeric row");
    }
    rows.emplace_back(t, y);
  }
  if (rows.empty())
    throw ConfigError(path + ": no numeric rows");
  return rows;
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  for (std::size_t c = 0; c < header.size(); ++c)
    out << header[c] << (c + 1 < header.size() ? "," : "\n");
  if (columns.empty()) return;
  const std::size_t nrows = columns.front().size();
  for (std::size_t r = 0; r < nrows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << format_g17(columns[c][r]) << (c + 1 < columns.size() ? "," : "\n");
  }
}

} // namespace cpf

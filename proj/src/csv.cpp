#include "tdr/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tdr/grid.hpp"

namespace tdr {

std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_grid_csv(const std::string& path, const Eigen::VectorXd& field,
                    const Grid2D& grid) {
  if (field.size() != grid.omega_node_count())
    throw std::invalid_argument("field size does not match the Omega block");
  std::ostringstream os;
  os << "i,j,x,y,value\n";
  for (int j = grid.omega_lo(); j <= grid.omega_hi(); ++j)
    for (int i = grid.omega_lo(); i <= grid.omega_hi(); ++i)
      os << i << ',' << j << ',' << format_full(grid.x(i)) << ','
         << format_full(grid.y(j)) << ','
         << format_full(field(grid.omega_index(i, j))) << '\n';
  write_text_file(path, os.str());
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  os << header << '\n';
  for (const auto& row : rows) {
    for (size_t k = 0; k < row.size(); ++k) {
      if (k) os << ',';
      os << format_full(row[k]);
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path,
                                               int skip_lines) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    if (lineno++ < skip_lines) continue;
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      double v = 0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw std::runtime_error("bad number in '" + path + "'");
      row.push_back(v);
      p = next;
      if (p < end && *p == ',') ++p;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tdr

#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace tdr {

/// Format a double with 17 significant digits (round-trips exactly).
std::string format_full(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Grid CSV: header "i,j,x,y,value", one row per Omega-block node.
void write_grid_csv(const std::string& path, const Eigen::VectorXd& field,
                    const class Grid2D& grid);

/// Generic rows-of-doubles CSV with a header line.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

std::vector<std::vector<double>> read_csv_rows(const std::string& path,
                                               int skip_lines);

}  // namespace tdr

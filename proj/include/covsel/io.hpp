#pragma once

#include <string>
#include <vector>

#include "covsel/matrix.hpp"

namespace covsel {

/// Shortest decimal that round-trips a double (printed with 17 significant
/// digits, "%.17g").
std::string format_double(double x);

/// Dense numeric CSV without header: one row per line.
void write_matrix_csv(const std::string& path, const Mat& m);
Mat read_matrix_csv(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::vector<double> parse_csv_row(const std::string& line);

}  // namespace covsel

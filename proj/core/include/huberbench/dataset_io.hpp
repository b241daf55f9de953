#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "huberbench/data.hpp"

namespace huberbench {

/// Shortest-safe round-trip formatting: 17 significant digits ("%.17g").
std::string format_double(double value);

/// Strict double parse; throws std::invalid_argument naming `context`.
double parse_double(std::string_view text, std::string_view context);

std::vector<std::string> split_csv_line(std::string_view line);

/// Dataset CSV schema: header `x_1,...,x_p,y,is_outlier`, one row per
/// observation, is_outlier in {0,1}. Floats are written with 17 significant
/// digits so a load reproduces the matrices bit-exactly.
void write_dataset_csv(std::ostream& out, const ContaminatedDataset& data);
void write_dataset_csv(const std::filesystem::path& path, const ContaminatedDataset& data);

/// Reads the schema above. The is_outlier column is optional; without it the
/// partition is unknown and every index is reported as informative.
/// Malformed rows are reported with their 1-based line number.
ContaminatedDataset load_dataset_csv(std::istream& in);
ContaminatedDataset load_dataset_csv(const std::filesystem::path& path);

}  // namespace huberbench

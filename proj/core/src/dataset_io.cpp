#include "huberbench/dataset_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace huberbench {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(std::string_view text, std::string_view context) {
  const std::string s(text);
  if (s.empty()) throw std::invalid_argument(std::string(context) + ": empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw std::invalid_argument(std::string(context) + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void write_dataset_csv(std::ostream& out, const ContaminatedDataset& data) {
  const int p = data.dim();
  for (int j = 0; j < p; ++j) out << "x_" << (j + 1) << ',';
  out << "y,is_outlier\n";
  std::vector<char> is_outlier(data.n(), 0);
  for (int i : data.outlier_idx) is_outlier[i] = 1;
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < p; ++j) out << format_double(data.design(i, j)) << ',';
    out << format_double(data.labels[i]) << ',' << int(is_outlier[i]) << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const ContaminatedDataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_dataset_csv(out, data);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

ContaminatedDataset load_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset CSV is empty (missing header)");
  const auto header = split_csv_line(line);
  const bool has_flag = header.size() >= 2 && header.back() == "is_outlier";
  const std::size_t label_col = header.size() - (has_flag ? 2 : 1);
  if (header[label_col] != "y") {
    throw std::invalid_argument("dataset CSV line 1: header must be x_1..x_p,y[,is_outlier]");
  }
  const int p = static_cast<int>(label_col);
  for (int j = 0; j < p; ++j) {
    if (header[j] != "x_" + std::to_string(j + 1)) {
      throw std::invalid_argument("dataset CSV line 1: expected column 'x_" + std::to_string(j + 1) +
                                  "', found '" + header[j] + "'");
    }
  }

  std::vector<double> values;
  std::vector<double> labels;
  std::vector<int> outliers;
  int line_no = 1;
  int row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    const std::string where = "dataset CSV line " + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw std::invalid_argument(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                                  std::to_string(fields.size()));
    }
    for (int j = 0; j < p; ++j) values.push_back(parse_double(fields[j], where));
    labels.push_back(parse_double(fields[label_col], where));
    if (has_flag) {
      const std::string& flag = fields.back();
      if (flag == "1") {
        outliers.push_back(row);
      } else if (flag != "0") {
        throw std::invalid_argument(where + ": is_outlier must be 0 or 1, found '" + flag + "'");
      }
    }
    ++row;
  }

  ContaminatedDataset data;
  data.design.resize(row, p);
  for (int i = 0; i < row; ++i)
    for (int j = 0; j < p; ++j) data.design(i, j) = values[static_cast<std::size_t>(i) * p + j];
  data.labels = Eigen::Map<const VectorXd>(labels.data(), row);
  data.partition_known = has_flag;
  data.outlier_idx = outliers;
  std::size_t k = 0;
  for (int i = 0; i < row; ++i) {
    if (k < outliers.size() && outliers[k] == i) {
      ++k;
    } else {
      data.informative_idx.push_back(i);
    }
  }
  return data;
}

ContaminatedDataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path.string() + "'");
  try {
    return load_dataset_csv(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace huberbench

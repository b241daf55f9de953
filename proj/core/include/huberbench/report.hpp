#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "huberbench/experiments.hpp"

namespace huberbench {

/// Per-trial CSV. Columns, in order:
///   noise,fraction,trial,l2_error,l1_error,weighted_error,iterations,converged
/// Floats use 17 significant digits; converged is 0 or 1.
std::string trials_csv_header();
void write_trials_csv(std::ostream& out, const SweepResult& result);
std::vector<SweepRow> parse_trials_csv(std::istream& in);

/// Per-cell CSV. Columns, in order:
///   noise,fraction,trials,converged,mean_l2,se_l2,mean_l1,se_l1,mean_weighted,se_weighted
std::string summary_csv_header();
void write_summary_csv(std::ostream& out, const SweepSummary& summary);

/// Line chart of mean error against outlier fraction, one polyline per noise,
/// with standard-error bars. Self-contained SVG 1.1.
void write_svg(std::ostream& out, const SweepSummary& summary, const std::string& title);

struct OutputPaths {
  std::optional<std::filesystem::path> trials_csv;
  std::optional<std::filesystem::path> summary_csv;
  std::optional<std::filesystem::path> svg;
};

/// Writes each requested file; I/O failures throw std::runtime_error naming
/// the path.
void emit_outputs(const SweepResult& result, const SweepSummary* summary, const OutputPaths& paths,
                  const std::string& title = "Huber estimator error vs. outlier fraction");

}  // namespace huberbench

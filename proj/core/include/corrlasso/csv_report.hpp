#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "corrlasso/config.hpp"
#include "corrlasso/montecarlo.hpp"

namespace corrlasso {

/// Column names, in order.
std::vector<std::string> csv_columns();

/// Header comment lines ("# ..."), the column row and one row per point.
/// Numbers use %.16e; missing values are empty fields.
void write_csv(std::ostream& out, const ProblemConfig& config,
               const std::vector<SweepPoint>& points);

std::string format_csv(const ProblemConfig& config, const std::vector<SweepPoint>& points);

/// Writes to path; throws Error naming the path on I/O failure.
void emit_csv(const std::string& path, const ProblemConfig& config,
              const std::vector<SweepPoint>& points);

/// Recovers the config embedded in a CSV produced by write_csv.
ProblemConfig config_from_csv(const std::string& csv_text);

}  // namespace corrlasso

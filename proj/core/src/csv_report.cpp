#include "corrlasso/csv_report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "corrlasso/error.hpp"

namespace corrlasso {

namespace {

constexpr const char* kConfigPrefix = "# config: ";

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void metric(std::vector<std::string>& row, const std::optional<TheoryReport>& th,
            const std::optional<EmpiricalReport>& em, double TheoryReport::*theory_field,
            MetricSummary EmpiricalReport::*emp_field) {
  row.push_back(th ? number((*th).*theory_field) : "");
  if (em && ((*em).*emp_field).count > 0) {
    row.push_back(number(((*em).*emp_field).mean));
    row.push_back(number(((*em).*emp_field).std_error));
  } else {
    row.push_back("");
    row.push_back("");
  }
}

}  // namespace

std::vector<std::string> csv_columns() {
  std::vector<std::string> cols{"lambda"};
  for (const char* name : {"mse", "phi_on", "phi_off", "eer", "cosine"}) {
    cols.push_back(std::string("theory_") + name);
    cols.push_back(std::string("emp_") + name + "_mean");
    cols.push_back(std::string("emp_") + name + "_stderr");
  }
  for (const char* name :
       {"alpha_star", "beta_star", "chi_star", "mu_star", "trials", "nonconverged_count", "status"}) {
    cols.emplace_back(name);
  }
  return cols;
}

void write_csv(std::ostream& out, const ProblemConfig& config,
               const std::vector<SweepPoint>& points) {
  if (points.empty()) detail::invalid("write_csv: no results to write");
  out << "# corrlasso sweep\n";
  out << kConfigPrefix << to_json(config) << "\n";
  const auto cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";

  for (const auto& p : points) {
    std::vector<std::string> row{number(p.lambda)};
    metric(row, p.theory, p.empirical, &TheoryReport::mse, &EmpiricalReport::mse);
    metric(row, p.theory, p.empirical, &TheoryReport::phi_on, &EmpiricalReport::phi_on);
    metric(row, p.theory, p.empirical, &TheoryReport::phi_off, &EmpiricalReport::phi_off);
    metric(row, p.theory, p.empirical, &TheoryReport::eer, &EmpiricalReport::eer);
    metric(row, p.theory, p.empirical, &TheoryReport::cosine, &EmpiricalReport::cosine);
    if (p.theory) {
      const auto& s = p.theory->saddle;
      for (double v : {s.alpha_star, s.beta_star, s.chi_star, s.mu_star}) row.push_back(number(v));
    } else {
      row.insert(row.end(), 4, "");
    }
    if (p.empirical) {
      row.push_back(std::to_string(p.empirical->trial_count));
      row.push_back(std::to_string(p.empirical->nonconverged_count));
    } else {
      row.insert(row.end(), 2, "");
    }
    row.push_back(p.status == "ok" ? p.status : quoted(p.status));
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

std::string format_csv(const ProblemConfig& config, const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  write_csv(out, config, points);
  return out.str();
}

void emit_csv(const std::string& path, const ProblemConfig& config,
              const std::vector<SweepPoint>& points) {
  const auto text = format_csv(config, points);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

ProblemConfig config_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  const std::string prefix = kConfigPrefix;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) return parse_config(line.substr(prefix.size()));
    if (line.empty() || line[0] != '#') break;
  }
  throw ConfigError("no config comment found in CSV header");
}

}  // namespace corrlasso

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "corrlasso/config.hpp"
#include "corrlasso/csv_report.hpp"
#include "corrlasso/error.hpp"

using namespace corrlasso;

namespace {

const char* kMinimal = R"({"n":400,"delta":0.7,"kappa":0.1,"rho":0.7,"sigma2":0.01,
  "lambda":{"start":0.01,"stop":0.5,"count":15}})";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') {
        quoted = !quoted;
      } else if (ch == ',' && !quoted) {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    fields.push_back(cur);
    rows.push_back(fields);
  }
  return rows;
}

ProblemConfig quick_config() {
  auto c = parse_config(kMinimal);
  c.n = 60;
  c.lambda = LambdaGrid{0.05, 0.2, 2, LambdaGrid::Spacing::linear};
  c.trials = 3;
  c.threads = 1;
  return c;
}

}  // namespace

TEST(ParseConfig, MinimalWithDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.n, 400u);
  EXPECT_EQ(c.m(), 280u);
  EXPECT_EQ(c.k(), 40u);
  EXPECT_EQ(c.correlation.type, CorrelationSpec::Type::exponential);
  EXPECT_EQ(c.correlation.rho, 0.7);
  EXPECT_EQ(c.xi, 0.001);
  EXPECT_EQ(c.trials, 500);
  EXPECT_EQ(c.mode, RunMode::both);
  EXPECT_EQ(c.noise_variance(), 0.01);
  const auto l = c.lambdas();
  ASSERT_EQ(l.size(), 15u);
  EXPECT_EQ(l.front(), 0.01);
  EXPECT_EQ(l.back(), 0.5);
  EXPECT_NEAR(l[4], 0.15, 1e-15);
}

TEST(ParseConfig, SnrConversion) {
  const auto c = parse_config(
      R"({"n":400,"delta":0.7,"kappa":0.1,"rho":0.7,"snr_db":10,"lambda":0.1})");
  EXPECT_NEAR(c.noise_variance(), 0.01, 1e-17);
}

TEST(ParseConfig, PriorObjectForms) {
  const auto b = parse_config(R"({"n":400,"delta":0.7,"rho":0.7,"sigma2":0.01,"lambda":0.1,
                                  "prior":{"type":"sparse_bernoulli","kappa":0.1}})");
  EXPECT_EQ(b.kappa, 0.1);
  EXPECT_EQ(b.prior.type, PriorSpec::Type::bernoulli);
  const auto g = parse_config(R"({"n":400,"delta":0.7,"rho":0.7,"sigma2":0.01,"lambda":0.1,
      "prior":{"type":"sparse_generic","kappa":0.2,
               "atoms":[{"value":-1,"weight":0.5},{"value":1,"weight":0.5}]}})");
  EXPECT_EQ(g.kappa, 0.2);
  ASSERT_EQ(g.prior.atoms.size(), 2u);
  EXPECT_EQ(g.prior.atoms[0].value, -1.0);
  EXPECT_NE(error_of(R"({"n":400,"delta":0.7,"kappa":0.2,"sigma2":0.01,"lambda":0.1,
                         "prior":{"type":"sparse_bernoulli","kappa":0.1}})")
                .find("prior.kappa"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n":400,"delta":0.7,"sigma2":0.01,"lambda":0.1})").find("kappa"),
            std::string::npos);
}

TEST(ParseConfig, RejectsWithFieldNames) {
  EXPECT_NE(error_of(R"({"n":400,"delta":0.7,"kappa":0.1,"sigma2":0.01,"snr_db":10,"lambda":0.1})")
                .find("sigma2"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n":400,"delta":0.7,"kappa":0.1,"lambda":0.1})").find("sigma2"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n":400,"delta":0.7,"kappa":0.1,"sigma2":0.01,"lambda":0.1,"colour":1})")
                .find("colour"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n":400,"delta":0.7,"kappa":0.1,"sigma2":0.01,"lambda":0.1,"xi":0})")
                .find("xi"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n":400,"delta":0.7,"kappa":0.1,"sigma2":0.01,
                         "lambda":{"start":0.1,"stop":0.2,"count":0}})")
                .find("lambda.count"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n":400,"delta":0.7,"kappa":1.5,"sigma2":0.01,"lambda":0.1})").find("kappa"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n":400,"delta":0.7,"kappa":0.1,"sigma2":0.01,"lambda":0.1,
                         "correlation":{"type":"exponential","rho":0.7,"tau":1}})")
                .find("correlation.tau"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"n":400,"delta":0.7,"kappa":0.1,"sigma2":0.01,"lambda":0.1,"mode":"fast"})")
                .find("mode"),
            std::string::npos);
  EXPECT_NE(error_of("{not json").find("JSON"), std::string::npos);
}

TEST(ParseConfig, RoundTripThroughJson) {
  auto c = parse_config(R"({"n":50,"delta":1.3,"kappa":0.2,"snr_db":7.5,
    "prior":{"type":"generic","atoms":[{"value":-1,"weight":0.25},{"value":3,"weight":0.75}]},
    "lambda":{"start":0.02,"stop":0.9,"count":4,"spacing":"log"},"xi":0.0001,"trials":17,
    "base_seed":18446744073709551615,"mode":"theory","output":"x.csv","threads":2})");
  const auto d = parse_config(to_json(c));
  EXPECT_EQ(to_json(c), to_json(d));
  EXPECT_EQ(d.base_seed, 18446744073709551615ull);
  EXPECT_EQ(d.prior.atoms.size(), 2u);
  EXPECT_EQ(d.lambdas(), c.lambdas());
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 0.1 / 3.0, 0.1 / 3.0, 1.0;
  c = parse_config(R"({"n":3,"delta":0.67,"kappa":0.34,"sigma2":0.01,"lambda":0.1})");
  c.correlation.type = CorrelationSpec::Type::explicit_matrix;
  c.correlation.matrix = m;
  const auto e = parse_config(to_json(c));
  EXPECT_EQ(e.correlation.matrix, m);
}

TEST(Csv, TheoryOnlyRowHasEmptyEmpiricalColumns) {
  auto c = quick_config();
  c.lambda = 0.1;
  c.mode = RunMode::theory;
  const auto text = format_csv(c, run_sweep(c));
  const auto rows = data_rows(text);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], csv_columns());
  const auto cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const bool empirical = cols[i].rfind("emp_", 0) == 0 || cols[i] == "trials" ||
                           cols[i] == "nonconverged_count";
    EXPECT_EQ(rows[1][i].empty(), empirical) << cols[i];
  }
}

TEST(Csv, NumbersRoundTripExactly) {
  const auto c = quick_config();
  const auto pts = run_sweep(c);
  const auto rows = data_rows(format_csv(c, pts));
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const auto& r = rows[p + 1];
    EXPECT_EQ(std::strtod(r[0].c_str(), nullptr), pts[p].lambda);
    EXPECT_EQ(std::strtod(r[1].c_str(), nullptr), pts[p].theory->mse);
    EXPECT_EQ(std::strtod(r[2].c_str(), nullptr), pts[p].empirical->mse.mean);
    EXPECT_EQ(std::strtod(r[3].c_str(), nullptr), pts[p].empirical->mse.std_error);
    EXPECT_EQ(std::strtod(r[13].c_str(), nullptr), pts[p].theory->cosine);
    EXPECT_EQ(std::strtod(r[17].c_str(), nullptr), pts[p].theory->saddle.beta_star);
    EXPECT_EQ(r[20], "3");
    EXPECT_EQ(r.back(), "ok");
  }
}

TEST(Csv, HeaderReproducesRun) {
  const auto c = quick_config();
  const auto text = format_csv(c, run_sweep(c));
  const auto back = config_from_csv(text);
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(format_csv(back, run_sweep(back)), text);
}

TEST(Csv, EmitWritesFileAndReportsBadPath) {
  const auto c = quick_config();
  const auto pts = run_sweep(c);
  const auto path = std::filesystem::temp_directory_path() / "corrlasso_csv_test.csv";
  emit_csv(path.string(), c, pts);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), format_csv(c, pts));
  std::filesystem::remove(path);
  try {
    emit_csv("/nonexistent-dir/out.csv", c, pts);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.csv"), std::string::npos);
  }
  EXPECT_THROW(format_csv(c, {}), InvalidArgument);
}

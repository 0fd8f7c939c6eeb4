#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "corrlasso/config.hpp"
#include "corrlasso/csv_report.hpp"
#include "corrlasso/error.hpp"
#include "corrlasso/montecarlo.hpp"

namespace {

using namespace corrlasso;

struct Flags {
  std::string config_path;
  std::optional<std::size_t> n;
  std::optional<double> delta;
  std::optional<double> kappa;
  std::optional<double> rho;
  std::optional<std::string> correlation;
  std::optional<double> sigma2;
  std::optional<double> snr_db;
  std::optional<double> lambda;
  std::optional<double> lambda_start;
  std::optional<double> lambda_stop;
  std::optional<int> lambda_count;
  std::optional<std::string> lambda_spacing;
  std::optional<double> xi;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<int> threads;
};

void add_flags(CLI::App* cmd, Flags& f, bool with_config) {
  if (with_config) cmd->add_option("-c,--config", f.config_path, "JSON config file");
  cmd->add_option("--n", f.n, "signal dimension");
  cmd->add_option("--delta", f.delta, "measurement ratio m/n");
  cmd->add_option("--kappa", f.kappa, "sparsity ratio k/n");
  cmd->add_option("--rho", f.rho, "exponential correlation coefficient");
  cmd->add_option("--correlation", f.correlation, "exponential or identity")
      ->check(CLI::IsMember({"exponential", "identity"}));
  cmd->add_option("--sigma2", f.sigma2, "noise variance");
  cmd->add_option("--snr-db", f.snr_db, "SNR in dB (kappa / sigma2)");
  cmd->add_option("--lambda", f.lambda, "single regularizer value");
  cmd->add_option("--lambda-start", f.lambda_start, "grid start");
  cmd->add_option("--lambda-stop", f.lambda_stop, "grid stop");
  cmd->add_option("--lambda-count", f.lambda_count, "grid size");
  cmd->add_option("--lambda-spacing", f.lambda_spacing, "linear or log")
      ->check(CLI::IsMember({"linear", "log"}));
  cmd->add_option("--xi", f.xi, "support detection threshold");
  cmd->add_option("--trials", f.trials, "Monte Carlo trials per grid point");
  cmd->add_option("--seed", f.seed, "base seed; trial i uses seed + i");
  cmd->add_option("-o,--output", f.output, "CSV path (stdout if omitted)");
  cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores");
}

void apply(const Flags& f, ProblemConfig& c) {
  if (f.n) c.n = *f.n;
  if (f.delta) c.delta = *f.delta;
  if (f.kappa) c.kappa = *f.kappa;
  if (f.correlation) {
    c.correlation.type = *f.correlation == "identity" ? CorrelationSpec::Type::identity
                                                      : CorrelationSpec::Type::exponential;
  }
  if (f.rho) {
    c.correlation.type = CorrelationSpec::Type::exponential;
    c.correlation.rho = *f.rho;
  }
  if (f.sigma2 && f.snr_db) throw ConfigError("give either --sigma2 or --snr-db, not both");
  if (f.sigma2) {
    c.sigma2 = *f.sigma2;
    c.snr_db.reset();
  }
  if (f.snr_db) {
    c.snr_db = *f.snr_db;
    c.sigma2.reset();
  }
  const bool grid_flag = f.lambda_start || f.lambda_stop || f.lambda_count || f.lambda_spacing;
  if (f.lambda && grid_flag) throw ConfigError("give either --lambda or the --lambda-* grid flags");
  if (f.lambda) c.lambda = *f.lambda;
  if (grid_flag) {
    LambdaGrid g = std::holds_alternative<LambdaGrid>(c.lambda) ? std::get<LambdaGrid>(c.lambda)
                                                                 : LambdaGrid{};
    if (f.lambda_start) g.start = *f.lambda_start;
    if (f.lambda_stop) g.stop = *f.lambda_stop;
    if (f.lambda_count) g.count = *f.lambda_count;
    if (f.lambda_spacing) {
      g.spacing = *f.lambda_spacing == "log" ? LambdaGrid::Spacing::log : LambdaGrid::Spacing::linear;
    }
    c.lambda = g;
  }
  if (f.xi) c.xi = *f.xi;
  if (f.trials) c.trials = *f.trials;
  if (f.seed) c.base_seed = *f.seed;
  if (f.output) c.output = *f.output;
  if (f.threads) c.threads = *f.threads;
}

// Settings shared by every figure: delta = 0.7, n = 400, rho = 0.7,
// kappa = 0.1, xi = 0.001, 15 lambda values on [0.01, 0.5].
ProblemConfig figure_preset(int figure) {
  ProblemConfig c;
  c.n = 400;
  c.delta = 0.7;
  c.kappa = 0.1;
  c.correlation.type = CorrelationSpec::Type::exponential;
  c.correlation.rho = 0.7;
  if (figure == 1) {
    c.sigma2 = 0.01;
  } else {
    c.snr_db = 10.0;
  }
  c.lambda = LambdaGrid{0.01, 0.5, 15, LambdaGrid::Spacing::linear};
  c.xi = 0.001;
  c.trials = 500;
  c.mode = RunMode::both;
  return c;
}

int run(ProblemConfig c) {
  c.validate();
  const auto points = run_sweep(c);
  if (c.output.empty()) {
    write_csv(std::cout, c, points);
  } else {
    emit_csv(c.output, c, points);
  }
  int failures = 0;
  for (const auto& p : points) {
    if (p.status != "ok") {
      std::cerr << "lambda " << p.lambda << ": " << p.status << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated-design LASSO: asymptotic predictions and Monte Carlo checks"};
  app.require_subcommand(1);

  Flags flags;
  auto* theory = app.add_subcommand("theory", "saddle point and predictions only");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo metrics only");
  auto* compare = app.add_subcommand("compare", "theory and Monte Carlo side by side");
  auto* figure = app.add_subcommand("figure", "preset settings of figure 1 to 5");
  for (auto* cmd : {theory, simulate, compare}) add_flags(cmd, flags, true);
  int figure_id = 1;
  figure->add_option("id", figure_id, "figure number")->required()->check(CLI::Range(1, 5));
  add_flags(figure, flags, false);

  CLI11_PARSE(app, argc, argv);

  try {
    ProblemConfig c;
    if (figure->parsed()) {
      c = figure_preset(figure_id);
    } else if (!flags.config_path.empty()) {
      c = load_config(flags.config_path);
    }
    apply(flags, c);
    if (theory->parsed()) c.mode = RunMode::theory;
    if (simulate->parsed()) c.mode = RunMode::empirical;
    if (compare->parsed() || figure->parsed()) c.mode = RunMode::both;
    return run(c);
  } catch (const corrlasso::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

#include "corrlasso/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "corrlasso/error.hpp"

namespace corrlasso {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(where.empty() ? key : where + "." + key, "unknown field");
  }
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

long long get_integer(const json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  fail(field, "expected an integer");
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

CorrelationSpec parse_correlation(const json& v) {
  if (!v.is_object()) fail("correlation", "expected an object");
  reject_unknown(v, {"type", "rho", "matrix"}, "correlation");
  if (!v.contains("type")) fail("correlation.type", "missing");
  const auto type = get_string(v.at("type"), "correlation.type");
  CorrelationSpec spec;
  if (type == "exponential") {
    spec.type = CorrelationSpec::Type::exponential;
    if (!v.contains("rho")) fail("correlation.rho", "required for exponential correlation");
    spec.rho = get_number(v.at("rho"), "correlation.rho");
    if (v.contains("matrix")) fail("correlation.matrix", "not allowed for exponential correlation");
  } else if (type == "identity") {
    spec.type = CorrelationSpec::Type::identity;
    if (v.contains("rho")) fail("correlation.rho", "not allowed for identity correlation");
    if (v.contains("matrix")) fail("correlation.matrix", "not allowed for identity correlation");
  } else if (type == "explicit") {
    spec.type = CorrelationSpec::Type::explicit_matrix;
    if (v.contains("rho")) fail("correlation.rho", "not allowed for explicit correlation");
    if (!v.contains("matrix") || !v.at("matrix").is_array() || v.at("matrix").empty()) {
      fail("correlation.matrix", "expected a nonempty array of rows");
    }
    const auto& rows = v.at("matrix");
    const auto m = static_cast<Eigen::Index>(rows.size());
    spec.matrix.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
        fail("correlation.matrix", "expected a square matrix");
      }
      for (Eigen::Index j = 0; j < m; ++j) {
        spec.matrix(i, j) = get_number(row.at(static_cast<std::size_t>(j)), "correlation.matrix");
      }
    }
  } else {
    fail("correlation.type", "expected exponential, identity or explicit, got '" + type + "'");
  }
  return spec;
}

// Accepts "bernoulli", {type: bernoulli | sparse_bernoulli} and
// {type: generic | sparse_generic, atoms}. An optional kappa inside the
// object is passed back through prior_kappa.
PriorSpec parse_prior(const json& v, std::optional<double>& prior_kappa) {
  PriorSpec spec;
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name != "bernoulli" && name != "sparse_bernoulli") {
      fail("prior", "a string prior must be 'bernoulli'");
    }
    return spec;
  }
  if (!v.is_object()) fail("prior", "expected 'bernoulli' or an object");
  reject_unknown(v, {"type", "kappa", "atoms"}, "prior");
  if (v.contains("kappa")) prior_kappa = get_number(v.at("kappa"), "prior.kappa");
  auto type = v.contains("type") ? get_string(v.at("type"), "prior.type") : "generic";
  if (type.rfind("sparse_", 0) == 0) type = type.substr(7);
  if (type == "bernoulli") {
    if (v.contains("atoms")) fail("prior.atoms", "not allowed for the bernoulli prior");
    return spec;
  }
  if (type != "generic") fail("prior.type", "expected bernoulli or generic, got '" + type + "'");
  spec.type = PriorSpec::Type::generic;
  if (!v.contains("atoms") || !v.at("atoms").is_array() || v.at("atoms").empty()) {
    fail("prior.atoms", "expected a nonempty array");
  }
  for (const auto& a : v.at("atoms")) {
    if (!a.is_object()) fail("prior.atoms", "each atom must be an object");
    reject_unknown(a, {"value", "weight"}, "prior.atoms[]");
    if (!a.contains("value") || !a.contains("weight")) {
      fail("prior.atoms", "each atom needs value and weight");
    }
    spec.atoms.push_back({get_number(a.at("value"), "prior.atoms.value"),
                          get_number(a.at("weight"), "prior.atoms.weight")});
  }
  return spec;
}

std::variant<double, LambdaGrid> parse_lambda(const json& v) {
  if (v.is_number()) return get_number(v, "lambda");
  if (!v.is_object()) fail("lambda", "expected a number or a grid object");
  reject_unknown(v, {"start", "stop", "count", "spacing"}, "lambda");
  LambdaGrid grid;
  for (const char* key : {"start", "stop", "count"}) {
    if (!v.contains(key)) fail(std::string("lambda.") + key, "missing");
  }
  grid.start = get_number(v.at("start"), "lambda.start");
  grid.stop = get_number(v.at("stop"), "lambda.stop");
  grid.count = static_cast<int>(get_integer(v.at("count"), "lambda.count"));
  if (v.contains("spacing")) {
    const auto s = get_string(v.at("spacing"), "lambda.spacing");
    if (s == "linear") {
      grid.spacing = LambdaGrid::Spacing::linear;
    } else if (s == "log") {
      grid.spacing = LambdaGrid::Spacing::log;
    } else {
      fail("lambda.spacing", "expected linear or log, got '" + s + "'");
    }
  }
  return grid;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::vector<double> LambdaGrid::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    if (i == count - 1) {
      out.push_back(stop);
      break;
    }
    const double f = static_cast<double>(i) / static_cast<double>(count - 1);
    if (spacing == Spacing::linear) {
      out.push_back(start + f * (stop - start));
    } else {
      out.push_back(std::exp(std::log(start) + f * (std::log(stop) - std::log(start))));
    }
  }
  return out;
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::theory: return "theory";
    case RunMode::empirical: return "empirical";
    case RunMode::both: return "both";
  }
  return "both";
}

RunMode parse_mode(const std::string& text) {
  if (text == "theory") return RunMode::theory;
  if (text == "empirical") return RunMode::empirical;
  if (text == "both") return RunMode::both;
  fail("mode", "expected theory, empirical or both, got '" + text + "'");
}

void ProblemConfig::validate() const {
  if (n < 2) fail("n", "must be at least 2");
  if (!(delta > 0.0) || !std::isfinite(delta)) fail("delta", "must be positive");
  if (!(kappa > 0.0 && kappa < 1.0)) fail("kappa", "must lie in (0, 1)");
  if (m() < 1) fail("delta", "round(delta * n) must be at least 1");
  const double kn = std::llround(kappa * static_cast<double>(n));
  if (kn < 1 || kn >= static_cast<double>(n)) fail("kappa", "round(kappa * n) must lie in [1, n)");

  switch (correlation.type) {
    case CorrelationSpec::Type::exponential:
      if (!(correlation.rho >= 0.0 && correlation.rho < 1.0)) {
        fail("correlation.rho", "must lie in [0, 1)");
      }
      break;
    case CorrelationSpec::Type::identity:
      break;
    case CorrelationSpec::Type::explicit_matrix:
      if (static_cast<std::size_t>(correlation.matrix.rows()) != m()) {
        fail("correlation.matrix", "dimension must equal round(delta * n)");
      }
      break;
  }

  if (sigma2.has_value() == snr_db.has_value()) {
    fail(sigma2 ? "sigma2" : "snr_db", "exactly one of sigma2 and snr_db must be given");
  }
  if (sigma2 && (!(*sigma2 >= 0.0) || !std::isfinite(*sigma2))) {
    fail("sigma2", "must be nonnegative and finite");
  }
  if (snr_db && !std::isfinite(*snr_db)) fail("snr_db", "must be finite");

  if (prior.type == PriorSpec::Type::generic) {
    try {
      (void)SparsePrior::generic(kappa, prior.atoms);
    } catch (const InvalidArgument& e) {
      fail("prior.atoms", e.what());
    }
  }

  if (const auto* l = std::get_if<double>(&lambda)) {
    if (!(*l > 0.0) || !std::isfinite(*l)) fail("lambda", "must be positive");
  } else {
    const auto& g = std::get<LambdaGrid>(lambda);
    if (g.count < 1) fail("lambda.count", "must be at least 1");
    if (!(g.start > 0.0) || !std::isfinite(g.start)) fail("lambda.start", "must be positive");
    if (!(g.stop >= g.start) || !std::isfinite(g.stop)) {
      fail("lambda.stop", "must be finite and not below lambda.start");
    }
  }
  if (!(xi > 0.0) || !std::isfinite(xi)) fail("xi", "must be positive");
  if (trials < 1) fail("trials", "must be at least 1");
  if (threads < 0) fail("threads", "must be nonnegative");
}

std::size_t ProblemConfig::m() const {
  return static_cast<std::size_t>(std::llround(delta * static_cast<double>(n)));
}

std::size_t ProblemConfig::k() const { return support_size(kappa, n); }

double ProblemConfig::noise_variance() const {
  if (sigma2) return *sigma2;
  if (snr_db) return kappa / std::pow(10.0, *snr_db / 10.0);
  fail("sigma2", "exactly one of sigma2 and snr_db must be given");
}

SparsePrior ProblemConfig::signal_prior() const {
  if (prior.type == PriorSpec::Type::bernoulli) return SparsePrior::bernoulli(kappa);
  return SparsePrior::generic(kappa, prior.atoms);
}

CorrelationModel ProblemConfig::correlation_model() const {
  switch (correlation.type) {
    case CorrelationSpec::Type::exponential:
      return CorrelationModel::exponential(correlation.rho, m());
    case CorrelationSpec::Type::identity:
      return CorrelationModel::identity(m());
    case CorrelationSpec::Type::explicit_matrix:
      return CorrelationModel::explicit_matrix(correlation.matrix);
  }
  return CorrelationModel::identity(m());
}

std::vector<double> ProblemConfig::lambdas() const {
  if (const auto* l = std::get_if<double>(&lambda)) return {*l};
  return std::get<LambdaGrid>(lambda).values();
}

ProblemConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"n", "delta", "kappa", "rho", "correlation", "sigma2", "snr_db", "prior",
                  "lambda", "xi", "trials", "base_seed", "mode", "output", "threads"},
                 "");

  ProblemConfig c;
  for (const char* key : {"n", "delta", "lambda"}) {
    if (!doc.contains(key)) fail(key, "missing");
  }
  const long long n = get_integer(doc.at("n"), "n");
  if (n < 2) fail("n", "must be at least 2");
  c.n = static_cast<std::size_t>(n);
  c.delta = get_number(doc.at("delta"), "delta");
  std::optional<double> prior_kappa;
  if (doc.contains("prior")) c.prior = parse_prior(doc.at("prior"), prior_kappa);
  if (doc.contains("kappa")) {
    c.kappa = get_number(doc.at("kappa"), "kappa");
    if (prior_kappa && *prior_kappa != c.kappa) fail("prior.kappa", "differs from kappa");
  } else if (prior_kappa) {
    c.kappa = *prior_kappa;
  } else {
    fail("kappa", "missing");
  }

  if (doc.contains("rho") && doc.contains("correlation")) {
    fail("rho", "give either rho or correlation, not both");
  }
  if (doc.contains("rho")) {
    c.correlation.type = CorrelationSpec::Type::exponential;
    c.correlation.rho = get_number(doc.at("rho"), "rho");
  } else if (doc.contains("correlation")) {
    c.correlation = parse_correlation(doc.at("correlation"));
  }
  if (doc.contains("sigma2")) c.sigma2 = get_number(doc.at("sigma2"), "sigma2");
  if (doc.contains("snr_db")) c.snr_db = get_number(doc.at("snr_db"), "snr_db");
  c.lambda = parse_lambda(doc.at("lambda"));
  if (doc.contains("xi")) c.xi = get_number(doc.at("xi"), "xi");
  if (doc.contains("trials")) c.trials = static_cast<int>(get_integer(doc.at("trials"), "trials"));
  if (doc.contains("base_seed")) {
    const auto& s = doc.at("base_seed");
    if (s.is_number_unsigned()) {
      c.base_seed = s.get<std::uint64_t>();
    } else {
      const long long v = get_integer(s, "base_seed");
      if (v < 0) fail("base_seed", "must be nonnegative");
      c.base_seed = static_cast<std::uint64_t>(v);
    }
  }
  if (doc.contains("mode")) c.mode = parse_mode(get_string(doc.at("mode"), "mode"));
  if (doc.contains("output")) c.output = get_string(doc.at("output"), "output");
  if (doc.contains("threads")) {
    c.threads = static_cast<int>(get_integer(doc.at("threads"), "threads"));
  }
  c.validate();
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json(const ProblemConfig& c) {
  json doc;
  doc["n"] = c.n;
  doc["delta"] = c.delta;
  doc["kappa"] = c.kappa;
  json corr;
  switch (c.correlation.type) {
    case CorrelationSpec::Type::exponential:
      corr["type"] = "exponential";
      corr["rho"] = c.correlation.rho;
      break;
    case CorrelationSpec::Type::identity:
      corr["type"] = "identity";
      break;
    case CorrelationSpec::Type::explicit_matrix:
      corr["type"] = "explicit";
      corr["matrix"] = matrix_json(c.correlation.matrix);
      break;
  }
  doc["correlation"] = corr;
  if (c.sigma2) doc["sigma2"] = *c.sigma2;
  if (c.snr_db) doc["snr_db"] = *c.snr_db;
  if (c.prior.type == PriorSpec::Type::bernoulli) {
    doc["prior"] = "bernoulli";
  } else {
    json atoms = json::array();
    for (const auto& a : c.prior.atoms) atoms.push_back({{"value", a.value}, {"weight", a.weight}});
    doc["prior"] = {{"type", "generic"}, {"atoms", atoms}};
  }
  if (const auto* l = std::get_if<double>(&c.lambda)) {
    doc["lambda"] = *l;
  } else {
    const auto& g = std::get<LambdaGrid>(c.lambda);
    doc["lambda"] = {{"start", g.start},
                     {"stop", g.stop},
                     {"count", g.count},
                     {"spacing", g.spacing == LambdaGrid::Spacing::log ? "log" : "linear"}};
  }
  doc["xi"] = c.xi;
  doc["trials"] = c.trials;
  doc["base_seed"] = c.base_seed;
  doc["mode"] = to_string(c.mode);
  doc["output"] = c.output;
  doc["threads"] = c.threads;
  return doc.dump();
}

}  // namespace corrlasso

#include "asgd/config.hpp"

#include <set>
#include <sstream>

#include "asgd/io.hpp"

namespace asgd {

namespace {

const std::set<std::string> kKnownKeys = {
    "objective.kind",
    "objective.direction",
    "distribution.family",
    "distribution.center",
    "distribution.scale",
    "distribution.dof",
    "distribution.radius",
    "distribution.weights",
    "distribution.centers",
    "distribution.scales",
    "distribution.terms",
    "distribution.teacher",
    "distribution.label_noise",
    "schedule.c_gamma",
    "schedule.alpha",
    "schedule.allow_alpha_one",
    "estimator.clip_radius",
    "estimator.init",
    "estimator.n",
    "experiment.n_max",
    "experiment.checkpoint_start",
    "experiment.points_per_decade",
    "experiment.replicates",
    "experiment.moments",
    "experiment.seed",
    "experiment.burn_in",
    "ground_truth.mode",
    "ground_truth.n_oracle",
    "ground_truth.tol",
    "ground_truth.max_iter",
    "check.radius",
    "check.n_probes",
    "check.n_mc",
    "check.moment_orders",
    "oracle.solver",
    "oracle.dataset",
};

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) {
    const auto v = parse_uint(part);
    if (v < 1 || v > 16) throw ConfigError("moment order out of range: " + part);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!kKnownKeys.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    if (!entries.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return entries;
}

std::string canonical_config_text(const std::map<std::string, std::string>& entries) {
  std::string out;
  for (const auto& [key, value] : entries) out += key + "=" + value + "\n";
  return out;
}

RunConfig parse_config(const std::string& text) {
  const auto entries = parse_key_values(text);
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  std::map<std::string, std::string> dist_params;
  const std::string prefix = "distribution.";
  for (const auto& [key, value] : entries) {
    if (key.rfind(prefix, 0) == 0) dist_params[key.substr(prefix.size())] = value;
  }
  DistributionSpec dist = parse_distribution(dist_params);

  const auto* kind_text = get("objective.kind");
  if (!kind_text) throw ConfigError("objective.kind is required");
  const ObjectiveKind kind = parse_objective_kind(*kind_text);
  if (get("objective.direction") && kind != ObjectiveKind::kGeometricQuantile) {
    throw ConfigError("objective.direction applies only to geometric_quantile");
  }
  const std::size_t d = dist.dim();
  std::optional<Objective> objective;
  switch (kind) {
    case ObjectiveKind::kQuadratic:
      if (dist.center.empty()) throw ConfigError("quadratic objective needs distribution.center");
      objective.emplace(QuadraticObjective(dist.center, dist.scale));
      break;
    case ObjectiveKind::kGeometricQuantile: {
      Vector v = get("objective.direction") ? parse_vector(*get("objective.direction")) : Vector(d);
      if (v.size() != d) throw DimensionMismatch(v.size(), d);
      objective.emplace(GeometricQuantileObjective(std::move(v)));
      break;
    }
    case ObjectiveKind::kCoshLogistic:
      objective.emplace(CoshLogisticObjective{d});
      break;
    case ObjectiveKind::kLogistic:
      objective.emplace(LogisticObjective{d});
      break;
  }
  if (objective->labeled() != dist.labeled()) {
    throw ConfigError(to_string(kind) + " needs a " + (objective->labeled() ? "labeled" : "unlabeled") +
                      " distribution");
  }

  ExperimentConfig exp(*objective, dist);
  if (const auto* v = get("schedule.c_gamma")) exp.schedule.c_gamma = parse_double(*v);
  if (const auto* v = get("schedule.alpha")) exp.schedule.alpha = parse_double(*v);
  if (const auto* v = get("schedule.allow_alpha_one")) exp.schedule.allow_alpha_one = parse_bool(*v);
  if (const auto* v = get("estimator.clip_radius")) exp.stream.clip_radius = parse_double(*v);
  if (const auto* v = get("estimator.init")) {
    if (*v == "zero") {
      exp.stream.zero_init = true;
    } else if (*v != "natural") {
      throw ConfigError("estimator.init must be 'natural' or 'zero'");
    }
  }
  if (const auto* v = get("experiment.n_max")) exp.n_max = parse_uint(*v);
  if (const auto* v = get("experiment.points_per_decade")) exp.points_per_decade = static_cast<int>(parse_uint(*v));
  if (const auto* v = get("experiment.checkpoint_start")) {
    exp.checkpoints = geometric_checkpoints(parse_uint(*v), exp.n_max, exp.points_per_decade);
  }
  if (const auto* v = get("experiment.replicates")) exp.replicates = parse_uint(*v);
  if (const auto* v = get("experiment.moments")) exp.moments = parse_int_list(*v);
  if (const auto* v = get("experiment.seed")) exp.seed = parse_uint(*v);
  if (const auto* v = get("experiment.burn_in")) exp.burn_in_fraction = parse_double(*v);
  if (const auto* v = get("ground_truth.mode")) exp.ground_truth.mode = parse_ground_truth_mode(*v);
  if (const auto* v = get("ground_truth.n_oracle")) exp.ground_truth.n_oracle = parse_uint(*v);
  if (const auto* v = get("ground_truth.tol")) exp.ground_truth.tol = parse_double(*v);
  if (const auto* v = get("ground_truth.max_iter")) exp.ground_truth.max_iter = static_cast<int>(parse_uint(*v));
  exp.ground_truth.seed = exp.seed;
  if (!(exp.stream.clip_radius > 0.0)) throw ConfigError("estimator.clip_radius must be positive");
  if (exp.points_per_decade < 8) throw ConfigError("experiment.points_per_decade must be >= 8");
  exp.validate();

  RunConfig cfg(std::move(exp));
  if (const auto* v = get("estimator.n")) cfg.estimate_n = parse_uint(*v);
  cfg.check.seed = cfg.experiment.seed;
  if (const auto* v = get("check.radius")) cfg.check.radius = parse_double(*v);
  if (const auto* v = get("check.n_probes")) cfg.check.n_probes = parse_uint(*v);
  if (const auto* v = get("check.n_mc")) cfg.check.n_mc = parse_uint(*v);
  if (const auto* v = get("check.moment_orders")) cfg.check_moments = parse_int_list(*v);
  if (!(cfg.check.radius > 0.0)) throw ConfigError("check.radius must be positive");
  if (cfg.check.n_probes < 1 || cfg.check.n_mc < 1) throw ConfigError("check.n_probes and check.n_mc must be >= 1");
  if (const auto* v = get("oracle.solver")) {
    if (*v == "auto") {
      cfg.oracle_solver = OracleSolver::kAuto;
    } else if (*v == "weiszfeld") {
      if (kind != ObjectiveKind::kGeometricQuantile) throw ConfigError("weiszfeld solves geometric quantiles only");
      cfg.oracle_solver = OracleSolver::kWeiszfeld;
    } else if (*v == "batch_gd") {
      cfg.oracle_solver = OracleSolver::kBatchGd;
    } else {
      throw ConfigError("oracle.solver must be auto, weiszfeld or batch_gd");
    }
  }
  if (const auto* v = get("oracle.dataset")) cfg.oracle_dataset = *v;
  cfg.canonical_text = canonical_config_text(entries);
  cfg.hash = fnv1a_hex(cfg.canonical_text);
  cfg.experiment.config_hash = cfg.hash;
  return cfg;
}

}  // namespace asgd

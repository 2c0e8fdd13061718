#include "asgd/datagen.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "asgd/io.hpp"

namespace asgd {

std::string to_string(Family family) {
  switch (family) {
    case Family::kGaussian: return "gaussian";
    case Family::kStudentT: return "student_t";
    case Family::kMixture: return "mixture";
    case Family::kSphereUniform: return "sphere_uniform";
    case Family::kKlBrownian: return "kl_brownian";
    case Family::kTeacherLogistic: return "teacher_logistic";
    case Family::kTeacherCosh: return "teacher_cosh";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::kGaussian, Family::kStudentT, Family::kMixture, Family::kSphereUniform,
                   Family::kKlBrownian, Family::kTeacherLogistic, Family::kTeacherCosh}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown distribution family '" + name + "'");
}

void DistributionSpec::validate() {
  auto require_center = [&] {
    if (center.empty()) throw ConfigError(to_string(family) + " requires a center");
  };
  auto require_positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite and > 0");
  };
  switch (family) {
    case Family::kGaussian:
      require_center();
      require_positive(scale, "scale");
      break;
    case Family::kStudentT:
      require_center();
      require_positive(scale, "scale");
      if (!(dof > 2.0) || !std::isfinite(dof)) throw ConfigError("student_t requires dof > 2");
      break;
    case Family::kMixture: {
      if (components.empty()) throw ConfigError("mixture requires at least one component");
      double total = 0.0;
      const std::size_t d = components.front().center.size();
      if (d == 0) throw ConfigError("mixture component center must be non-empty");
      for (const auto& c : components) {
        if (!(c.weight >= 0.0)) throw ConfigError("mixture weights must be non-negative");
        if (c.center.size() != d) throw DimensionMismatch(c.center.size(), d);
        require_positive(c.scale, "mixture scale");
        total += c.weight;
      }
      if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixture weights must sum to 1");
      break;
    }
    case Family::kSphereUniform:
      require_center();
      require_positive(radius, "radius");
      break;
    case Family::kKlBrownian:
      if (terms < 1) throw ConfigError("kl_brownian requires terms >= 1");
      if (center.empty()) center = Vector(terms);
      if (center.size() != terms) throw DimensionMismatch(center.size(), terms);
      break;
    case Family::kTeacherLogistic:
    case Family::kTeacherCosh:
      if (teacher.empty()) throw ConfigError(to_string(family) + " requires a teacher vector");
      if (center.empty()) center = Vector(teacher.size());
      if (center.size() != teacher.size()) throw DimensionMismatch(center.size(), teacher.size());
      require_positive(scale, "scale");
      if (!(label_noise >= 0.0 && label_noise < 0.5)) throw ConfigError("label_noise must lie in [0, 0.5)");
      break;
  }
  for (const Vector* v : {&center, &teacher}) {
    if (!all_finite(*v)) throw ConfigError("distribution parameters must be finite");
  }
}

std::size_t DistributionSpec::dim() const {
  switch (family) {
    case Family::kMixture: return components.empty() ? 0 : components.front().center.size();
    case Family::kKlBrownian: return terms;
    case Family::kTeacherLogistic:
    case Family::kTeacherCosh: return teacher.size();
    default: return center.size();
  }
}

bool DistributionSpec::labeled() const {
  return family == Family::kTeacherLogistic || family == Family::kTeacherCosh;
}

bool DistributionSpec::centrally_symmetric() const {
  switch (family) {
    case Family::kGaussian:
    case Family::kStudentT:
    case Family::kSphereUniform:
    case Family::kKlBrownian: return true;
    default: return false;
  }
}

namespace {

const std::set<std::string> kDistributionKeys = {"family", "center", "scale",   "dof",     "radius",     "weights",
                                                 "centers", "scales", "terms", "teacher", "label_noise"};

}  // namespace

DistributionSpec parse_distribution(const std::map<std::string, std::string>& params) {
  for (const auto& [key, value] : params) {
    if (!kDistributionKeys.count(key)) throw ConfigError("unknown distribution key '" + key + "'");
  }
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = params.find(key);
    return it == params.end() ? nullptr : &it->second;
  };
  DistributionSpec spec;
  const auto* family = get("family");
  if (!family) throw ConfigError("distribution.family is required");
  spec.family = parse_family(trim(*family));
  if (const auto* v = get("center")) spec.center = parse_vector(*v);
  if (const auto* v = get("scale")) spec.scale = parse_double(*v);
  if (const auto* v = get("dof")) spec.dof = parse_double(*v);
  if (const auto* v = get("radius")) spec.radius = parse_double(*v);
  if (const auto* v = get("terms")) spec.terms = parse_uint(*v);
  if (const auto* v = get("teacher")) spec.teacher = parse_vector(*v);
  if (const auto* v = get("label_noise")) spec.label_noise = parse_double(*v);
  if (spec.family == Family::kMixture) {
    const auto* weights = get("weights");
    const auto* centers = get("centers");
    if (!weights || !centers) throw ConfigError("mixture requires weights and centers");
    const Vector w = parse_vector(*weights);
    const auto center_list = split(*centers, '|');
    if (center_list.size() != w.size()) throw ConfigError("mixture weights and centers differ in length");
    Vector scales(w.size(), 1.0);
    if (const auto* s = get("scales")) scales = parse_vector(*s);
    if (scales.size() != w.size()) throw ConfigError("mixture scales and weights differ in length");
    for (std::size_t k = 0; k < w.size(); ++k) {
      spec.components.push_back({w[k], parse_vector(center_list[k]), scales[k]});
    }
  }
  spec.validate();
  return spec;
}

std::map<std::string, std::string> distribution_params(const DistributionSpec& spec) {
  std::map<std::string, std::string> out;
  out["family"] = to_string(spec.family);
  switch (spec.family) {
    case Family::kGaussian:
      out["center"] = format_vector(spec.center);
      out["scale"] = format_double(spec.scale);
      break;
    case Family::kStudentT:
      out["center"] = format_vector(spec.center);
      out["scale"] = format_double(spec.scale);
      out["dof"] = format_double(spec.dof);
      break;
    case Family::kMixture: {
      Vector w(spec.components.size()), s(spec.components.size());
      std::string centers;
      for (std::size_t k = 0; k < spec.components.size(); ++k) {
        w[k] = spec.components[k].weight;
        s[k] = spec.components[k].scale;
        if (k > 0) centers += '|';
        centers += format_vector(spec.components[k].center);
      }
      out["weights"] = format_vector(w);
      out["scales"] = format_vector(s);
      out["centers"] = centers;
      break;
    }
    case Family::kSphereUniform:
      out["center"] = format_vector(spec.center);
      out["radius"] = format_double(spec.radius);
      break;
    case Family::kKlBrownian:
      out["center"] = format_vector(spec.center);
      out["terms"] = std::to_string(spec.terms);
      break;
    case Family::kTeacherLogistic:
    case Family::kTeacherCosh:
      out["center"] = format_vector(spec.center);
      out["scale"] = format_double(spec.scale);
      out["teacher"] = format_vector(spec.teacher);
      out["label_noise"] = format_double(spec.label_noise);
      break;
  }
  return out;
}

Sampler::Sampler(DistributionSpec spec, CounterRng rng) : spec_(std::move(spec)), rng_(rng) {
  spec_.validate();
  double acc = 0.0;
  for (const auto& c : spec_.components) {
    acc += c.weight;
    cumulative_weights_.push_back(acc);
  }
}

Sample Sampler::operator()() {
  Sample s{Vector(spec_.dim()), 0.0};
  draw(s);
  return s;
}

void Sampler::draw(Sample& out) {
  const std::size_t d = spec_.dim();
  if (out.x.size() != d) out.x = Vector(d);
  Vector& x = out.x;
  out.label = 0.0;
  switch (spec_.family) {
    case Family::kGaussian:
      for (std::size_t i = 0; i < d; ++i) x[i] = spec_.center[i] + spec_.scale * normal();
      break;
    case Family::kStudentT: {
      // chi-square(dof) = Gamma(dof/2, scale 2)
      std::gamma_distribution<double> chi2(0.5 * spec_.dof, 2.0);
      for (std::size_t i = 0; i < d; ++i) x[i] = normal();
      const double w = chi2(rng_);
      const double factor = spec_.scale * std::sqrt(spec_.dof / w);
      for (std::size_t i = 0; i < d; ++i) x[i] = spec_.center[i] + factor * x[i];
      break;
    }
    case Family::kMixture: {
      const double u = rng_.uniform();
      std::size_t k = 0;
      while (k + 1 < cumulative_weights_.size() && u >= cumulative_weights_[k]) ++k;
      const auto& c = spec_.components[k];
      for (std::size_t i = 0; i < d; ++i) x[i] = c.center[i] + c.scale * normal();
      break;
    }
    case Family::kSphereUniform: {
      double n2 = 0.0;
      do {
        n2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          x[i] = normal();
          n2 += x[i] * x[i];
        }
      } while (n2 == 0.0);
      const double factor = spec_.radius / std::sqrt(n2);
      for (std::size_t i = 0; i < d; ++i) x[i] = spec_.center[i] + factor * x[i];
      break;
    }
    case Family::kKlBrownian:
      // Brownian motion on [0,1]: eigenvalues 1/((k - 1/2) pi)^2 in an
      // orthonormal sine basis, so coefficient k has sd 1/((k - 1/2) pi).
      for (std::size_t k = 0; k < d; ++k) {
        const double sd = 1.0 / ((static_cast<double>(k) + 0.5) * std::numbers::pi);
        x[k] = spec_.center[k] + sd * normal();
      }
      break;
    case Family::kTeacherLogistic:
    case Family::kTeacherCosh: {
      double score = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        x[i] = spec_.center[i] + spec_.scale * normal();
        score += x[i] * spec_.teacher[i];
      }
      double y = score >= 0.0 ? 1.0 : -1.0;
      if (spec_.label_noise > 0.0 && rng_.uniform() < spec_.label_noise) y = -y;
      out.label = y;
      break;
    }
  }
}

Dataset freeze(const DistributionSpec& spec, std::uint64_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw ConfigError("freeze requires n >= 1");
  const std::size_t d = std::max<std::size_t>(1, spec.dim());
  if (n > static_cast<std::uint64_t>(1e8) / d) throw ConfigError("dataset too large (n must be <= 1e8/d)");
  Sampler sampler(spec, CounterRng(seed, stream));
  Dataset data(n);
  for (auto& s : data) sampler.draw(s);
  return data;
}

std::string dataset_to_csv(const DistributionSpec& spec, std::uint64_t seed, const Dataset& data) {
  std::string out = "#";
  bool first = true;
  for (const auto& [key, value] : distribution_params(spec)) {
    out += first ? " " : ";";
    first = false;
    out += key + "=" + value;
  }
  out += ";seed=" + std::to_string(seed) + ";n=" + std::to_string(data.size()) + "\n";
  const bool labeled = spec.labeled();
  for (const auto& s : data) {
    out += format_vector(s.x);
    if (labeled) out += "," + format_double(s.label);
    out += '\n';
  }
  return out;
}

LoadedDataset dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') throw ConfigError("dataset CSV lacks '#' header");
  std::map<std::string, std::string> params;
  LoadedDataset loaded;
  std::uint64_t expected_n = 0;
  for (const auto& pair : split(line.substr(1), ';')) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed header field '" + pair + "'");
    const std::string key = trim(pair.substr(0, eq));
    const std::string value = trim(pair.substr(eq + 1));
    if (key == "seed") {
      loaded.seed = parse_uint(value);
    } else if (key == "n") {
      expected_n = parse_uint(value);
    } else {
      params[key] = value;
    }
  }
  loaded.spec = parse_distribution(params);
  const std::size_t d = loaded.spec.dim();
  const bool labeled = loaded.spec.labeled();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Vector row = parse_vector(line);
    if (row.size() != d + (labeled ? 1 : 0)) throw DimensionMismatch(row.size(), d + (labeled ? 1 : 0));
    Sample s{Vector(d), 0.0};
    for (std::size_t i = 0; i < d; ++i) s.x[i] = row[i];
    if (labeled) s.label = row[d];
    loaded.data.push_back(std::move(s));
  }
  if (loaded.data.size() != expected_n) throw ConfigError("dataset row count does not match header");
  return loaded;
}

}  // namespace asgd

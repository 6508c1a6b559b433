#include "core/runconfig.hpp"

#include "core/common.hpp"

namespace ptcov {
namespace cfg {

void check_keys(const Json& object, const std::string& context,
                const std::vector<std::string>& allowed) {
  if (!object.is_object()) fail(ErrorKind::invalid_argument, context + " must be an object");
  for (const auto& [key, value] : object.items()) {
    (void)value;
    bool known = false;
    for (const std::string& k : allowed)
      if (k == key) {
        known = true;
        break;
      }
    if (!known) fail(ErrorKind::invalid_argument, context + ": unknown key '" + key + "'");
  }
}

double get_number(const Json& object, const std::string& key, double fallback) {
  if (!object.contains(key)) return fallback;
  if (!object[key].is_number())
    fail(ErrorKind::invalid_argument, "'" + key + "' must be a number");
  return object[key].get<double>();
}

double require_number(const Json& object, const std::string& key, const std::string& context) {
  if (!object.contains(key) || !object[key].is_number())
    fail(ErrorKind::invalid_argument, context + ": '" + key + "' must be a number");
  return object[key].get<double>();
}

long get_integer(const Json& object, const std::string& key, long fallback) {
  if (!object.contains(key)) return fallback;
  if (!object[key].is_number_integer())
    fail(ErrorKind::invalid_argument, "'" + key + "' must be an integer");
  return object[key].get<long>();
}

std::string require_string(const Json& object, const std::string& key,
                           const std::string& context) {
  if (!object.contains(key) || !object[key].is_string())
    fail(ErrorKind::invalid_argument, context + ": '" + key + "' must be a string");
  return object[key].get<std::string>();
}

std::string get_string(const Json& object, const std::string& key, const std::string& fallback) {
  if (!object.contains(key)) return fallback;
  if (!object[key].is_string())
    fail(ErrorKind::invalid_argument, "'" + key + "' must be a string");
  return object[key].get<std::string>();
}

Window parse_window(const Json& spec) {
  if (spec.contains("vertices")) {
    check_keys(spec, "window", {"vertices"});
    if (!spec["vertices"].is_array() || spec["vertices"].size() < 3)
      fail(ErrorKind::invalid_argument, "window.vertices must list at least three [x, y] pairs");
    std::vector<Vec2> vertices;
    for (const Json& v : spec["vertices"]) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(ErrorKind::invalid_argument, "window.vertices entries must be [x, y] pairs");
      vertices.push_back(Vec2{v[0].get<double>(), v[1].get<double>()});
    }
    return Window::polygon(std::move(vertices));
  }
  check_keys(spec, "window", {"x0", "y0", "x1", "y1"});
  return Window::rectangle(require_number(spec, "x0", "window"), require_number(spec, "y0", "window"),
                           require_number(spec, "x1", "window"),
                           require_number(spec, "y1", "window"));
}

ShiftTestConfig parse_test_spec(const Json& spec, const std::string& context) {
  check_keys(spec, context,
             {"statistic", "residuals", "correction", "n_shifts", "radius", "shift_distribution",
              "sampling_points", "bandwidth", "bandwidth_candidates", "label"});
  ShiftTestConfig config;
  std::string stat = get_string(spec, "statistic", "cwr");
  if (stat == "cwr")
    config.statistic = Statistic::cwr;
  else if (stat == "tau_partial")
    config.statistic = Statistic::tau_partial;
  else if (stat == "mean_covariate")
    config.statistic = Statistic::mean_covariate;
  else
    fail(ErrorKind::invalid_argument,
         context + ": statistic must be cwr, tau_partial or mean_covariate");

  std::string res = get_string(spec, "residuals", "nonparametric");
  if (res == "nonparametric")
    config.residuals = Provenance::nonparametric;
  else if (res == "parametric")
    config.residuals = Provenance::parametric;
  else
    fail(ErrorKind::invalid_argument, context + ": residuals must be parametric or nonparametric");

  std::string corr = get_string(spec, "correction", "torus");
  if (corr == "torus")
    config.correction = Correction::torus;
  else if (corr == "variance")
    config.correction = Correction::variance;
  else
    fail(ErrorKind::invalid_argument, context + ": correction must be torus or variance");

  std::string dist = get_string(spec, "shift_distribution", "disc");
  if (dist == "disc")
    config.shift_dist = ShiftDist::disc;
  else if (dist == "uniform_window")
    config.shift_dist = ShiftDist::uniform_window;
  else
    fail(ErrorKind::invalid_argument,
         context + ": shift_distribution must be disc or uniform_window");

  config.n_shifts = static_cast<int>(get_integer(spec, "n_shifts", 999));
  config.radius = get_number(spec, "radius", 0.0);
  config.sampling_points = static_cast<int>(get_integer(spec, "sampling_points", 100));
  config.fixed_bandwidth = get_number(spec, "bandwidth", 0.0);
  if (spec.contains("bandwidth_candidates")) {
    if (!spec["bandwidth_candidates"].is_array())
      fail(ErrorKind::invalid_argument, context + ": bandwidth_candidates must be an array");
    for (const Json& b : spec["bandwidth_candidates"]) {
      if (!b.is_number())
        fail(ErrorKind::invalid_argument, context + ": bandwidth_candidates must be numbers");
      config.bandwidth_candidates.push_back(b.get<double>());
    }
  }
  return config;
}

TestEntry parse_test_entry(const Json& spec, const std::string& context) {
  TestEntry entry;
  std::string stat = get_string(spec, "statistic", "cwr");
  if (stat == "wald") {
    check_keys(spec, context, {"statistic", "label"});
    entry.kind = TestEntry::Kind::wald;
    entry.label = get_string(spec, "label", "wald");
    return entry;
  }
  entry.kind = TestEntry::Kind::shift;
  entry.shift = parse_test_spec(spec, context);
  std::string corr = entry.shift.correction == Correction::torus ? "tor" : "var";
  std::string res = entry.shift.residuals == Provenance::nonparametric ? "n" : "p";
  entry.label = get_string(spec, "label", stat + " " + res + ", " + corr);
  return entry;
}

}  // namespace cfg
}  // namespace ptcov

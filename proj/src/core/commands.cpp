#include "core/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "core/common.hpp"
#include "core/fileio.hpp"
#include "core/select.hpp"

namespace ptcov {
namespace {

ScalarField with_window(const ScalarField& field, const Window& window) {
  ScalarField out(field.grid(), window);
  out.values() = field.values();
  return out;
}

struct LoadedCovariates {
  Window window = Window::rectangle(0.0, 0.0, 1.0, 1.0);
  std::vector<ScalarField> fields;
  std::vector<std::string> names;
};

// Loads covariate grids, checks their geometries agree, and rebinds them to
// the analysis window (config override or the grid rectangle).
LoadedCovariates load_covariates(const Json& config, const std::vector<std::string>& paths,
                                 const std::vector<std::string>& names) {
  if (paths.empty()) fail(ErrorKind::invalid_argument, "at least one covariate grid is required");
  LoadedCovariates out;
  out.names = names;
  std::vector<ScalarField> raw;
  for (const std::string& p : paths) raw.push_back(read_asc(p));
  for (std::size_t i = 1; i < raw.size(); ++i)
    if (!raw[i].grid().same_geometry(raw[0].grid()))
      fail(ErrorKind::data, "covariate grid geometry mismatch: " + paths[i] +
                                " does not match " + paths[0]);
  out.window =
      config.contains("window") ? cfg::parse_window(config["window"]) : raw[0].window();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    try {
      out.fields.push_back(with_window(raw[i], out.window));
    } catch (const Error& e) {
      fail(ErrorKind::data, paths[i] + ": " + e.what());
    }
  }
  return out;
}

Json result_to_json(const ShiftTestResult& result) {
  Json j;
  j["p_value"] = result.p_value;
  j["t0"] = result.t0;
  j["statistics"] = result.statistics;
  if (!result.standardized.empty()) j["standardized"] = result.standardized;
  j["areas"] = result.areas;
  j["retained"] = result.retained;
  j["radius"] = result.radius;
  if (result.bandwidth > 0.0) j["bandwidth"] = result.bandwidth;
  return j;
}

void maybe_write_report(const Json& config, const Json& report) {
  if (config.contains("output"))
    write_text_file(config["output"].get<std::string>(), report.dump(2) + "\n");
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", p);
  return buf;
}

}  // namespace

Json cmd_test(const Json& config) {
  cfg::check_keys(config, "test config",
                  {"pattern", "window", "nuisance", "interest", "test", "seed", "output",
                   "lambda_output", "residual_field_output"});
  std::vector<std::string> paths;
  std::vector<std::string> names;
  if (config.contains("nuisance")) {
    if (!config["nuisance"].is_array())
      fail(ErrorKind::invalid_argument, "'nuisance' must be an array of file paths");
    for (const Json& p : config["nuisance"]) {
      paths.push_back(p.get<std::string>());
      names.push_back(p.get<std::string>());
    }
  }
  std::size_t n_nuisance = paths.size();
  paths.push_back(cfg::require_string(config, "interest", "test config"));
  names.push_back(paths.back());

  LoadedCovariates cov = load_covariates(config, paths, names);
  PointPattern pattern =
      read_pattern_csv(cfg::require_string(config, "pattern", "test config"), cov.window);

  std::vector<const ScalarField*> nuisance;
  for (std::size_t i = 0; i < n_nuisance; ++i) nuisance.push_back(&cov.fields[i]);

  Json report;
  report["command"] = "test";
  report["config"] = config;
  report["n_points"] = pattern.size();

  const Json& test_spec = config.contains("test") ? config["test"] : Json::object();
  if (cfg::get_string(test_spec, "statistic", "cwr") == "wald") {
    // Log-linear fit with Wald summary; the interest covariate comes last.
    cfg::check_keys(test_spec, "test", {"statistic", "label"});
    std::vector<const ScalarField*> all = nuisance;
    all.push_back(&cov.fields.back());
    LogLinFit fit = fit_loglinear(pattern, all, cov.fields[0].grid());
    Json fit_json;
    fit_json["coefficients"] = fit.beta;
    Json ses = Json::array(), pvalues = Json::array();
    for (std::size_t i = 0; i < fit.beta.size(); ++i) {
      ses.push_back(std::sqrt(fit.covariance[i][i]));
      pvalues.push_back(i == 0 ? 1.0 : wald_p_value(fit, static_cast<int>(i)));
    }
    fit_json["standard_errors"] = ses;
    fit_json["p_values"] = pvalues;
    fit_json["iterations"] = fit.iterations;
    fit_json["p_value"] = wald_p_value(fit, static_cast<int>(fit.beta.size()) - 1);
    report["result"] = fit_json;
    if (config.contains("lambda_output"))
      write_asc(fit.lambda, config["lambda_output"].get<std::string>());
    maybe_write_report(config, report);
    return report;
  }

  ShiftTestConfig test = cfg::parse_test_spec(test_spec, "test");
  test.seed = static_cast<std::uint64_t>(cfg::get_integer(config, "seed", 0));
  ShiftTestResult result = run_shift_test(pattern, nuisance, cov.fields.back(), test);
  report["result"] = result_to_json(result);

  // Optional diagnostics: fitted intensity and smoothed residual field.
  if (config.contains("lambda_output") || config.contains("residual_field_output")) {
    Provenance provenance = nuisance.empty() ? Provenance::constant : test.residuals;
    ScalarField lambda = fit_intensity(pattern, nuisance, provenance, cov.fields[0].grid());
    if (config.contains("lambda_output"))
      write_asc(lambda, config["lambda_output"].get<std::string>());
    if (config.contains("residual_field_output")) {
      double bw = result.bandwidth > 0.0 ? result.bandwidth : default_bandwidth(cov.window);
      ResidualField s = smoothed_residual_field(pattern, lambda, provenance, KernelSpec{bw});
      write_asc(s.field, config["residual_field_output"].get<std::string>());
    }
  }
  maybe_write_report(config, report);
  return report;
}

Json cmd_corr(const Json& config) {
  cfg::check_keys(config, "corr config",
                  {"pattern", "window", "covariates", "bandwidth", "sampling_points",
                   "bandwidth_candidates", "residuals", "seed", "output"});
  if (!config.contains("covariates") || !config["covariates"].is_array() ||
      config["covariates"].empty())
    fail(ErrorKind::invalid_argument, "'covariates' must be a nonempty array of {name, file}");
  std::vector<std::string> paths, names;
  for (const Json& c : config["covariates"]) {
    cfg::check_keys(c, "covariates entry", {"name", "file"});
    names.push_back(cfg::require_string(c, "name", "covariates entry"));
    paths.push_back(cfg::require_string(c, "file", "covariates entry"));
  }
  LoadedCovariates cov = load_covariates(config, paths, names);
  PointPattern pattern =
      read_pattern_csv(cfg::require_string(config, "pattern", "corr config"), cov.window);

  std::uint64_t seed = static_cast<std::uint64_t>(cfg::get_integer(config, "seed", 0));
  int n_sampling = static_cast<int>(cfg::get_integer(config, "sampling_points", 100));
  Rng sampling_rng = Rng::substream(seed, {stream::sampling});
  SamplingPoints sampling = draw_sampling_points(cov.window, n_sampling, sampling_rng);

  double bandwidth = cfg::get_number(config, "bandwidth", default_bandwidth(cov.window));
  std::string res = cfg::get_string(config, "residuals", "nonparametric");
  Provenance provenance =
      res == "parametric" ? Provenance::parametric : Provenance::nonparametric;

  std::vector<double> candidates;
  if (config.contains("bandwidth_candidates"))
    for (const Json& b : config["bandwidth_candidates"]) candidates.push_back(b.get<double>());

  Json rows = Json::array();
  for (std::size_t k = 0; k < cov.fields.size(); ++k) {
    Json row;
    row["name"] = names[k];
    DependenceResult tau =
        tau_hat(pattern, cov.fields[k], KernelSpec{bandwidth}, sampling);
    row["tau"] = tau.value;
    row["tau_bandwidth"] = tau.bandwidth;
    std::vector<const ScalarField*> others;
    for (std::size_t j = 0; j < cov.fields.size(); ++j)
      if (j != k) others.push_back(&cov.fields[j]);
    DependenceResult taup =
        tau_partial(pattern, others, cov.fields[k], provenance, 0.0, candidates, sampling);
    row["tau_partial"] = taup.value;
    row["tau_partial_bandwidth"] = taup.bandwidth;
    rows.push_back(row);
  }

  Json report;
  report["command"] = "corr";
  report["config"] = config;
  report["n_points"] = pattern.size();
  report["sampling_points"] = n_sampling;
  report["results"] = rows;
  maybe_write_report(config, report);
  return report;
}

namespace {

std::string selection_table(const SelectionTrace& trace,
                            const std::vector<std::string>& all_names) {
  std::ostringstream out;
  std::size_t width = 10;
  for (const std::string& n : all_names) width = std::max(width, n.size() + 2);
  out << std::string(width, ' ');
  for (std::size_t s = 0; s < trace.stages.size(); ++s) {
    std::string head = "stage " + std::to_string(s + 1);
    out << head << std::string(head.size() < 10 ? 10 - head.size() : 1, ' ');
  }
  out << '\n';
  for (const std::string& name : all_names) {
    out << name << std::string(width - name.size(), ' ');
    for (const SelectionStage& stage : trace.stages) {
      auto it = std::find(stage.active.begin(), stage.active.end(), name);
      if (it == stage.active.end()) {
        out << "--" << std::string(8, ' ');
      } else {
        std::size_t idx = static_cast<std::size_t>(it - stage.active.begin());
        std::string cell = format_p(stage.p_values[idx]);
        if (stage.removed == name) cell += "*";
        out << cell << std::string(cell.size() < 10 ? 10 - cell.size() : 1, ' ');
      }
    }
    out << '\n';
  }
  out << "(* removed at that stage)\n";
  return out.str();
}

}  // namespace

Json cmd_select(const Json& config) {
  cfg::check_keys(config, "select config",
                  {"pattern", "window", "covariates", "test", "alpha", "seed", "output"});
  if (!config.contains("covariates") || !config["covariates"].is_array() ||
      config["covariates"].empty())
    fail(ErrorKind::invalid_argument, "'covariates' must be a nonempty array of {name, file}");
  std::vector<std::string> paths, names;
  for (const Json& c : config["covariates"]) {
    cfg::check_keys(c, "covariates entry", {"name", "file"});
    names.push_back(cfg::require_string(c, "name", "covariates entry"));
    paths.push_back(cfg::require_string(c, "file", "covariates entry"));
  }
  LoadedCovariates cov = load_covariates(config, paths, names);
  PointPattern pattern =
      read_pattern_csv(cfg::require_string(config, "pattern", "select config"), cov.window);

  ShiftTestConfig test = cfg::parse_test_spec(
      config.contains("test") ? config["test"] : Json::object(), "test");
  test.seed = static_cast<std::uint64_t>(cfg::get_integer(config, "seed", 0));
  double alpha = cfg::get_number(config, "alpha", 0.05);

  std::vector<NamedCovariate> named;
  for (std::size_t i = 0; i < cov.fields.size(); ++i)
    named.push_back(NamedCovariate{names[i], &cov.fields[i]});
  SelectionTrace trace = backward_select(pattern, named, test, alpha);

  Json stages = Json::array();
  for (const SelectionStage& s : trace.stages) {
    Json stage;
    stage["active"] = s.active;
    stage["p_values"] = s.p_values;
    stage["removed"] = s.removed;
    stages.push_back(stage);
  }
  Json report;
  report["command"] = "select";
  report["config"] = config;
  report["alpha"] = alpha;
  report["stages"] = stages;
  report["final_set"] = trace.final_set;
  std::vector<std::string> sorted_names = names;
  std::sort(sorted_names.begin(), sorted_names.end());
  report["table"] = selection_table(trace, sorted_names);
  maybe_write_report(config, report);
  return report;
}

Json cmd_simulate(const Json& config) {
  cfg::check_keys(config, "simulate config",
                  {"model", "a", "b", "seed", "grid", "window", "gibbs_proposals", "output_dir"});
  std::string model = cfg::require_string(config, "model", "simulate config");
  std::optional<double> a, b;
  if (config.contains("a")) a = cfg::require_number(config, "a", "simulate config");
  if (config.contains("b")) b = cfg::require_number(config, "b", "simulate config");
  ModelSpec spec = catalog_model(model, a, b);

  Window window = config.contains("window") ? cfg::parse_window(config["window"])
                                            : Window::rectangle(0.0, 0.0, 1.0, 1.0);
  int ncols = 128, nrows = 128;
  if (config.contains("grid")) {
    cfg::check_keys(config["grid"], "grid", {"ncols", "nrows"});
    ncols = static_cast<int>(cfg::get_integer(config["grid"], "ncols", 128));
    nrows = static_cast<int>(cfg::get_integer(config["grid"], "nrows", 128));
  }
  GridSpec grid = GridSpec::covering(window, ncols, nrows);

  GibbsConfig gibbs;
  gibbs.proposals = cfg::get_integer(config, "gibbs_proposals", gibbs.proposals);

  std::uint64_t seed = static_cast<std::uint64_t>(cfg::get_integer(config, "seed", 0));
  Rng field_rng = Rng::substream(seed, {stream::fields, 0});
  Rng pattern_rng = Rng::substream(seed, {stream::pattern, 0});
  SimulationOutput sim = simulate_model(spec, grid, window, field_rng, pattern_rng, gibbs);

  std::string dir = cfg::require_string(config, "output_dir", "simulate config");
  std::filesystem::create_directories(dir);
  std::string pattern_path = dir + "/pattern.csv";
  std::string c1_path = dir + "/c1.asc";
  std::string c2_path = dir + "/c2.asc";
  write_pattern_csv(sim.pattern, pattern_path);
  write_asc(sim.c1, c1_path);
  write_asc(sim.c2, c2_path);

  Json report;
  report["command"] = "simulate";
  report["config"] = config;
  report["model"] = model;
  report["n_points"] = sim.pattern.size();
  report["files"] = Json{{"pattern", pattern_path}, {"c1", c1_path}, {"c2", c2_path}};
  return report;
}

Json cmd_replicate(const Json& config) {
  cfg::check_keys(config, "replicate config",
                  {"model", "a", "b", "replications", "alpha", "seed", "grid", "window", "threads",
                   "gibbs_proposals", "tests", "output", "table_output"});
  ReplicateConfig rc;
  rc.model = cfg::require_string(config, "model", "replicate config");
  if (config.contains("a")) rc.a = cfg::require_number(config, "a", "replicate config");
  if (config.contains("b")) rc.b = cfg::require_number(config, "b", "replicate config");
  rc.replications = static_cast<int>(cfg::get_integer(config, "replications", 100));
  rc.alpha = cfg::get_number(config, "alpha", 0.05);
  rc.seed = static_cast<std::uint64_t>(cfg::get_integer(config, "seed", 0));
  rc.threads = static_cast<int>(cfg::get_integer(config, "threads", 0));
  rc.gibbs.proposals = cfg::get_integer(config, "gibbs_proposals", rc.gibbs.proposals);
  if (config.contains("window")) rc.window = cfg::parse_window(config["window"]);
  if (config.contains("grid")) {
    cfg::check_keys(config["grid"], "grid", {"ncols", "nrows"});
    rc.grid_ncols = static_cast<int>(cfg::get_integer(config["grid"], "ncols", 128));
    rc.grid_nrows = static_cast<int>(cfg::get_integer(config["grid"], "nrows", 128));
  }
  if (!config.contains("tests") || !config["tests"].is_array() || config["tests"].empty())
    fail(ErrorKind::invalid_argument, "'tests' must be a nonempty array");
  for (const Json& t : config["tests"])
    rc.tests.push_back(cfg::parse_test_entry(t, "tests entry"));

  std::vector<RejectionRow> rows = run_replicate(rc);

  Json jrows = Json::array();
  std::ostringstream table;
  table << "label,rejection_fraction,band_lo,band_hi,replications\n";
  for (const RejectionRow& r : rows) {
    Json row;
    row["label"] = r.label;
    row["rejection_fraction"] = r.fraction;
    row["band"] = Json::array({r.band_lo, r.band_hi});
    row["replications"] = r.replications;
    jrows.push_back(row);
    table << r.label << ',' << r.fraction << ',' << r.band_lo << ',' << r.band_hi << ','
          << r.replications << '\n';
  }
  if (config.contains("table_output"))
    write_text_file(config["table_output"].get<std::string>(), table.str());

  Json report;
  report["command"] = "replicate";
  report["config"] = config;
  report["model"] = rc.model;
  report["alpha"] = rc.alpha;
  report["replications"] = rc.replications;
  report["rows"] = jrows;
  maybe_write_report(config, report);
  return report;
}

Json run_command(const std::string& command, const Json& config) {
  if (command == "test") return cmd_test(config);
  if (command == "corr") return cmd_corr(config);
  if (command == "select") return cmd_select(config);
  if (command == "simulate") return cmd_simulate(config);
  if (command == "replicate") return cmd_replicate(config);
  fail(ErrorKind::invalid_argument, "unknown command: " + command);
}

}  // namespace ptcov

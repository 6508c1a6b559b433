// Command-line front end for the ptcov shared library. Only the public C
// interface is used here; all analysis work happens behind it.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "ptcov/ptcov.h"

namespace {

int exit_code_for(ptcov_status status) {
  switch (status) {
    case PTCOV_OK:
      return 0;
    case PTCOV_ERR_ARGUMENT:
    case PTCOV_ERR_IO:
    case PTCOV_ERR_DATA:
      return 2;
    default:
      return 1;
  }
}

int run(const std::string& command, const std::string& config_path, const std::string& out_path,
        bool quiet) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "ptcov: cannot open config file: " << config_path << "\n";
    return 2;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string config = ss.str();

  char* report = nullptr;
  ptcov_status status = ptcov_run_command(command.c_str(), config.c_str(), &report);
  if (status != PTCOV_OK) {
    std::cerr << "ptcov: " << ptcov_last_error() << "\n";
    return exit_code_for(status);
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "ptcov: cannot write " << out_path << "\n";
      ptcov_string_free(report);
      return 2;
    }
    out << report;
  } else if (!quiet) {
    std::fputs(report, stdout);
  }
  ptcov_string_free(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric covariate significance testing for spatial point patterns"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"test", "Random shift test of one covariate against a point pattern"},
      {"corr", "Correlation and partial correlation coefficients per covariate"},
      {"select", "Backward covariate selection by repeated shift tests"},
      {"simulate", "Draw one realization of a catalog model"},
      {"replicate", "Replicated simulation experiment with a rejection-rate table"},
  };

  std::string config_path, out_path;
  bool quiet = false;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("-c,--config", config_path, "Run-config JSON document")->required();
    sub->add_option("-o,--out", out_path, "Write the JSON report here instead of stdout");
    sub->add_flag("-q,--quiet", quiet, "Suppress the report on stdout");
  }

  CLI11_PARSE(app, argc, argv);
  return run(app.get_subcommands().front()->get_name(), config_path, out_path, quiet);
}

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "deltagreen/cli/run.hpp"

int main(int argc, char** argv) {
  using namespace deltagreen::cli;

  CLI::App app{"Green functions and bound states of delta impurities in 1D"};
  std::string config_path;
  std::string out_path;
  std::string format;
  unsigned threads = 0;
  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--threads", threads, "worker threads (default all)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  Overrides overrides;
  if (!out_path.empty()) overrides.output_path = out_path;
  if (!format.empty()) overrides.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  if (app.count("--threads")) overrides.threads = threads;
  return run_file(config_path, overrides, std::cout, std::cerr);
}

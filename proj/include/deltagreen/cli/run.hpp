#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "deltagreen/cli/config.hpp"

namespace deltagreen::cli {

using Cell = std::variant<double, std::int64_t>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3 };

// Runs the command. Library errors propagate.
Table execute(const RunConfig& config);

// CSV with the resolved config as a "# " comment header, or a JSON document
// {config, command, columns, rows}. Doubles use 17 significant digits.
std::string render(const RunConfig& config, const Table& table);

std::string format_double(double v);

// Writes to a sibling temporary file and renames it over path.
void write_atomic(const std::string& path, const std::string& content);

// Executes, renders and writes (to out when no output path is set). Errors become an exit
// code and a one-line JSON record on err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct Overrides {
  std::optional<std::string> output_path;
  std::optional<OutputFormat> format;
  std::optional<unsigned> threads;
};

// Reads and parses the config file, applies command-line overrides, then runs.
int run_file(const std::string& config_path, const Overrides& overrides, std::ostream& out,
             std::ostream& err);

}  // namespace deltagreen::cli

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "deltagreen/kronig_penney.hpp"
#include "deltagreen/types.hpp"

namespace deltagreen::cli {

// Structural problem in the document; what() starts with the JSON path of the offending key.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed document whose values break an invariant.
class ValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalCommand {
  std::vector<std::pair<double, double>> points;
  std::vector<double> energies;
  double eta = 1e-8;
};

struct SpectrumCommand {
  double e_min = 0.0;
  double e_max = 0.0;
  std::size_t samples = 2000;
  double tol = 1e-10;
};

struct CoalesceCommand {
  double position = 0.0;
  double first_strength = 0.0;
  double second_strength = 0.0;
  std::vector<double> offsets;
  double e_min = 0.0;
  double e_max = 0.0;
  std::size_t samples = 2000;
  double tol = 1e-10;
};

struct KpCommand {
  CombSpec comb;
  double e_min = 0.0;
  double e_max = 0.0;
  std::size_t samples = 0;  // 0: max(2000, 400 * count)
  double tol = 1e-10;
};

struct ValidateCommand {
  double e_min = 0.0;
  double e_max = 0.0;
  std::size_t grid_points = 4000;
  double half_width = 0.0;  // 0: 20 on the free line, 12 for the oscillator
  std::size_t samples = 2000;
  double tol = 1e-10;
};

using Command = std::variant<EvalCommand, SpectrumCommand, CoalesceCommand, KpCommand, ValidateCommand>;

enum class OutputFormat { Csv, Json };

struct RunConfig {
  BaseSystem base;
  std::vector<Impurity> impurities;
  Command command;
  std::optional<std::string> output_path;  // stdout when empty
  OutputFormat format = OutputFormat::Csv;
  unsigned threads = 0;

  DecoratedSystem system() const { return {base, impurities}; }
  std::string command_name() const;
};

// Strict: unknown keys, missing physics parameters and wrong types raise SchemaError;
// violated invariants raise ValueError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);

// Fully resolved document (defaults included); parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

}  // namespace deltagreen::cli

#include "deltagreen/cli/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "deltagreen/errors.hpp"
#include "deltagreen/impurity_solver.hpp"
#include "deltagreen/kronig_penney.hpp"
#include "deltagreen/oracle.hpp"
#include "deltagreen/spectrum.hpp"

namespace deltagreen::cli {

using nlohmann::json;

namespace {

SpectrumOptions scan_options(std::size_t samples, double tol, unsigned threads) {
  SpectrumOptions o;
  o.samples = samples;
  o.tol = tol;
  o.threads = threads;
  return o;
}

const double kNan = std::nan("");

Table eval_table(const RunConfig& cfg, const EvalCommand& c) {
  Table t{{"x", "x_prime", "E_re", "E_im", "G_re", "G_im", "cond"}, {}};
  const DecoratedSystem sys = cfg.system();
  for (double e : c.energies) {
    for (const auto& [x, xp] : c.points) {
      const GreenValue g = decorated_green(sys, x, xp, EnergyArg(e, c.eta));
      t.rows.push_back({x, xp, e, c.eta, g.value.real(), g.value.imag(), g.condition_estimate});
    }
  }
  return t;
}

Table spectrum_table(const RunConfig& cfg, const SpectrumCommand& c) {
  Table t{{"index", "E_root", "bracket_width", "absD", "marginal"}, {}};
  const SpectrumReport rep =
      find_spectrum(cfg.system(), c.e_min, c.e_max, scan_options(c.samples, c.tol, cfg.threads));
  std::int64_t k = 0;
  for (const auto& r : rep.roots)
    t.rows.push_back({k++, r.energy, r.bracket_width, r.abs_d, std::int64_t{r.marginal}});
  return t;
}

Table coalesce_table(const RunConfig& cfg, const CoalesceCommand& c) {
  Table t{{"epsilon", "E_root", "E_combined", "abs_err"}, {}};
  const CoalescenceTable tab =
      coalescence_sweep(cfg.base, c.position, c.first_strength, c.second_strength, c.offsets, c.e_min,
                        c.e_max, scan_options(c.samples, c.tol, cfg.threads));
  for (const auto& row : tab.rows)
    t.rows.push_back({row.offset, row.lowest_root, tab.combined_root, std::abs(row.lowest_root - tab.combined_root)});
  return t;
}

Table kp_table(const RunConfig& cfg, const KpCommand& c) {
  Table t{{"index", "E_root", "in_band", "band_index"}, {}};
  const BandReport rep =
      finite_band_roots(c.comb, c.e_min, c.e_max, scan_options(c.samples, c.tol, cfg.threads));
  for (std::size_t k = 0; k < rep.roots.size(); ++k)
    t.rows.push_back({static_cast<std::int64_t>(k), rep.roots[k], std::int64_t{rep.in_band[k]},
                      std::int64_t{rep.band_index[k]}});
  return t;
}

Table validate_table(const RunConfig& cfg, const ValidateCommand& c) {
  Table t{{"E_root", "E_oracle", "deviation"}, {}};
  const DecoratedSystem sys = cfg.system();
  const SpectrumReport rep =
      find_spectrum(sys, c.e_min, c.e_max, scan_options(c.samples, c.tol, cfg.threads));
  const GridHamiltonian grid = discretize(sys, c.grid_points, c.half_width);
  const OracleReport cmp = compare_with_oracle(rep.energies(false), grid, c.e_min, c.e_max);
  for (const auto& p : cmp.pairs)
    t.rows.push_back({p.root.value_or(kNan), p.eigenvalue.value_or(kNan), p.deviation});
  return t;
}

json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  const double v = std::get<double>(c);
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return format_double(std::get<double>(c));
}

void error_record(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Table execute(const RunConfig& config) {
  config.system().validate();
  return std::visit(
      [&](const auto& c) -> Table {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, EvalCommand>) return eval_table(config, c);
        else if constexpr (std::is_same_v<T, SpectrumCommand>) return spectrum_table(config, c);
        else if constexpr (std::is_same_v<T, CoalesceCommand>) return coalesce_table(config, c);
        else if constexpr (std::is_same_v<T, KpCommand>) return kp_table(config, c);
        else return validate_table(config, c);
      },
      config.command);
}

std::string render(const RunConfig& config, const Table& table) {
  const json resolved = to_json(config);
  if (config.format == OutputFormat::Json) {
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const auto& c : row) r.push_back(cell_json(c));
      rows.push_back(std::move(r));
    }
    json doc = {{"config", resolved}, {"command", config.command_name()}, {"columns", table.columns}, {"rows", rows}};
    return doc.dump(2) + "\n";
  }

  std::ostringstream os;
  os << "# deltagreen " << config.command_name() << "\n";
  std::istringstream lines(resolved.dump(2));
  for (std::string line; std::getline(lines, line);) os << "# " << line << "\n";
  for (std::size_t k = 0; k < table.columns.size(); ++k) os << (k ? "," : "") << table.columns[k];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << cell_text(row[k]);
    os << "\n";
  }
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    text = render(config, execute(config));
  } catch (const Error& e) {
    const bool validation = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::ImpurityOutsideDomain;
    const int code = validation ? kExitValidation : kExitNumeric;
    error_record(err, to_string(e.code()), e.what(), code);
    return code;
  }
  try {
    if (config.output_path) write_atomic(*config.output_path, text);
    else out << text << std::flush;
  } catch (const std::exception& e) {
    error_record(err, "OutputError", e.what(), kExitNumeric);
    return kExitNumeric;
  }
  return kExitOk;
}

int run_file(const std::string& config_path, const Overrides& overrides, std::ostream& out,
             std::ostream& err) {
  RunConfig cfg;
  try {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) throw SchemaError("cannot read config file " + config_path);
    std::ostringstream buf;
    buf << f.rdbuf();
    cfg = parse_config_text(buf.str());
  } catch (const SchemaError& e) {
    error_record(err, "SchemaError", e.what(), kExitValidation);
    return kExitValidation;
  } catch (const ValueError& e) {
    error_record(err, "ValueError", e.what(), kExitValidation);
    return kExitValidation;
  }
  if (overrides.output_path) cfg.output_path = overrides.output_path;
  if (overrides.format) cfg.format = *overrides.format;
  if (overrides.threads) cfg.threads = *overrides.threads;
  return run(cfg, out, err);
}

}  // namespace deltagreen::cli

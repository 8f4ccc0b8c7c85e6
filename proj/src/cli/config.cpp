#include "deltagreen/cli/config.hpp"

#include <cmath>
#include <set>

#include "deltagreen/errors.hpp"

namespace deltagreen::cli {

using nlohmann::json;

namespace {

// Object reader that remembers which keys were consumed so leftovers can be rejected.
class Block {
 public:
  Block(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw SchemaError(path_ + ": expected an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return node_.contains(key); }
  std::string child(const std::string& key) const { return path_ + "." + key; }

  const json& raw(const std::string& key) {
    auto it = node_.find(key);
    if (it == node_.end()) throw SchemaError(child(key) + ": missing required key");
    seen_.insert(key);
    return *it;
  }

  double number(const std::string& key) { return as_number(raw(key), child(key)); }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::size_t count(const std::string& key) { return as_count(raw(key), child(key)); }
  std::size_t count(const std::string& key, std::size_t fallback) { return has(key) ? count(key) : fallback; }

  std::string text(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw SchemaError(child(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw SchemaError(child(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(as_number(v[i], child(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  Block object(const std::string& key) { return Block(raw(key), child(key)); }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      (void)value;
      if (!seen_.count(key)) throw SchemaError(child(key) + ": unknown key");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValueError(path + ": must be finite");
    return x;
  }

  static std::size_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
      throw SchemaError(path + ": expected a non-negative integer");
    return static_cast<std::size_t>(v.get<std::int64_t>());
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& msg) {
  if (!ok) throw ValueError(msg);
}

void check_window(double lo, double hi, const std::string& path) {
  check(lo < hi, path + ": E_min must be below E_max");
}

void check_scan(std::size_t samples, double tol, const std::string& path) {
  check(samples >= 2, path + ".samples: need at least 2");
  check(tol > 0.0, path + ".tol: must be positive");
}

KernelOptions parse_kernel(Block b) {
  KernelOptions k;
  k.pole_window_rel = b.number("pole_window_rel", k.pole_window_rel);
  k.pole_window_abs = b.number("pole_window_abs", k.pole_window_abs);
  k.ho_window = b.number("ho_window", k.ho_window);
  k.ho_tail_tol = b.number("ho_tail_tol", k.ho_tail_tol);
  k.ho_reference_energy = b.number("ho_reference_energy", k.ho_reference_energy);
  k.ho_subtractions = static_cast<int>(b.count("ho_subtractions", static_cast<std::size_t>(k.ho_subtractions)));
  b.finish();
  check(k.pole_window_rel >= 0.0 && k.pole_window_abs > 0.0, b.path() + ": pole windows must be positive");
  check(k.ho_window > 0.0 && k.ho_tail_tol > 0.0, b.path() + ": oscillator window and tail tolerance must be positive");
  check(k.ho_reference_energy < 1.0, b.path() + ".ho_reference_energy: must lie below the ground state");
  check(k.ho_subtractions <= 8, b.path() + ".ho_subtractions: at most 8");
  return k;
}

BaseSystem parse_base(Block b) {
  const std::string kind = b.text("kind");
  KernelOptions opts;
  if (b.has("kernel")) opts = parse_kernel(b.object("kernel"));
  BaseSystem base;
  try {
    if (kind == "free_line") {
      base = BaseSystem::free_line(opts);
    } else if (kind == "box") {
      const double length = b.number("length");
      check(length > 0.0, b.child("length") + ": must be positive");
      base = BaseSystem::box(length, opts);
    } else if (kind == "harmonic_oscillator") {
      const std::size_t nmax = b.count("nmax", 400);
      check(nmax >= 1 && nmax <= 100000, b.child("nmax") + ": must be in [1, 100000]");
      base = BaseSystem::harmonic_oscillator(static_cast<int>(nmax), opts);
    } else {
      throw SchemaError(b.child("kind") + ": expected free_line, box or harmonic_oscillator");
    }
  } catch (const Error& e) {
    throw ValueError(b.path() + ": " + e.what());
  }
  b.finish();
  return base;
}

std::vector<Impurity> parse_impurities(const json& node, const BaseSystem& base) {
  if (!node.is_array()) throw SchemaError("$.impurities: expected an array");
  std::vector<Impurity> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    Block b(node[i], "$.impurities[" + std::to_string(i) + "]");
    Impurity imp{b.number("position"), b.number("strength")};
    b.finish();
    if (!base.contains_impurity(imp.position))
      throw ValueError("impurity " + std::to_string(i) + " at position " + std::to_string(imp.position) +
                       " lies outside the " + base.name() + " domain");
    out.push_back(imp);
  }
  return out;
}

EvalCommand parse_eval(Block b, const BaseSystem& base) {
  EvalCommand c;
  const json& pts = b.raw("points");
  if (!pts.is_array()) throw SchemaError(b.child("points") + ": expected an array of [x, x_prime] pairs");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string p = b.child("points") + "[" + std::to_string(i) + "]";
    if (!pts[i].is_array() || pts[i].size() != 2) throw SchemaError(p + ": expected [x, x_prime]");
    const double x = Block::as_number(pts[i][0], p + "[0]");
    const double xp = Block::as_number(pts[i][1], p + "[1]");
    check(base.contains(x) && base.contains(xp), p + ": point outside the " + base.name() + " domain");
    c.points.emplace_back(x, xp);
  }
  c.energies = b.numbers("energies");
  c.eta = b.number("eta", c.eta);
  b.finish();
  check(!c.points.empty() && !c.energies.empty(), b.path() + ": points and energies must be non-empty");
  check(c.eta >= 0.0, b.child("eta") + ": must be >= 0");
  return c;
}

SpectrumCommand parse_spectrum(Block b) {
  SpectrumCommand c;
  c.e_min = b.number("E_min");
  c.e_max = b.number("E_max");
  c.samples = b.count("samples", c.samples);
  c.tol = b.number("tol", c.tol);
  b.finish();
  check_window(c.e_min, c.e_max, b.path());
  check_scan(c.samples, c.tol, b.path());
  return c;
}

CoalesceCommand parse_coalesce(Block b, const BaseSystem& base) {
  CoalesceCommand c;
  c.position = b.number("position");
  const std::vector<double> strengths = b.numbers("strengths");
  if (strengths.size() != 2) throw SchemaError(b.child("strengths") + ": expected [first, second]");
  c.first_strength = strengths[0];
  c.second_strength = strengths[1];
  c.offsets = b.numbers("offsets");
  c.e_min = b.number("E_min");
  c.e_max = b.number("E_max");
  c.samples = b.count("samples", c.samples);
  c.tol = b.number("tol", c.tol);
  b.finish();
  check_window(c.e_min, c.e_max, b.path());
  check_scan(c.samples, c.tol, b.path());
  check(!c.offsets.empty(), b.child("offsets") + ": must be non-empty");
  for (std::size_t i = 0; i < c.offsets.size(); ++i) {
    const std::string p = b.child("offsets") + "[" + std::to_string(i) + "]";
    check(c.offsets[i] >= 0.0, p + ": must be >= 0");
    check(i == 0 || c.offsets[i] < c.offsets[i - 1], p + ": offsets must be strictly descending");
    check(base.contains_impurity(c.position + c.offsets[i]), p + ": second impurity leaves the domain");
  }
  check(base.contains_impurity(c.position), b.child("position") + ": outside the " + base.name() + " domain");
  return c;
}

KpCommand parse_kp(Block b) {
  KpCommand c;
  c.comb.count = b.count("count");
  c.comb.spacing = b.number("spacing");
  if (b.has("strength")) c.comb.strength = b.number("strength");
  if (b.has("strengths")) c.comb.strengths = b.numbers("strengths");
  if (b.has("positions")) c.comb.positions = b.numbers("positions");
  if (b.has("random")) {
    Block r = b.object("random");
    RandomComb rc;
    const json& seed = r.raw("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
      throw SchemaError(r.child("seed") + ": expected a non-negative integer");
    rc.seed = seed.get<std::uint64_t>();
    rc.strength_min = r.number("strength_min");
    rc.strength_max = r.number("strength_max");
    rc.position_jitter = r.number("position_jitter", 0.0);
    r.finish();
    check(rc.strength_min <= rc.strength_max, r.path() + ": strength_min must not exceed strength_max");
    check(rc.position_jitter >= 0.0, r.child("position_jitter") + ": must be >= 0");
    c.comb.random = rc;
  }
  c.e_min = b.number("E_min");
  c.e_max = b.number("E_max", 0.0);
  c.samples = b.count("samples", 0);
  c.tol = b.number("tol", c.tol);
  b.finish();

  const int sources = c.comb.strength.has_value() + !c.comb.strengths.empty() + c.comb.random.has_value();
  if (sources != 1) throw SchemaError(b.path() + ": need exactly one of strength, strengths, random");
  check(c.comb.count >= 1, b.child("count") + ": must be >= 1");
  check(c.comb.spacing > 0.0, b.child("spacing") + ": must be positive");
  check(c.comb.strengths.empty() || c.comb.strengths.size() == c.comb.count,
        b.child("strengths") + ": needs one entry per impurity");
  check(c.comb.positions.empty() || c.comb.positions.size() == c.comb.count,
        b.child("positions") + ": needs one entry per impurity");
  check_window(c.e_min, c.e_max, b.path());
  check(c.e_max <= 0.0, b.child("E_max") + ": must be <= 0");
  if (c.samples == 0) c.samples = std::max<std::size_t>(2000, 400 * c.comb.count);
  check_scan(c.samples, c.tol, b.path());
  return c;
}

ValidateCommand parse_validate(Block b, const BaseSystem& base) {
  ValidateCommand c;
  c.e_min = b.number("E_min");
  c.e_max = b.number("E_max");
  c.grid_points = b.count("grid_points", c.grid_points);
  c.half_width = b.number("half_width", base.is_box() ? 0.0 : (base.is_oscillator() ? 12.0 : 20.0));
  c.samples = b.count("samples", c.samples);
  c.tol = b.number("tol", c.tol);
  b.finish();
  check_window(c.e_min, c.e_max, b.path());
  check_scan(c.samples, c.tol, b.path());
  check(c.grid_points >= 64, b.child("grid_points") + ": need at least 64");
  check(base.is_box() || c.half_width > 0.0, b.child("half_width") + ": must be positive");
  return c;
}

const char* format_name(OutputFormat f) { return f == OutputFormat::Json ? "json" : "csv"; }

}  // namespace

std::string RunConfig::command_name() const {
  static const char* names[] = {"eval", "spectrum", "coalesce", "kp", "validate"};
  return names[command.index()];
}

RunConfig parse_config(const json& doc) {
  Block top(doc, "$");
  static const std::set<std::string> known = {"base", "impurities", "eval", "spectrum", "coalesce",
                                               "kp", "validate", "output"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!known.count(key)) throw SchemaError("$." + key + ": unknown key");
  }
  RunConfig cfg;
  cfg.base = parse_base(top.object("base"));
  cfg.impurities = top.has("impurities") ? parse_impurities(top.raw("impurities"), cfg.base)
                                         : std::vector<Impurity>{};

  static const char* commands[] = {"eval", "spectrum", "coalesce", "kp", "validate"};
  std::vector<std::string> present;
  for (const char* c : commands)
    if (top.has(c)) present.emplace_back(c);
  if (present.empty()) throw SchemaError("$: missing command block (eval, spectrum, coalesce, kp or validate)");
  if (present.size() > 1) throw SchemaError("$." + present[1] + ": only one command block allowed, found " + present[0] + " too");

  const std::string& name = present.front();
  Block cmd = top.object(name);
  if (name == "eval") {
    cfg.command = parse_eval(std::move(cmd), cfg.base);
  } else if (name == "spectrum") {
    cfg.command = parse_spectrum(std::move(cmd));
  } else if (name == "coalesce") {
    cfg.command = parse_coalesce(std::move(cmd), cfg.base);
  } else if (name == "kp") {
    cfg.command = parse_kp(std::move(cmd));
    if (!cfg.base.is_free_line() || !cfg.impurities.empty())
      throw ValueError("$.kp: the comb lives on a free line with no extra impurities");
  } else {
    cfg.command = parse_validate(std::move(cmd), cfg.base);
  }
  if (name == "coalesce" && !cfg.impurities.empty())
    throw ValueError("$.impurities: coalesce places its own pair, the list must be empty");
  if ((name == "spectrum" || name == "validate") && cfg.impurities.empty())
    throw ValueError("$.impurities: " + name + " needs at least one impurity");

  if (top.has("output")) {
    Block out = top.object("output");
    if (out.has("path")) cfg.output_path = out.text("path");
    if (out.has("format")) {
      const std::string f = out.text("format");
      if (f == "csv") cfg.format = OutputFormat::Csv;
      else if (f == "json") cfg.format = OutputFormat::Json;
      else throw SchemaError(out.child("format") + ": expected csv or json");
    }
    out.finish();
  }
  top.finish();
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("$: not a valid JSON document: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& config) {
  json doc;
  const KernelOptions& k = config.base.options();
  json base = {{"kind", "free_line"}};
  if (const auto* box = std::get_if<Box>(&config.base.kind())) base = {{"kind", "box"}, {"length", box->length}};
  if (const auto* ho = std::get_if<HarmonicOscillator>(&config.base.kind()))
    base = {{"kind", "harmonic_oscillator"}, {"nmax", ho->nmax}};
  base["kernel"] = {{"pole_window_rel", k.pole_window_rel},
                    {"pole_window_abs", k.pole_window_abs},
                    {"ho_window", k.ho_window},
                    {"ho_tail_tol", k.ho_tail_tol},
                    {"ho_reference_energy", k.ho_reference_energy},
                    {"ho_subtractions", k.ho_subtractions}};
  doc["base"] = base;

  json imps = json::array();
  for (const auto& imp : config.impurities) imps.push_back({{"position", imp.position}, {"strength", imp.strength}});
  doc["impurities"] = imps;

  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        json b;
        if constexpr (std::is_same_v<T, EvalCommand>) {
          json pts = json::array();
          for (const auto& [x, xp] : c.points) pts.push_back({x, xp});
          b = {{"points", pts}, {"energies", c.energies}, {"eta", c.eta}};
        } else if constexpr (std::is_same_v<T, SpectrumCommand>) {
          b = {{"E_min", c.e_min}, {"E_max", c.e_max}, {"samples", c.samples}, {"tol", c.tol}};
        } else if constexpr (std::is_same_v<T, CoalesceCommand>) {
          b = {{"position", c.position}, {"strengths", {c.first_strength, c.second_strength}},
               {"offsets", c.offsets}, {"E_min", c.e_min}, {"E_max", c.e_max},
               {"samples", c.samples}, {"tol", c.tol}};
        } else if constexpr (std::is_same_v<T, KpCommand>) {
          b = {{"count", c.comb.count}, {"spacing", c.comb.spacing}, {"E_min", c.e_min},
               {"E_max", c.e_max}, {"samples", c.samples}, {"tol", c.tol}};
          if (c.comb.strength) b["strength"] = *c.comb.strength;
          if (!c.comb.strengths.empty()) b["strengths"] = c.comb.strengths;
          if (!c.comb.positions.empty()) b["positions"] = c.comb.positions;
          if (c.comb.random)
            b["random"] = {{"seed", c.comb.random->seed},
                           {"strength_min", c.comb.random->strength_min},
                           {"strength_max", c.comb.random->strength_max},
                           {"position_jitter", c.comb.random->position_jitter}};
        } else {
          b = {{"E_min", c.e_min}, {"E_max", c.e_max}, {"grid_points", c.grid_points},
               {"half_width", c.half_width}, {"samples", c.samples}, {"tol", c.tol}};
        }
        doc[config.command_name()] = b;
      },
      config.command);

  json out = {{"format", format_name(config.format)}};
  if (config.output_path) out["path"] = *config.output_path;
  doc["output"] = out;
  return doc;
}

}  // namespace deltagreen::cli

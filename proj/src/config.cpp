#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string_view>

#include "qwalk/cli.hpp"

namespace qwalk {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::size_t end = comma == std::string::npos ? value.size() : comma;
    const std::string item = trim(std::string_view(value).substr(start, end - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (!v.empty()) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() + v.size() && std::isfinite(x)) return x;
  }
  throw ConfigError(key + ": expected a finite number, got '" + value + "'");
}

long parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (!v.empty()) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() + v.size()) return x;
  }
  throw ConfigError(key + ": expected an integer, got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) {
    out.push_back(parse_double(key, item));
  }
  return out;
}

std::vector<Model> parse_model_list(const std::string& key,
                                    const std::string& value) {
  std::vector<Model> out;
  for (const auto& item : split_list(value)) {
    auto m = model_from_name(item);
    if (!m) {
      throw ConfigError(key + ": unknown model '" + item +
                        "' (expected full_gpe, full_linear_chain, rate, "
                        "rate_selfconsistent, analytic, incoherent_formula)");
    }
    out.push_back(*m);
  }
  return out;
}

bool is_none(const std::string& value) {
  const std::string v = trim(value);
  return v.empty() || v == "none" || v == "null" || v == "off";
}

// Bare names accepted by --set and flat files, mapped to dotted keys.
std::string canonical_key(const std::string& key) {
  static const std::pair<std::string_view, std::string_view> kAliases[] = {
      {"v", "lattice.v"},
      {"v_prime", "lattice.v_prime"},
      {"gamma", "lattice.gamma"},
      {"g", "lattice.g"},
      {"eps_a", "lattice.eps_a"},
      {"eps_b", "lattice.eps_b"},
      {"delta", "lattice.delta_offset"},
      {"delta_offset", "lattice.delta_offset"},
      {"n_cells", "lattice.n_cells"},
      {"rel_tol", "integrator.rel_tol"},
      {"abs_tol", "integrator.abs_tol"},
      {"t_final", "integrator.t_final"},
      {"max_step", "integrator.max_step"},
      {"n_samples", "integrator.n_samples"},
      {"stop_survival", "integrator.stop_survival"},
      {"ratios", "sweep.ratios"},
      {"g_values", "sweep.g_values"},
      {"delta_values", "sweep.delta_values"},
      {"models", "sweep.models"},
      {"out", "output.dir"},
      {"formats", "output.formats"},
      {"jobs", "output.jobs"},
  };
  for (const auto& [alias, full] : kAliases) {
    if (key == alias) return std::string(full);
  }
  return key;
}

void apply_scenario_preset(RunConfig& cfg) {
  if (cfg.scenario == "custom") {
    cfg.ratios.clear();  // single point at the configured couplings
    return;
  }
  if (cfg.scenario == "fig2") {
    cfg.ratios = default_ratio_grid();
    cfg.g_values = {0.0, 0.2, 0.5, 1.0, 4.0};
    return;
  }
  if (cfg.scenario == "fig3") {
    cfg.ratios = default_ratio_grid();
    cfg.delta_values = {0.0, 0.05, 0.1, 0.6};
    cfg.lattice.g = 0.0;
    return;
  }
  // Dynamics presets share the 0.25 / 0.5 couplings; the stop rule is
  // disabled so both models land on one full-length sample grid.
  cfg.lattice.v = 0.25;
  cfg.lattice.v_prime = 0.5;
  cfg.lattice.gamma = 2.0;
  cfg.ratios.clear();
  cfg.integrator.n_samples = 2001;
  cfg.integrator.stop_survival.reset();
  if (cfg.scenario == "fig4") {
    cfg.lattice.delta_offset = 0.6;
    cfg.lattice.g = 0.0;
  } else {  // fig5
    cfg.lattice.delta_offset = 0.0;
    cfg.g_values = {4.0, 0.5};
  }
}

double canonical12(double x) {
  return std::strtod(format_double(x).c_str(), nullptr);
}

void canonicalize_numbers(RunConfig& cfg) {
  auto fix = [](double& x) { x = canonical12(x); };
  fix(cfg.lattice.v);
  fix(cfg.lattice.v_prime);
  fix(cfg.lattice.gamma);
  fix(cfg.lattice.g);
  fix(cfg.lattice.eps_a);
  fix(cfg.lattice.eps_b);
  fix(cfg.lattice.delta_offset);
  fix(cfg.integrator.rel_tol);
  fix(cfg.integrator.abs_tol);
  fix(cfg.integrator.t_final);
  fix(cfg.integrator.max_step);
  if (cfg.integrator.stop_survival) fix(*cfg.integrator.stop_survival);
  for (auto& x : cfg.ratios) fix(x);
  for (auto& x : cfg.g_values) fix(x);
  for (auto& x : cfg.delta_values) fix(x);
}

void validate_config(RunConfig& cfg) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  const auto& lat = cfg.lattice;
  need(std::isfinite(lat.v) && lat.v >= 0.0,
       "lattice.v must be a finite nonnegative coupling");
  need(std::isfinite(lat.v_prime) && lat.v_prime >= 0.0,
       "lattice.v_prime must be a finite nonnegative coupling");
  need(std::isfinite(lat.gamma) && lat.gamma >= 0.0,
       "lattice.gamma must be finite and nonnegative (loss rate)");
  need(std::isfinite(lat.g), "lattice.g must be finite");
  need(std::isfinite(lat.eps_a), "lattice.eps_a must be finite");
  need(std::isfinite(lat.eps_b), "lattice.eps_b must be finite");
  need(std::isfinite(lat.delta_offset), "lattice.delta_offset must be finite");
  need(lat.n_cells >= 3, "lattice.n_cells must be at least 3");

  const auto& integ = cfg.integrator;
  need(std::isfinite(integ.rel_tol) && integ.rel_tol > 0.0,
       "integrator.rel_tol must be a positive tolerance");
  need(std::isfinite(integ.abs_tol) && integ.abs_tol > 0.0,
       "integrator.abs_tol must be a positive tolerance");
  need(std::isfinite(integ.t_final) && integ.t_final > 0.0,
       "integrator.t_final must be a positive time");
  need(std::isfinite(integ.max_step) && integ.max_step > 0.0,
       "integrator.max_step must be a positive step bound");
  need(integ.n_samples >= 2, "integrator.n_samples must be at least 2");
  if (integ.stop_survival) {
    need(std::isfinite(*integ.stop_survival) && *integ.stop_survival > 0.0 &&
             *integ.stop_survival <= 1.0,
         "integrator.stop_survival must lie in (0, 1] or be none");
  }

  for (double r : cfg.ratios) {
    need(r > 0.0 && r < 1.0,
         "sweep.ratios values must lie strictly between 0 and 1");
  }
  need(!cfg.g_values.empty(), "sweep.g_values must not be empty");
  need(!cfg.delta_values.empty(), "sweep.delta_values must not be empty");
  for (double g : cfg.g_values) {
    need(std::isfinite(g), "sweep.g_values entries must be finite");
  }
  for (double d : cfg.delta_values) {
    need(std::isfinite(d), "sweep.delta_values entries must be finite");
  }
  need(!cfg.models.empty(), "sweep.models must list at least one model");

  need(!cfg.formats.empty(),
       "output.formats must list at least one of csv, json, svg");
  for (const auto& f : cfg.formats) {
    need(f == "csv" || f == "json" || f == "svg",
         "output.formats: unknown format '" + f +
             "' (expected csv, json, svg)");
  }
  need(cfg.jobs >= 1 && cfg.jobs <= 256,
       "output.jobs must be between 1 and 256");

  if (lat.n_cells < 12) {
    cfg.warnings.push_back(
        "lattice.n_cells = " + std::to_string(lat.n_cells) +
        ": short ring; the walk wraps back onto the launch cell and the "
        "displacement split is distorted relative to a long chain");
  }
}

// Flat text and JSON configs are both reduced to ordered (key, value) pairs.
using Entries = std::vector<std::pair<std::string, std::string>>;

Entries parse_flat_entries(const std::string& text) {
  Entries entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    entries.emplace_back(trim(stripped.substr(0, eq)),
                         trim(stripped.substr(eq + 1)));
  }
  return entries;
}

std::string json_leaf(const std::string& key, const nlohmann::json& v) {
  if (v.is_null()) return "none";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!joined.empty()) joined += ",";
      if (item.is_string()) {
        joined += item.get<std::string>();
      } else if (item.is_number()) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", item.get<double>());
        joined += buf;
      } else {
        throw ConfigError(key + ": array entries must be numbers or strings");
      }
    }
    return joined;
  }
  throw ConfigError(key + ": unsupported value type");
}

Entries parse_json_entries(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  Entries entries;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) {
      for (const auto& [sub, leaf] : value.items()) {
        const std::string dotted = key + "." + sub;
        entries.emplace_back(dotted, json_leaf(dotted, leaf));
      }
    } else {
      entries.emplace_back(key, json_leaf(key, value));
    }
  }
  return entries;
}

Entries parse_entries(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? parse_json_entries(text) : parse_flat_entries(text);
  }
  return {};
}

void append_json_array(std::string& out, const std::vector<double>& xs) {
  out += "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(xs[i]);
  }
  out += "]";
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

bool is_known_scenario(std::string_view name) {
  return name == "fig2" || name == "fig3" || name == "fig4" ||
         name == "fig5" || name == "custom";
}

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value) {
  const std::string k = canonical_key(trim(key));
  if (k == "scenario") {
    if (!is_known_scenario(trim(value))) {
      throw ConfigError("scenario: unknown scenario '" + trim(value) +
                        "' (expected fig2, fig3, fig4, fig5, custom)");
    }
    cfg.scenario = trim(value);
  } else if (k == "lattice.v") {
    cfg.lattice.v = parse_double(k, value);
  } else if (k == "lattice.v_prime") {
    cfg.lattice.v_prime = parse_double(k, value);
  } else if (k == "lattice.gamma") {
    cfg.lattice.gamma = parse_double(k, value);
  } else if (k == "lattice.g") {
    cfg.lattice.g = parse_double(k, value);
  } else if (k == "lattice.eps_a") {
    cfg.lattice.eps_a = parse_double(k, value);
  } else if (k == "lattice.eps_b") {
    cfg.lattice.eps_b = parse_double(k, value);
  } else if (k == "lattice.delta_offset") {
    cfg.lattice.delta_offset = parse_double(k, value);
  } else if (k == "lattice.n_cells") {
    cfg.lattice.n_cells = static_cast<int>(parse_int(k, value));
  } else if (k == "integrator.rel_tol") {
    cfg.integrator.rel_tol = parse_double(k, value);
  } else if (k == "integrator.abs_tol") {
    cfg.integrator.abs_tol = parse_double(k, value);
  } else if (k == "integrator.t_final") {
    cfg.integrator.t_final = parse_double(k, value);
  } else if (k == "integrator.max_step") {
    cfg.integrator.max_step = parse_double(k, value);
  } else if (k == "integrator.n_samples") {
    cfg.integrator.n_samples = static_cast<int>(parse_int(k, value));
  } else if (k == "integrator.stop_survival") {
    if (is_none(value)) {
      cfg.integrator.stop_survival.reset();
    } else {
      cfg.integrator.stop_survival = parse_double(k, value);
    }
  } else if (k == "sweep.ratios") {
    cfg.ratios = parse_double_list(k, value);
  } else if (k == "sweep.g_values") {
    cfg.g_values = parse_double_list(k, value);
  } else if (k == "sweep.delta_values") {
    cfg.delta_values = parse_double_list(k, value);
  } else if (k == "sweep.models") {
    cfg.models = parse_model_list(k, value);
  } else if (k == "output.dir") {
    cfg.out_dir = trim(value);
  } else if (k == "output.formats") {
    cfg.formats = split_list(value);
  } else if (k == "output.jobs") {
    cfg.jobs = static_cast<int>(parse_int(k, value));
  } else {
    throw ConfigError("unknown config key '" + trim(key) + "'");
  }
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  for (const auto& [key, value] : parse_entries(text)) {
    apply_config_entry(cfg, key, value);
  }
}

RunConfig resolve_config(const std::string& scenario_flag,
                         const std::string& config_path,
                         const std::vector<std::string>& set_pairs) {
  Entries file_entries;
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read '" + config_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    file_entries = parse_entries(buf.str());
  }

  Entries set_entries;
  for (const auto& pair : set_pairs) {
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects KEY=VALUE, got '" + pair + "'");
    }
    set_entries.emplace_back(trim(pair.substr(0, eq)),
                             trim(pair.substr(eq + 1)));
  }

  // The scenario decides the preset, so it is settled first: the file's
  // entry, then the --scenario flag, then any --set scenario=... override.
  std::string scenario = "custom";
  for (const auto& [key, value] : file_entries) {
    if (canonical_key(key) == "scenario") scenario = trim(value);
  }
  if (!scenario_flag.empty()) scenario = scenario_flag;
  for (const auto& [key, value] : set_entries) {
    if (canonical_key(key) == "scenario") scenario = trim(value);
  }
  if (!is_known_scenario(scenario)) {
    throw ConfigError("scenario: unknown scenario '" + scenario +
                      "' (expected fig2, fig3, fig4, fig5, custom)");
  }

  RunConfig cfg;
  cfg.scenario = scenario;
  apply_scenario_preset(cfg);
  for (const auto& [key, value] : file_entries) {
    if (canonical_key(key) == "scenario") continue;
    apply_config_entry(cfg, key, value);
  }
  for (const auto& [key, value] : set_entries) {
    if (canonical_key(key) == "scenario") continue;
    apply_config_entry(cfg, key, value);
  }

  canonicalize_numbers(cfg);
  validate_config(cfg);
  return cfg;
}

std::string resolved_config_json(const RunConfig& cfg) {
  std::string out;
  out += "{\n";
  out += "  \"scenario\": \"" + cfg.scenario + "\",\n";
  out += "  \"lattice\": {\n";
  out += "    \"v\": " + format_double(cfg.lattice.v) + ",\n";
  out += "    \"v_prime\": " + format_double(cfg.lattice.v_prime) + ",\n";
  out += "    \"gamma\": " + format_double(cfg.lattice.gamma) + ",\n";
  out += "    \"g\": " + format_double(cfg.lattice.g) + ",\n";
  out += "    \"eps_a\": " + format_double(cfg.lattice.eps_a) + ",\n";
  out += "    \"eps_b\": " + format_double(cfg.lattice.eps_b) + ",\n";
  out += "    \"delta_offset\": " + format_double(cfg.lattice.delta_offset) +
         ",\n";
  out += "    \"n_cells\": " + std::to_string(cfg.lattice.n_cells) + "\n";
  out += "  },\n";
  out += "  \"integrator\": {\n";
  out += "    \"rel_tol\": " + format_double(cfg.integrator.rel_tol) + ",\n";
  out += "    \"abs_tol\": " + format_double(cfg.integrator.abs_tol) + ",\n";
  out += "    \"t_final\": " + format_double(cfg.integrator.t_final) + ",\n";
  out += "    \"max_step\": " + format_double(cfg.integrator.max_step) + ",\n";
  out +=
      "    \"n_samples\": " + std::to_string(cfg.integrator.n_samples) + ",\n";
  out += "    \"stop_survival\": " +
         (cfg.integrator.stop_survival
              ? format_double(*cfg.integrator.stop_survival)
              : std::string("null")) +
         "\n";
  out += "  },\n";
  out += "  \"sweep\": {\n";
  out += "    \"ratios\": ";
  append_json_array(out, cfg.ratios);
  out += ",\n    \"g_values\": ";
  append_json_array(out, cfg.g_values);
  out += ",\n    \"delta_values\": ";
  append_json_array(out, cfg.delta_values);
  out += ",\n    \"models\": [";
  for (std::size_t i = 0; i < cfg.models.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + std::string(model_name(cfg.models[i])) + "\"";
  }
  out += "]\n  }\n}\n";
  return out;
}

}  // namespace qwalk

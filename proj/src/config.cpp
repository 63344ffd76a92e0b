#include "cqs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "cqs/errors.hpp"
#include "cqs/io.hpp"

namespace cqs {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw ConfigError("config: key '" + key + "' expects true/false, got '" + v + "'");
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field number_field(const std::string& key, T ExperimentConfig::*member) {
  if constexpr (std::is_same_v<T, int>) {
    return {[key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_int(key, v); },
            [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
  } else {
    return {[key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_double(key, v); },
            [member](const ExperimentConfig& c) { return format_number(c.*member); }};
  }
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = [] {
    std::vector<std::pair<std::string, Field>> v;
    v.emplace_back("model", Field{[](ExperimentConfig& c, const std::string& s) {
                                    if (s != "kicked" && s != "ac")
                                      throw ConfigError("config: model must be 'kicked' or 'ac', got '" + s + "'");
                                    c.model = s;
                                  },
                                  [](const ExperimentConfig& c) { return c.model; }});
    v.emplace_back("j", number_field("j", &ExperimentConfig::j));
    v.emplace_back("hT", number_field("hT", &ExperimentConfig::ht));
    v.emplace_back("K", number_field("K", &ExperimentConfig::k));
    v.emplace_back("GT", number_field("GT", &ExperimentConfig::gt));
    v.emplace_back("OmegaT", number_field("OmegaT", &ExperimentConfig::omega_t));
    v.emplace_back("bins", number_field("bins", &ExperimentConfig::bins));
    v.emplace_back("n_max", number_field("n_max", &ExperimentConfig::n_max));
    v.emplace_back("damping", number_field("damping", &ExperimentConfig::damping));
    v.emplace_back("doqs_grid", number_field("doqs_grid", &ExperimentConfig::doqs_grid));
    v.emplace_back("steps", number_field("steps", &ExperimentConfig::steps));
    v.emplace_back("L", number_field("L", &ExperimentConfig::periods));
    v.emplace_back("grid", number_field("grid", &ExperimentConfig::grid));
    v.emplace_back("raster", number_field("raster", &ExperimentConfig::raster));
    v.emplace_back("path_points", number_field("path_points", &ExperimentConfig::path_points));
    v.emplace_back("eh_max_hT", number_field("eh_max_hT", &ExperimentConfig::eh_max_ht));
    v.emplace_back("eh_max_K", number_field("eh_max_K", &ExperimentConfig::eh_max_k));
    v.emplace_back("dump_matrix",
                   Field{[](ExperimentConfig& c, const std::string& s) { c.dump_matrix = parse_bool("dump_matrix", s); },
                         [](const ExperimentConfig& c) { return std::string(c.dump_matrix ? "true" : "false"); }});
    v.emplace_back("output_dir", Field{[](ExperimentConfig& c, const std::string& s) {
                                         if (s.empty()) throw ConfigError("config: output_dir must not be empty");
                                         c.output_dir = s;
                                       },
                                       [](const ExperimentConfig& c) { return c.output_dir; }});
    return v;
  }();
  return f;
}

const Field& field(const std::string& key) {
  for (const auto& [name, f] : fields())
    if (name == key) return f;
  throw ConfigError("config: unknown key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  field(key).set(cfg, trim(value));
}

std::string get_config_value(const ExperimentConfig& cfg, const std::string& key) { return field(key).get(cfg); }

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  const double twice = 2.0 * c.j;
  if (!(c.j > 0.0) || std::abs(twice - std::round(twice)) > 1e-12) fail("j must be a positive half-integer");
  if (!(c.omega_t > 0.0)) fail("OmegaT must be positive");
  if (c.bins < 8) fail("bins must be >= 8");
  if (c.n_max < 1) fail("n_max must be >= 1");
  if (c.damping < 0.0) fail("damping must be >= 0");
  if (c.doqs_grid < 16) fail("doqs_grid must be >= 16");
  if (c.steps < 1) fail("steps must be >= 1");
  if (c.periods < 0) fail("L must be >= 0");
  if (c.grid < 4) fail("grid must be >= 4");
  if (c.raster < 8) fail("raster must be >= 8");
  if (c.path_points < 1) fail("path_points must be >= 1");
}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig c;
  if (name == "fig2a") {
    c.model = "kicked";
    c.j = 100;
  } else if (name == "fig2b") {
    c.model = "ac";
    c.j = 100;
  } else if (name == "fig3a") {
    c.model = "kicked";
    c.j = 50;
  } else if (name == "fig3b") {
    c.model = "ac";
    c.j = 50;
  } else {
    throw ConfigError("config: unknown preset '" + std::string(name) + "'");
  }
  c.ht = 0.1;
  c.k = 0.3;
  c.gt = 20.0;
  c.omega_t = kTwoPi;
  return c;
}

ExperimentConfig parse_config(std::istream& is, ExperimentConfig base) {
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (seen.count(key))
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    seen[key] = lineno;
    set_config_value(base, key, body.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  return parse_config(is, std::move(base));
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  for (const auto& [name, f] : fields()) os << name << " = " << f.get(cfg) << '\n';
  return os.str();
}

DriveConfig drive_of(const ExperimentConfig& cfg) {
  DriveConfig d;
  if (cfg.model == "kicked")
    d.kind = Kicked{cfg.k};
  else
    d.kind = Monochromatic{cfg.gt};
  d.ht = cfg.ht;
  d.omega_t = cfg.omega_t;
  return d;
}

}  // namespace cqs

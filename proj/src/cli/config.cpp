#include "spectramech/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "spectramech/errors.hpp"
#include "spectramech/random.hpp"

namespace spectramech {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(key, "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : mark(key, fallback); }

  std::size_t count_or(const std::string& key, std::size_t fallback) {
    if (!has(key)) return mark(key, fallback);
    const auto& v = at(key);
    if (!v.is_number_unsigned()) fail(key, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  std::uint64_t seed_or(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return mark(key, fallback);
    const auto& v = at(key);
    if (!v.is_number_unsigned()) fail(key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool flag_or(const std::string& key, bool fallback) {
    if (!has(key)) return mark(key, fallback);
    const auto& v = at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::string path(const std::string& key) const { return path_ + "/" + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!seen_.count(key)) fail(key, "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? path_ : path(key);
    throw ParseError("config " + (where.empty() ? std::string("/") : where) + ": " + what);
  }

 private:
  template <class T>
  T mark(const std::string& key, T fallback) {
    seen_.insert(key);
    return fallback;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs `build`, turning invariant violations into issues prefixed by `where`.
template <class F>
void collect(std::vector<std::string>& issues, const std::string& where, F&& build) {
  try {
    build();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    issues.push_back(where + ": " + e.what());
  }
}

TypeDistribution parse_type(Fields& f) {
  const auto kind = f.text("kind");
  if (kind == "uniform") return TypeDistribution::uniform(f.number("min"), f.number("max"));
  if (kind == "power_law") return TypeDistribution::power_law(f.number("min"), f.number("max"), f.number("exponent"));
  if (kind == "truncated_exponential")
    return TypeDistribution::truncated_exponential(f.number("min"), f.number("max"), f.number("rate"));
  if (kind == "tabulated") return TypeDistribution::tabulated(f.numbers("knots"), f.numbers("cdf"));
  f.fail("kind", "unknown type distribution '" + kind + "'");
}

GainDistribution parse_gain(Fields& f, std::size_t order, std::vector<std::string>& notes, const std::string& where) {
  const auto kind = f.text("kind");
  if (kind == "deterministic") return GainDistribution::deterministic(f.number("value"));
  if (kind == "discrete") {
    const auto values = f.numbers("values");
    const auto weights = f.numbers("weights");
    if (values.size() != weights.size()) throw ConfigError("discrete gain needs as many weights as values");
    std::vector<GainPoint> atoms;
    for (std::size_t k = 0; k < values.size(); ++k) atoms.push_back({values[k], weights[k]});
    return GainDistribution::discrete(std::move(atoms));
  }
  if (kind == "uniform") {
    const double lo = f.number("min");
    const double hi = f.number("max");
    if (!(hi > lo)) throw ConfigError("uniform gain needs max > min");
    const double d = 1.0 / (hi - lo);
    return GainDistribution::continuous([d](double) { return d; }, {lo, hi}, order, "uniform");
  }
  if (kind == "exponential") {
    // Exponential power gain (Rayleigh fading) cut at `truncate_at` and
    // renormalized; the discarded tail mass is reported.
    const double mean = f.number("mean");
    const double cut = f.number("truncate_at");
    if (!(mean > 0.0) || !(cut > 0.0)) throw ConfigError("exponential gain needs positive mean and truncate_at");
    const double kept = -std::expm1(-cut / mean);
    std::ostringstream os;
    os.precision(6);
    os << where << ": exponential gain truncated at " << cut << ", discarded tail mass " << std::exp(-cut / mean);
    notes.push_back(os.str());
    return GainDistribution::continuous([mean, kept](double h) { return std::exp(-h / mean) / (mean * kept); },
                                        {0.0, cut}, order, "exponential");
  }
  if (kind == "tabulated") {
    // Piecewise-linear density through (knots[k], density[k]).
    auto knots = f.numbers("knots");
    auto density = f.numbers("density");
    if (knots.size() != density.size() || knots.size() < 2)
      throw ConfigError("tabulated gain needs matching knots and density with at least two points");
    auto pdf = [knots, density](double h) {
      std::size_t k = 1;
      while (k + 1 < knots.size() && h > knots[k]) ++k;
      const double t = (h - knots[k - 1]) / (knots[k] - knots[k - 1]);
      return density[k - 1] + t * (density[k] - density[k - 1]);
    };
    return GainDistribution::continuous(pdf, knots, order, "tabulated");
  }
  f.fail("kind", "unknown gain distribution '" + kind + "'");
}

std::string locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    const auto colon = msg.find("parse error");
    throw ParseError("config syntax error at " + locate(text, e.byte) + ": " +
                     (colon == std::string::npos ? msg : msg.substr(colon)));
  }
}

struct Parsed {
  ScenarioConfig config;
  std::vector<std::string> issues;
};

Parsed parse_impl(std::string_view text) {
  Parsed out;
  auto& c = out.config;
  const json doc = parse_document(text);
  Fields top(doc, "");
  const auto schema = top.text("schema");
  if (schema != kConfigSchema) top.fail("schema", "unsupported schema '" + schema + "'");
  const auto model = top.text("model");
  if (model == "fd")
    c.model = Model::fd;
  else if (model == "ss")
    c.model = Model::ss;
  else
    top.fail("model", "expected \"fd\" or \"ss\"");

  c.bandwidth = top.number("bandwidth");
  if (c.model == Model::ss) c.total_power = top.number("total_power");
  c.noise_density = top.number_or("noise_density", 1.0);
  c.seed = top.seed_or("seed", 0);
  c.override_regularity = top.flag_or("override_regularity", false);

  if (top.has("solver")) {
    Fields s(top.at("solver"), "/solver");
    c.solver.grid_m = s.count_or("grid_m", c.solver.grid_m);
    c.solver.mc_samples = s.count_or("mc_samples", c.solver.mc_samples);
    c.solver.restarts = s.count_or("restarts", c.solver.restarts);
    c.solver.regularity_grid = s.count_or("regularity_grid", c.solver.regularity_grid);
    c.solver.quadrature_order = s.count_or("quadrature_order", c.solver.quadrature_order);
    c.solver.verify_grid = s.count_or("verify_grid", c.solver.verify_grid);
    s.finish();
  }

  const auto& users = top.at("users");
  if (!users.is_array() || users.empty()) top.fail("users", "expected a non-empty array");
  const std::size_t n = users.size();
  if (c.model == Model::ss) c.gain_matrix.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string where = "/users/" + std::to_string(i);
    Fields u(users[i], where);
    Fields t(u.at("type"), where + "/type");
    collect(out.issues, where + "/type", [&] { c.types.push_back(parse_type(t)); });
    t.finish();
    if (c.model == Model::fd) {
      Fields g(u.at("gain"), where + "/gain");
      collect(out.issues, where + "/gain",
              [&] { c.gains.push_back(parse_gain(g, c.solver.quadrature_order, c.notes, where + "/gain")); });
      g.finish();
      c.transmit_power.push_back(u.number("transmit_power"));
      collect(out.issues, where + "/transmit_power", [&] {
        FdUserPhysical p;
        p.transmit_power = c.transmit_power.back();
        p.noise_density = c.noise_density;
        p.validate();
      });
    } else {
      const auto row = u.numbers("gains");
      if (row.size() != n) {
        out.issues.push_back(where + "/gains: expected " + std::to_string(n) + " entries");
      } else {
        for (std::size_t j = 0; j < n; ++j) c.gain_matrix[i * n + j] = row[j];
      }
    }
    u.finish();
  }
  top.finish();

  collect(out.issues, "/bandwidth", [&] {
    if (!(c.bandwidth > 0.0) || !std::isfinite(c.bandwidth)) throw ConfigError("bandwidth W must be positive");
  });
  collect(out.issues, "/noise_density", [&] {
    if (!(c.noise_density > 0.0) || !std::isfinite(c.noise_density))
      throw ConfigError("noise density N0 must be positive");
  });
  if (c.model == Model::ss) {
    collect(out.issues, "/total_power", [&] {
      if (!(c.total_power > 0.0) || !std::isfinite(c.total_power)) throw ConfigError("total power must be positive");
    });
    collect(out.issues, "/users", [&] { SsPhysical(n, c.gain_matrix, 1.0, 1.0); });
  }
  collect(out.issues, "/solver", [&] {
    if (c.solver.grid_m < 1) throw ConfigError("grid_m must be at least 1");
    if (c.solver.mc_samples < 2) throw ConfigError("mc_samples must be at least 2");
    if (c.solver.regularity_grid < 2) throw ConfigError("regularity_grid must be at least 2");
    if (c.solver.quadrature_order < 1) throw ConfigError("quadrature_order must be at least 1");
    if (c.solver.verify_grid < 1) throw ConfigError("verify_grid must be at least 1");
  });

  c.canonical = doc;
  c.canonical["noise_density"] = c.noise_density;
  c.canonical["seed"] = c.seed;
  c.canonical["override_regularity"] = c.override_regularity;
  c.canonical["solver"] = {{"grid_m", c.solver.grid_m},
                           {"mc_samples", c.solver.mc_samples},
                           {"restarts", c.solver.restarts},
                           {"regularity_grid", c.solver.regularity_grid},
                           {"quadrature_order", c.solver.quadrature_order},
                           {"verify_grid", c.solver.verify_grid}};
  return out;
}

}  // namespace

FdScenario ScenarioConfig::fd_scenario() const {
  if (model != Model::fd) throw ConfigError("config describes a spread-spectrum model, not frequency division");
  std::vector<FdUser> users;
  for (std::size_t i = 0; i < types.size(); ++i) {
    FdUserPhysical p;
    p.gain = gains[i];
    p.transmit_power = transmit_power[i];
    p.noise_density = noise_density;
    users.push_back({p, types[i]});
  }
  return FdScenario(bandwidth, std::move(users), solver.regularity_grid, override_regularity);
}

SsScenario ScenarioConfig::ss_scenario() const {
  if (model != Model::ss) throw ConfigError("config describes a frequency-division model, not spread spectrum");
  return SsScenario(total_power, SsPhysical(types.size(), gain_matrix, bandwidth, noise_density), types,
                    solver.regularity_grid, override_regularity);
}

SsSolverOptions ScenarioConfig::ss_options() const {
  SsSolverOptions o;
  o.restarts = solver.restarts;
  return o;
}

std::uint64_t ScenarioConfig::solver_seed() const { return derive_seed(seed, 0x5353'0000'0000'0001ULL); }

ScenarioConfig parse_config(std::string_view text) {
  auto parsed = parse_impl(text);
  if (!parsed.issues.empty()) {
    std::string msg = "invalid config:";
    for (const auto& i : parsed.issues) msg += "\n  " + i;
    throw ConfigError(msg);
  }
  return std::move(parsed.config);
}

std::vector<std::string> config_issues(std::string_view text) { return parse_impl(text).issues; }

std::string read_config_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig load_config(const std::string& path) { return parse_config(read_config_text(path)); }

std::string config_digest(const json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace spectramech

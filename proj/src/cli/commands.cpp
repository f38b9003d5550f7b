#include "spectramech/commands.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "spectramech/config.hpp"
#include "spectramech/counterexamples.hpp"
#include "spectramech/errors.hpp"
#include "spectramech/random.hpp"
#include "spectramech/serialize.hpp"
#include "spectramech/verification.hpp"

namespace spectramech {

using nlohmann::json;

namespace {

constexpr double kNatsToBits = 1.4426950408889634;  // 1 / ln 2

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> mc_samples;
  std::optional<std::size_t> grid_m;
  std::optional<std::size_t> restarts;
  bool override_regularity = false;
  std::string format = "json";
};

struct CommandOptions {
  std::string theta;
  std::optional<std::size_t> sample;
  std::size_t user = 0;
  std::optional<double> report;
  std::string suite = "all";
  std::string param;
  std::string values;
  std::string range;
  std::size_t points = 65;
};

void add_common(CLI::App* sub, CommonOptions& o, bool csv) {
  sub->add_option("--config", o.config, "Scenario config file (JSON)")->required();
  sub->add_option("--seed", o.seed, "Override the config seed");
  sub->add_option("--mc-samples", o.mc_samples, "Override solver.mc_samples");
  sub->add_option("--grid-m", o.grid_m, "Override solver.grid_m (tax Riemann subintervals)");
  sub->add_option("--restarts", o.restarts, "Override solver.restarts (spread-spectrum random starts)");
  sub->add_flag("--override-regularity", o.override_regularity, "Run even if the regularity check fails");
  auto* f = sub->add_option("--format", o.format, "Output format");
  if (csv)
    f->check(CLI::IsMember({"json", "csv"}));
  else
    f->check(CLI::IsMember({"json"}));
}

ScenarioConfig load_effective(const CommonOptions& o) {
  auto c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.mc_samples) c.solver.mc_samples = *o.mc_samples;
  if (o.grid_m) c.solver.grid_m = *o.grid_m;
  if (o.restarts) c.solver.restarts = *o.restarts;
  if (o.override_regularity) c.override_regularity = true;
  if (c.solver.grid_m < 1) throw ConfigError("grid_m must be at least 1");
  if (c.solver.mc_samples < 2) throw ConfigError("mc_samples must be at least 2");
  c.canonical["seed"] = c.seed;
  c.canonical["override_regularity"] = c.override_regularity;
  c.canonical["solver"]["mc_samples"] = c.solver.mc_samples;
  c.canonical["solver"]["grid_m"] = c.solver.grid_m;
  c.canonical["solver"]["restarts"] = c.solver.restarts;
  return c;
}

std::unique_ptr<Mechanism> make_mechanism(const ScenarioConfig& c) {
  if (c.model == Model::fd) return std::make_unique<FdMechanism>(c.fd_scenario(), c.solver.grid_m);
  return std::make_unique<SsMechanism>(c.ss_scenario(), c.solver.grid_m, c.ss_options(), c.solver_seed());
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + " list is empty");
  return out;
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> fields;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) fields.push_back(parse_list(item, "range").front());
  if (fields.size() != 3 || fields[2] < 1 || fields[2] != std::floor(fields[2]))
    throw UsageError("range must be lo:hi:count with a positive integer count");
  const auto n = static_cast<std::size_t>(fields[2]);
  if (n == 1) return {fields[0]};
  return linspace(fields[0], fields[1], n);
}

// --theta, --sample k, or the medians of the type laws.
std::vector<double> select_types(const ScenarioConfig& c, const CommandOptions& o) {
  if (!o.theta.empty()) {
    auto t = parse_list(o.theta, "theta");
    if (t.size() != c.users()) throw DomainError("theta needs one entry per user");
    return t;
  }
  std::vector<double> t(c.users());
  if (o.sample) {
    draw_types(c.types, derive_seed(c.seed, *o.sample), t);
    return t;
  }
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = c.types[i].quantile(0.5);
  return t;
}

json envelope(const std::string& command, const ScenarioConfig& c, json payload) {
  json j;
  j["schema"] = kResultSchema;
  j["command"] = command;
  j["config_digest"] = config_digest(c.canonical);
  j["model"] = c.model == Model::fd ? "fd" : "ss";
  j["seed"] = c.seed;
  j["payload"] = std::move(payload);
  return j;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

json regularity_json(const ScenarioConfig& c) {
  json regs = json::array();
  for (std::size_t i = 0; i < c.users(); ++i) {
    json r = certify_regularity(c.types[i], c.solver.regularity_grid);
    r["user"] = i;
    regs.push_back(std::move(r));
  }
  return regs;
}

int cmd_validate(const CommonOptions& common, std::ostream& out) {
  const auto text = read_config_text(common.config);
  auto issues = config_issues(text);
  json payload;
  payload["issues"] = json::array();
  if (!issues.empty()) {
    payload["valid"] = false;
    payload["issues"] = issues;
    json j = {{"schema", kResultSchema}, {"command", "validate"}, {"payload", payload}};
    emit(out, j);
    return kExitInvariant;
  }
  auto c = parse_config(text);
  if (common.override_regularity) c.override_regularity = true;
  payload["users"] = c.users();
  payload["notes"] = c.notes;
  payload["regularity"] = regularity_json(c);
  bool valid = true;
  for (std::size_t i = 0; i < c.users(); ++i) {
    const auto r = certify_regularity(c.types[i], c.solver.regularity_grid);
    if (r.certified) continue;
    std::ostringstream os;
    os.precision(17);
    os << "/users/" << i << "/type: regularity check failed, virtual type not increasing between "
       << r.violation->first << " and " << r.violation->second;
    if (c.override_regularity) {
      os << " (overridden)";
    } else {
      valid = false;
    }
    issues.push_back(os.str());
  }
  payload["issues"] = issues;
  payload["override_regularity"] = c.override_regularity;
  payload["valid"] = valid;
  emit(out, envelope("validate", c, payload));
  return valid ? kExitOk : kExitInvariant;
}

json per_user_rows(const ScenarioConfig& c, std::span<const double> types, std::span<const double> virt,
                   std::span<const double> share, const TaxResult& tax) {
  json users = json::array();
  for (std::size_t i = 0; i < types.size(); ++i) {
    users.push_back({{"user", i},
                     {"type", types[i]},
                     {"virtual_type", virt[i]},
                     {c.model == Model::fd ? "bandwidth" : "power", share[i]},
                     {"rate", tax.rate[i]},
                     {"rate_bits", tax.rate[i] * kNatsToBits},
                     {"payment", tax.payment[i]},
                     {"tax_error_bound", tax.error_bound[i]},
                     {"nonmonotone_samples", tax.nonmonotone_samples[i]}});
  }
  return users;
}

std::string per_user_csv(const json& users, bool fd) {
  CsvTable t({"user", "type", "virtual_type", fd ? "bandwidth" : "power", "rate", "rate_bits", "payment",
              "tax_error_bound", "nonmonotone_samples"});
  for (const auto& u : users) {
    t.add_row({u["user"].get<double>(), u["type"].get<double>(), u["virtual_type"].get<double>(),
               u[fd ? "bandwidth" : "power"].get<double>(), u["rate"].get<double>(), u["rate_bits"].get<double>(),
               u["payment"].get<double>(), u["tax_error_bound"].get<double>(),
               u["nonmonotone_samples"].get<double>()});
  }
  return t.str();
}

int cmd_allocate(const std::string& name, const CommonOptions& common, const CommandOptions& o, std::ostream& out) {
  const auto c = load_effective(common);
  const auto types = select_types(c, o);
  json payload;
  payload["types"] = types;
  json users;
  if (c.model == Model::fd) {
    const auto s = c.fd_scenario();
    const auto r = fd_run(s, types, c.solver.grid_m);
    users = per_user_rows(c, types, r.allocation.virtual_types, r.allocation.bandwidth, r.tax);
    payload["outcome"] = r;
    if (name == "tax") {
      const auto z = fd_payment_via_threshold(s, types, c.solver.grid_m);
      json check = json::array();
      for (std::size_t i = 0; i < types.size(); ++i) {
        const double gap = std::abs(r.tax.payment[i] - z.payment[i]);
        const double tol = r.tax.error_bound[i] + z.error_bound[i];
        check.push_back({{"user", i}, {"difference", gap}, {"tolerance", tol}, {"agrees", gap <= tol}});
      }
      payload["threshold_payment"] = z;
      payload["cross_check"] = check;
    }
  } else {
    const auto s = c.ss_scenario();
    const auto r = ss_run(s, types, c.solver.grid_m, c.ss_options(), c.solver_seed());
    users = per_user_rows(c, types, r.allocation.virtual_types, r.allocation.power, r.tax);
    payload["outcome"] = r;
  }
  payload["users"] = users;
  payload["tax_error_bound"] = json::array();
  for (const auto& u : users) payload["tax_error_bound"].push_back(u["tax_error_bound"]);
  if (common.format == "csv") {
    out << per_user_csv(users, c.model == Model::fd);
    return kExitOk;
  }
  emit(out, envelope(name, c, payload));
  return kExitOk;
}

int cmd_interim(const CommonOptions& common, const CommandOptions& o, std::ostream& out) {
  const auto c = load_effective(common);
  if (o.user >= c.users()) throw DomainError("user index out of range");
  const double report = o.report ? *o.report : c.types[o.user].quantile(0.5);
  const auto mech = make_mechanism(c);
  const auto est = estimate_interim(*mech, o.user, report, c.solver.mc_samples, c.seed);
  json payload = est;
  payload["utility_at_report"] = report * est.rate - est.payment;
  emit(out, envelope("interim", c, payload));
  return kExitOk;
}

int cmd_verify(const CommonOptions& common, const CommandOptions& o, std::ostream& out) {
  const auto c = load_effective(common);
  const auto mech = make_mechanism(c);
  VerificationSettings vs;
  vs.samples = c.solver.mc_samples;
  vs.seed = c.seed;
  const bool all = o.suite == "all";
  bool passed = true;
  json users = json::array();
  for (std::size_t i = 0; i < c.users(); ++i) {
    const auto grid = support_grid(*mech, i, c.solver.verify_grid);
    const auto v = verify_user(*mech, i, grid, vs);
    json u = {{"user", i}};
    if (all || o.suite == "ic") {
      u["ic"] = v.ic;
      for (const auto& r : v.ic) passed = passed && r.passed;
    }
    if (all || o.suite == "ir") {
      u["ir"] = v.ir;
      passed = passed && v.ir.passed;
    }
    if (all || o.suite == "identity") {
      u["identity"] = v.identity;
      passed = passed && v.identity.passed;
    }
    if (all || o.suite == "monotone") {
      u["monotone"] = v.monotone;
      passed = passed && v.monotone.passed;
    }
    users.push_back(std::move(u));
  }
  json payload = {{"suite", o.suite},
                  {"passed", passed},
                  {"local_optimality_only", mech->local_optimality_only()},
                  {"samples", vs.samples},
                  {"sigmas", vs.sigmas},
                  {"users", users}};
  emit(out, envelope("verify", c, payload));
  return passed ? kExitOk : kExitVerificationFailed;
}

json revenue_json(const RevenueEstimate& r) {
  json j = r;
  j["identity_holds"] = r.identity_holds();
  j["below_omniscient_bound"] = r.payment_revenue <= r.omniscient_bound + 3.0 * r.omniscient_std_error &&
                                r.virtual_surplus <= r.omniscient_bound + 3.0 * r.omniscient_std_error;
  return j;
}

int cmd_revenue(const CommonOptions& common, std::ostream& out) {
  const auto c = load_effective(common);
  const auto mech = make_mechanism(c);
  const auto r = estimate_revenue(*mech, c.solver.mc_samples, c.seed);
  emit(out, envelope("revenue", c, revenue_json(r)));
  return kExitOk;
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v)) throw DomainError(std::string(what) + " values must be positive integers");
  return static_cast<std::size_t>(v);
}

int cmd_sweep(const CommonOptions& common, const CommandOptions& o, std::ostream& out) {
  const auto base = load_effective(common);
  if (o.values.empty() == o.range.empty()) throw UsageError("sweep needs exactly one of --values or --range");
  const auto values = o.values.empty() ? parse_range(o.range) : parse_list(o.values, "values");
  const std::size_t n = base.users();

  std::vector<std::string> header{o.param,          "payment_revenue", "payment_std_error", "virtual_surplus",
                                  "virtual_std_error", "omniscient_bound", "tax_error_bound"};
  for (std::size_t i = 0; i < n; ++i) header.push_back("eps_user_" + std::to_string(i));
  CsvTable table(header);
  json rows = json::array();

  for (double v : values) {
    auto c = base;
    std::unique_ptr<Mechanism> mech;
    std::size_t users = n;
    if (o.param == "W") {
      c.bandwidth = v;
    } else if (o.param == "P_total") {
      if (c.model != Model::ss) throw ConfigError("P_total sweeps need a spread-spectrum config");
      c.total_power = v;
    } else if (o.param == "N") {
      users = as_count(v, "N");
      if (users > n) throw DomainError("N exceeds the number of users in the config");
    } else if (o.param == "grid_M") {
      c.solver.grid_m = as_count(v, "grid_M");
    } else if (o.param == "mc_samples") {
      c.solver.mc_samples = as_count(v, "mc_samples");
      if (c.solver.mc_samples < 2) throw DomainError("mc_samples values must be at least 2");
    }
    if (c.model == Model::fd) {
      mech = std::make_unique<FdMechanism>(c.fd_scenario().leading(users), c.solver.grid_m);
    } else {
      mech = std::make_unique<SsMechanism>(c.ss_scenario().leading(users), c.solver.grid_m, c.ss_options(),
                                           c.solver_seed());
    }
    const auto r = estimate_revenue(*mech, c.solver.mc_samples, c.seed);
    std::vector<double> row{v, r.payment_revenue, r.payment_std_error, r.virtual_surplus, r.virtual_std_error,
                            r.omniscient_bound, r.tax_error_bound};
    for (std::size_t i = 0; i < n; ++i) row.push_back(i < users ? r.user_tax_error_bound[i] : NAN);
    table.add_row(row);
    json jr = revenue_json(r);
    jr[o.param] = v;
    rows.push_back(std::move(jr));
  }
  if (common.format == "csv") {
    out << table.str();
    return kExitOk;
  }
  emit(out, envelope("sweep", base, {{"parameter", o.param}, {"rows", rows}}));
  return kExitOk;
}

int cmd_rate_curve(const CommonOptions& common, const CommandOptions& o, std::ostream& out) {
  const auto c = load_effective(common);
  if (o.user >= c.users()) throw DomainError("user index out of range");
  if (o.points < 1) throw UsageError("--points must be at least 1");
  auto types = select_types(c, o);
  const auto& d = c.types[o.user];
  const auto grid = linspace(d.min(), d.max(), o.points);
  CsvTable table({"theta", "virtual_type", "allocation", "rate", "rate_bits"});
  json rows = json::array();
  std::optional<FdScenario> fd;
  std::optional<SsScenario> ss;
  if (c.model == Model::fd)
    fd.emplace(c.fd_scenario());
  else
    ss.emplace(c.ss_scenario());
  double hint = 0.0;
  for (double theta : grid) {
    types[o.user] = theta;
    double share = 0.0;
    double rate = 0.0;
    double w = 0.0;
    if (fd) {
      const auto a = fd_allocate(*fd, types, hint);
      hint = a.multiplier;
      share = a.bandwidth[o.user];
      rate = a.rates[o.user];
      w = a.virtual_types[o.user];
    } else {
      const auto a = ss_allocate(*ss, types, c.ss_options(), c.solver_seed());
      share = a.power[o.user];
      rate = a.rates[o.user];
      w = a.virtual_types[o.user];
    }
    table.add_row({theta, w, share, rate, rate * kNatsToBits});
    rows.push_back({{"theta", theta},
                    {"virtual_type", w},
                    {"allocation", share},
                    {"rate", rate},
                    {"rate_bits", rate * kNatsToBits}});
  }
  if (common.format == "csv") {
    out << table.str();
    return kExitOk;
  }
  emit(out, envelope("rate-curve", c, {{"user", o.user}, {"others", types}, {"rows", rows}}));
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.error_class()) {
    case ErrorClass::parse:
      return kExitParse;
    case ErrorClass::invariant:
      return kExitInvariant;
    case ErrorClass::solver:
      return kExitSolver;
  }
  return kExitSolver;
}

const char* kSweepFooter =
    "CSV columns: <parameter>, payment_revenue, payment_std_error, virtual_surplus, virtual_std_error,\n"
    "omniscient_bound, tax_error_bound (sum over users), eps_user_<i> (mean per-user tax error bound;\n"
    "nan for users outside an N sweep). Revenue in nats times type units.";
const char* kCurveFooter =
    "CSV columns: theta (user's type), virtual_type, allocation (bandwidth for fd, power for ss),\n"
    "rate (expected rate, nats/s), rate_bits (same rate in bits/s). Other users are held at --theta,\n"
    "--sample draws, or their median types.";
const char* kAllocFooter =
    "CSV columns: user, type, virtual_type, bandwidth|power, rate (nats/s), rate_bits, payment,\n"
    "tax_error_bound, nonmonotone_samples.";

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Revenue-optimal spectrum auctions: allocation, payments and empirical verification"};
  app.name("spectramech");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  CommonOptions common;
  CommandOptions o;

  auto* validate = app.add_subcommand("validate", "Check a config against every model invariant");
  validate->add_option("--config", common.config, "Scenario config file (JSON)")->required();
  validate->add_flag("--override-regularity", common.override_regularity, "Accept uncertified regularity");

  auto* allocate = app.add_subcommand("allocate", "Allocation and payments for one type vector");
  auto* tax = app.add_subcommand("tax", "Payments for one type vector, with the threshold cross-check (fd)");
  for (auto* sub : {allocate, tax}) {
    add_common(sub, common, true);
    sub->add_option("--theta", o.theta, "Comma-separated type vector");
    sub->add_option("--sample", o.sample, "Use type draw k from the config seed");
    sub->footer(kAllocFooter);
  }

  auto* interim = app.add_subcommand("interim", "Monte Carlo interim rate and payment of one user");
  add_common(interim, common, false);
  interim->add_option("--user", o.user, "User index");
  interim->add_option("--report", o.report, "Reported type (default: median)");

  auto* verify = app.add_subcommand("verify", "Empirical IC, IR, payment-identity and monotonicity checks");
  add_common(verify, common, false);
  verify->add_option("--suite", o.suite, "Checks to run")->check(CLI::IsMember({"ic", "ir", "identity", "monotone", "all"}));

  auto* revenue = app.add_subcommand("revenue", "Expected revenue, computed from payments and from virtual surplus");
  add_common(revenue, common, false);

  auto* sweep = app.add_subcommand("sweep", "Revenue and tax error bounds across a parameter");
  add_common(sweep, common, true);
  sweep->add_option("--param", o.param, "Parameter to vary")
      ->required()
      ->check(CLI::IsMember({"W", "P_total", "N", "grid_M", "mc_samples"}));
  sweep->add_option("--values", o.values, "Comma-separated values");
  sweep->add_option("--range", o.range, "lo:hi:count, equispaced");
  sweep->footer(kSweepFooter);

  auto* curve = app.add_subcommand("rate-curve", "Allocated rate of one user across its type support");
  add_common(curve, common, true);
  curve->add_option("--user", o.user, "User index");
  curve->add_option("--points", o.points, "Grid points over the support");
  curve->add_option("--theta", o.theta, "Comma-separated type vector for the other users");
  curve->add_option("--sample", o.sample, "Hold the others at type draw k");
  curve->footer(kCurveFooter);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(common, out);
    if (allocate->parsed()) return cmd_allocate("allocate", common, o, out);
    if (tax->parsed()) return cmd_allocate("tax", common, o, out);
    if (interim->parsed()) return cmd_interim(common, o, out);
    if (verify->parsed()) return cmd_verify(common, o, out);
    if (revenue->parsed()) return cmd_revenue(common, out);
    if (sweep->parsed()) return cmd_sweep(common, o, out);
    if (curve->parsed()) return cmd_rate_curve(common, o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}

}  // namespace spectramech

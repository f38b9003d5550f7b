// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spectramech/commands.hpp"
#include "spectramech/counterexamples.hpp"
#include "spectramech/fd_mechanism.hpp"
#include "spectramech/quadrature.hpp"
#include "spectramech/random.hpp"
#include "spectramech/simplex_projection.hpp"
#include "spectramech/ss_mechanism.hpp"
#include "spectramech/verification.hpp"

using namespace spectramech;

namespace {

const std::string kExamples = SPECTRAMECH_EXAMPLES_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double uniform(RandomStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// A random FD user together with an independent description of its gain law.
struct RandomFdUser {
  FdUserPhysical physical;
  oracle::Gain gain;
};

// `graded = false` replaces the continuous law by a single Gauss-Legendre rule
// on its support: a cheap stand-in for tests that never compare rates
// against the oracle.
RandomFdUser random_fd_user(RandomStream& rng, int kind, std::size_t order = kDefaultQuadratureOrder,
                            bool graded = true) {
  RandomFdUser u;
  u.physical.transmit_power = uniform(rng, 0.2, 5.0);
  u.physical.noise_density = uniform(rng, 0.1, 2.0);
  switch (kind % 3) {
    case 0: {
      const double h = uniform(rng, 0.05, 4.0);
      u.physical.gain = GainDistribution::deterministic(h);
      u.gain.atoms = {{h, 1.0}};
      break;
    }
    case 1: {
      const std::size_t atoms = 2 + static_cast<std::size_t>(rng.uniform() * 3.0);
      std::vector<double> p(atoms);
      double total = 0.0;
      for (auto& v : p) total += (v = uniform(rng, 0.1, 1.0));
      std::vector<GainPoint> pts;
      for (std::size_t k = 0; k < atoms; ++k) {
        const double h = uniform(rng, 0.05, 4.0);
        pts.push_back({h, p[k] / total});
        u.gain.atoms.push_back({h, p[k] / total});
      }
      u.physical.gain = GainDistribution::discrete(pts);
      break;
    }
    default: {
      // Exponential power gain truncated at `cut`, renormalized.
      const double mean = uniform(rng, 0.3, 2.0);
      const double cut = 8.0 * mean;
      const double kept = -std::expm1(-cut / mean);
      auto density = [mean, kept](double h) { return std::exp(-h / mean) / (mean * kept); };
      if (graded) {
        u.physical.gain = GainDistribution::continuous(density, {0.0, cut}, order, "exponential");
      } else {
        const auto rule = gauss_legendre(order, 0.0, cut);
        std::vector<GainPoint> pts;
        double mass = 0.0;
        for (std::size_t j = 0; j < order; ++j) mass += rule.weights[j] * density(rule.nodes[j]);
        for (std::size_t j = 0; j < order; ++j)
          pts.push_back({rule.nodes[j], rule.weights[j] * density(rule.nodes[j]) / mass});
        u.physical.gain = GainDistribution::discrete(std::move(pts));
      }
      u.gain.density = density;
      u.gain.lo = 0.0;
      u.gain.hi = cut;
      break;
    }
  }
  return u;
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  RandomStream rng(1001);
  std::size_t bad_monotone = 0, bad_concave = 0, bad_slope = 0, bad_value = 0;
  double worst_slope = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto u = random_fd_user(rng, k);
    const double w = uniform(rng, 0.5, 5.0);
    std::vector<double> x(101), psi(101);
    for (std::size_t j = 0; j <= 100; ++j) {
      x[j] = w * static_cast<double>(j) / 100.0;
      psi[j] = expected_rate(u.physical, x[j]);
    }
    for (std::size_t j = 1; j <= 100; ++j)
      if (!(psi[j] >= psi[j - 1])) ++bad_monotone;
    // Every grid point lies on or above every chord spanning it.
    for (std::size_t a = 0; a <= 100; ++a)
      for (std::size_t b = a + 2; b <= 100; ++b)
        for (std::size_t m = a + 1; m < b; ++m) {
          const double t = (x[m] - x[a]) / (x[b] - x[a]);
          const double chord = (1.0 - t) * psi[a] + t * psi[b];
          if (psi[m] < chord - 1e-12 * std::max(1.0, std::abs(chord))) ++bad_concave;
        }
    for (std::size_t j = 1; j <= 100; ++j) {
      const double analytic = expected_rate_derivative(u.physical, x[j]).value();
      const double fd = oracle::richardson([&](double s) { return expected_rate(u.physical, s); }, x[j], 1e-2 * x[j]);
      const double rel = std::abs(analytic - fd) / std::abs(fd);
      worst_slope = std::max(worst_slope, rel);
      if (!(rel <= 1e-5)) ++bad_slope;
    }
    for (std::size_t j : {1u, 50u, 100u}) {
      const double ref = oracle::expected_rate(u.gain, u.physical.transmit_power, u.physical.noise_density, x[j]);
      if (std::abs(psi[j] - ref) > 1e-8 * std::max(1.0, std::abs(ref))) ++bad_value;
    }
  }
  std::ostringstream os;
  os << "50 users; monotonicity violations " << bad_monotone << ", chord violations " << bad_concave
     << ", slope mismatches " << bad_slope << " (worst relative " << worst_slope << "), oracle value mismatches "
     << bad_value;
  return {bad_monotone + bad_concave + bad_slope + bad_value == 0, os.str()};
}

// ---------------------------------------------------------------------------

Outcome criterion_2() {
  RandomStream rng(2002);
  std::size_t failures = 0;
  double worst_kkt = 0.0;
  double least_margin = INFINITY;  // solver - (grid - slack)
  double least_lead = INFINITY;    // solver - grid
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
    const double w = uniform(rng, 0.5, 5.0);
    std::vector<FdUser> users;
    std::vector<RandomFdUser> raw;
    for (std::size_t i = 0; i < n; ++i) {
      raw.push_back(random_fd_user(rng, k + static_cast<int>(i)));
      users.push_back({raw.back().physical, TypeDistribution::uniform(1.0, uniform(rng, 1.5, 4.0))});
    }
    const FdScenario s(w, users);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = s.type(i).quantile(rng.uniform());
    const auto a = fd_allocate(s, t);
    std::vector<std::function<double(double)>> psi;
    for (std::size_t i = 0; i < n; ++i)
      psi.push_back([&raw, i](double x) {
        return oracle::expected_rate(raw[i].gain, raw[i].physical.transmit_power, raw[i].physical.noise_density, x);
      });
    const auto grid = oracle::fd_grid_search(psi, a.virtual_types, w, 200);
    double mine = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (a.virtual_types[i] > 0.0) mine += a.virtual_types[i] * psi[i](a.bandwidth[i]);
    worst_kkt = std::max(worst_kkt, a.kkt_residual);
    least_margin = std::min(least_margin, mine - (grid.objective - grid.slack));
    least_lead = std::min(least_lead, mine - grid.objective);
    if (!(mine >= grid.objective - grid.slack) || !(a.kkt_residual <= 1e-6)) ++failures;
  }
  std::ostringstream os;
  os << "100 instances; failures " << failures << ", worst KKT residual " << worst_kkt
     << ", smallest solver - grid " << least_lead << ", smallest margin over grid - slack " << least_margin;
  return {failures == 0, os.str()};
}

// ---------------------------------------------------------------------------

// Ten FD scenarios with uniform types shared by criteria 3, 4 and 5.
std::vector<FdScenario> uniform_scenarios() {
  RandomStream rng(3003);
  const std::size_t sizes[] = {1, 2, 2, 3, 1, 2, 3, 2, 1, 2};
  std::vector<FdScenario> out;
  for (int k = 0; k < 10; ++k) {
    std::vector<FdUser> users;
    for (std::size_t i = 0; i < sizes[k]; ++i) {
      const auto u = random_fd_user(rng, k + static_cast<int>(i), 8, false);
      const double lo = uniform(rng, 0.0, 1.5);
      users.push_back({u.physical, TypeDistribution::uniform(lo, lo + uniform(rng, 0.5, 2.0))});
    }
    out.emplace_back(uniform(rng, 0.5, 3.0), std::move(users));
  }
  return out;
}

struct FdVerification {
  std::vector<std::vector<UserVerification>> users;  // [scenario][user]
};

const FdVerification& fd_verification() {
  static const FdVerification cache = [] {
    FdVerification v;
    VerificationSettings vs;
    vs.samples = 4096;
    vs.seed = 4242;
    for (const auto& s : uniform_scenarios()) {
      const FdMechanism m(s, 64);
      std::vector<UserVerification> per;
      for (std::size_t i = 0; i < s.size(); ++i) per.push_back(verify_user(m, i, support_grid(m, i, 17), vs));
      v.users.push_back(std::move(per));
    }
    return v;
  }();
  return cache;
}

Outcome criterion_3() {
  const auto& v = fd_verification();
  std::size_t cells = 0, failed = 0;
  double worst = 0.0;  // max |residual| / tolerance
  for (const auto& sc : v.users)
    for (const auto& u : sc) {
      const auto& id = u.identity;
      for (std::size_t k = 0; k < id.residual.size(); ++k) {
        ++cells;
        if (id.tolerance[k] > 0.0) worst = std::max(worst, std::abs(id.residual[k]) / id.tolerance[k]);
      }
      if (!id.passed) ++failed;
    }
  std::ostringstream os;
  os << "10 scenarios, " << cells << " report cells, 4096 draws, grid_M 64; failing users " << failed
     << ", worst |residual| / tolerance " << worst;
  return {failed == 0, os.str()};
}

Outcome criterion_4() {
  const auto& v = fd_verification();
  std::size_t ic_fail = 0, ir_fail = 0, ic_cells = 0;
  double worst_gain = -INFINITY;
  for (const auto& sc : v.users)
    for (const auto& u : sc) {
      for (const auto& r : u.ic) {
        ++ic_cells;
        if (!r.passed) ++ic_fail;
        worst_gain = std::max(worst_gain, r.best_gain - r.tax_error_bound - 3.0 * r.best_gain_std_error);
      }
      if (!u.ir.passed) ++ir_fail;
    }

  // Doubling grid_M on instances whose integrand is monotone.
  RandomStream rng(4004);
  std::size_t instances = 0, halving_fail = 0;
  double worst_ratio = 0.0;
  for (const auto& s : uniform_scenarios()) {
    for (int draw = 0; draw < 4; ++draw) {
      std::vector<double> t(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) t[i] = s.type(i).quantile(rng.uniform());
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto a = fd_user_payment(s, t, i, 64);
        const auto b = fd_user_payment(s, t, i, 128);
        if (a.nonmonotone_samples || b.nonmonotone_samples || a.error_bound == 0.0) continue;
        ++instances;
        worst_ratio = std::max(worst_ratio, b.error_bound / a.error_bound);
        // The bound is exactly proportional to the spacing; allow rounding in the
        // shared endpoint evaluations.
        if (!(b.error_bound <= 0.5 * a.error_bound * (1.0 + 1e-9))) ++halving_fail;
      }
    }
  }
  std::ostringstream os;
  os << ic_cells << " IC cells (17 reports each), failures " << ic_fail << ", worst gain - (eps + 3 se) "
     << worst_gain << "; IR failures " << ir_fail << "; grid doubling on " << instances
     << " monotone instances, worst eps ratio " << std::setprecision(17) << worst_ratio << ", failures " << halving_fail;
  return {ic_fail == 0 && ir_fail == 0 && halving_fail == 0 && instances > 0, os.str()};
}

Outcome criterion_5() {
  std::size_t failed = 0;
  std::ostringstream os;
  os << "10 scenarios, 4096 draws;";
  int k = 0;
  for (const auto& s : uniform_scenarios()) {
    const auto r = fd_expected_revenue(s, 4096, 5005 + static_cast<std::uint64_t>(k), 64);
    const bool ok = r.identity_holds(3.0) && r.payment_revenue <= r.omniscient_bound &&
                    r.virtual_surplus <= r.omniscient_bound;
    if (!ok) {
      ++failed;
      os << " [scenario " << k << ": payment " << r.payment_revenue << ", virtual " << r.virtual_surplus
         << ", bound " << r.omniscient_bound << "]";
    }
    ++k;
  }
  os << " failures " << failed;
  return {failed == 0, os.str()};
}

// ---------------------------------------------------------------------------

Outcome criterion_6() {
  FdUserPhysical p0, p1;
  p1.gain = GainDistribution::discrete({{0.4, 0.5}, {1.2, 0.5}});
  p1.transmit_power = 2.0;
  const FdScenario s(1.0, {{p0, TypeDistribution::uniform(1.0, 2.0)}, {p1, TypeDistribution::uniform(1.0, 3.0)}});
  VerificationSettings vs;
  vs.seed = 6006;
  const FlatFeeMechanism flat(s, 0.1);
  const ReportProportionalMechanism prop(s);
  std::ostringstream os;
  bool pass = true;
  for (const Mechanism* m : {static_cast<const Mechanism*>(&flat), static_cast<const Mechanism*>(&prop)}) {
    std::size_t ic_fail = 0, id_fail = 0;
    for (std::size_t i = 0; i < m->size(); ++i) {
      const auto v = verify_user(*m, i, support_grid(*m, i, 17), vs);
      for (const auto& r : v.ic) ic_fail += r.passed ? 0 : 1;
      id_fail += v.identity.passed ? 0 : 1;
    }
    os << m->name() << ": failing IC cells " << ic_fail << ", failing identity users " << id_fail << "; ";
    pass = pass && ic_fail > 0 && id_fail > 0;
  }
  return {pass, os.str()};
}

// ---------------------------------------------------------------------------

std::vector<double> random_gains(RandomStream& rng, std::size_t n) {
  std::vector<double> h(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) h[j * n + i] = i == j ? uniform(rng, 0.3, 3.0) : uniform(rng, 0.0, 1.0);
  return h;
}

Outcome criterion_7() {
  RandomStream rng(7007);
  std::size_t grad_fail = 0;
  double worst_grad = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 3);
    const SsPhysical phys(n, random_gains(rng, n), uniform(rng, 0.5, 3.0), uniform(rng, 0.2, 2.0));
    const double budget = uniform(rng, 0.5, 5.0);
    std::vector<double> w(n), x(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = uniform(rng, -0.5, 2.0);
      total += (x[i] = uniform(rng, 0.05, 1.0));
    }
    const double fill = uniform(rng, 0.2, 0.95);
    for (auto& v : x) v *= fill * budget / total;
    const auto g = ss_objective_gradient(phys, w, x);
    double err = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      auto f = [&](double s) {
        auto y = x;
        y[j] = s;
        return ss_objective(phys, w, y);
      };
      const double fd = oracle::richardson(f, x[j], 1e-2 * x[j]);
      err = std::max(err, std::abs(g[j] - fd));
      scale = std::max(scale, std::abs(fd));
    }
    worst_grad = std::max(worst_grad, err / scale);
    if (!(err <= 1e-5 * scale)) ++grad_fail;
  }

  std::size_t oracle_fail = 0, feasibility_fail = 0, determinism_fail = 0;
  double least_lead = INFINITY;  // solver - grid
  for (int k = 0; k < 50; ++k) {
    const auto h = random_gains(rng, 2);
    const double bw = uniform(rng, 0.5, 3.0);
    const double n0 = uniform(rng, 0.2, 2.0);
    const double budget = uniform(rng, 0.5, 5.0);
    const SsPhysical phys(2, h, bw, n0);
    const std::vector<double> w{uniform(rng, -0.3, 2.0), uniform(rng, -0.3, 2.0)};
    const std::uint64_t seed = 77 + static_cast<std::uint64_t>(k);
    const auto a = ss_allocate_weights(phys, budget, w, {}, seed);
    const auto grid = oracle::ss_grid_search(h, bw, n0, budget, w, 300);
    double mine = 0.0;
    for (std::size_t i = 0; i < 2; ++i) mine += w[i] * oracle::interference_rate(2, h, bw, n0, a.power, i);
    least_lead = std::min(least_lead, mine - grid.objective);
    if (!(mine >= grid.objective - grid.slack)) ++oracle_fail;
    if (!(a.power[0] >= 0.0 && a.power[1] >= 0.0 && a.power[0] + a.power[1] <= budget * (1 + 1e-12)))
      ++feasibility_fail;
    setenv("SPECTRAMECH_THREADS", "2", 1);
    const auto b = ss_allocate_weights(phys, budget, w, {}, seed);
    unsetenv("SPECTRAMECH_THREADS");
    if (a.power != b.power || a.objective != b.objective || a.best_restart != b.best_restart) ++determinism_fail;
  }
  std::ostringstream os;
  os << "gradient: 100 points, failures " << grad_fail << " (worst relative " << worst_grad << "); multistart: 50 "
     << "instances, oracle failures " << oracle_fail << " (smallest solver - grid " << least_lead
     << "), infeasible " << feasibility_fail << ", non-deterministic " << determinism_fail;
  return {grad_fail + oracle_fail + feasibility_fail + determinism_fail == 0, os.str()};
}

// ---------------------------------------------------------------------------

Outcome criterion_8() {
  RandomStream rng(8008);
  SsSolverOptions opt;
  opt.restarts = 8;
  VerificationSettings vs;
  vs.samples = 4096;
  vs.seed = 8080;
  std::size_t mono_fail = 0, base_fail = 0, flagged = 0, unflagged = 0, payments = 0;
  for (int k = 0; k < 5; ++k) {
    const auto h = random_gains(rng, 2);
    std::vector<TypeDistribution> types;
    for (int i = 0; i < 2; ++i) {
      const double lo = uniform(rng, 0.5, 1.5);
      types.push_back(TypeDistribution::uniform(lo, lo + uniform(rng, 0.5, 2.0)));
    }
    const SsScenario s(uniform(rng, 1.0, 5.0), SsPhysical(2, h, uniform(rng, 0.5, 2.0), uniform(rng, 0.3, 1.5)),
                       types);
    const std::uint64_t solver_seed = 900 + static_cast<std::uint64_t>(k);
    const SsMechanism m(s, 32, opt, solver_seed);
    for (std::size_t i = 0; i < 2; ++i) {
      if (!verify_monotone_interim(m, i, support_grid(m, i, 17), vs).passed) ++mono_fail;
      const std::vector<double> base{s.type(i).min()};
      const auto id = verify_payment_identity(m, i, base, vs);
      if (!id.passed || id.residual.front() != 0.0) ++base_fail;
    }
    // Recount decreases of the tax integrand independently for a few draws.
    for (std::size_t d = 0; d < 6; ++d) {
      std::vector<double> t(2);
      draw_types(types, derive_seed(vs.seed + 1, d), t);
      for (std::size_t i = 0; i < 2; ++i) {
        const auto tax = ss_user_payment(s, t, i, 32, opt, solver_seed);
        ++payments;
        std::size_t count = 0;
        auto u = t;
        double prev = 0.0;
        const double lo = s.type(i).min();
        for (std::size_t j = 0; j <= 32; ++j) {
          u[i] = j == 32 ? t[i] : lo + (t[i] - lo) * (static_cast<double>(j) / 32.0);
          const double g = ss_allocate(s, u, opt, solver_seed).rates[i];
          if (j > 0 && g < prev - kMonotoneTolerance * std::max(1.0, std::abs(prev))) ++count;
          prev = g;
        }
        if (t[i] == lo) count = 0;
        flagged += tax.nonmonotone_samples;
        if (count != tax.nonmonotone_samples) ++unflagged;
      }
    }
  }
  std::ostringstream os;
  os << "5 scenarios, 4096 draws; monotonicity failures " << mono_fail << ", base-condition failures " << base_fail
     << "; " << payments << " payments recounted, non-monotone samples flagged " << flagged << ", mismatched counts "
     << unflagged;
  return {mono_fail + base_fail + unflagged == 0, os.str()};
}

// ---------------------------------------------------------------------------

Outcome criterion_9() {
  const std::string fd = kExamples + "/fd_three_users.json";
  const std::string ss = kExamples + "/ss_two_users.json";
  const std::vector<std::vector<std::string>> commands{
      {"validate", "--config", fd},
      {"allocate", "--config", fd, "--sample", "3"},
      {"tax", "--config", fd, "--theta", "1.5,2.0,1.0"},
      {"interim", "--config", fd, "--user", "1", "--report", "2.0", "--mc-samples", "64"},
      {"verify", "--config", fd, "--mc-samples", "16", "--grid-m", "16"},
      {"revenue", "--config", fd, "--mc-samples", "128"},
      {"sweep", "--config", fd, "--param", "W", "--values", "1,2", "--mc-samples", "32", "--format", "csv"},
      {"rate-curve", "--config", fd, "--user", "0", "--points", "17"},
      {"allocate", "--config", ss, "--sample", "1"},
      {"interim", "--config", ss, "--user", "0", "--mc-samples", "16"},
      {"revenue", "--config", ss, "--mc-samples", "16", "--grid-m", "8"},
      {"sweep", "--config", ss, "--param", "P_total", "--values", "2,4", "--mc-samples", "8", "--grid-m", "8"},
      {"rate-curve", "--config", ss, "--user", "1", "--points", "9"},
  };
  std::size_t differ = 0, errors = 0;
  std::ostringstream os;
  for (const auto& args : commands) {
    std::string outputs[3];
    const char* threads[] = {"1", "1", "3"};
    for (int rep = 0; rep < 3; ++rep) {
      setenv("SPECTRAMECH_THREADS", threads[rep], 1);
      std::ostringstream out, err;
      const int code = run_command(args, out, err);
      if (code != kExitOk) ++errors;
      outputs[rep] = out.str();
    }
    unsetenv("SPECTRAMECH_THREADS");
    if (outputs[0] != outputs[1] || outputs[0] != outputs[2] || outputs[0].empty()) {
      ++differ;
      os << "[" << args[0] << " differs] ";
    }
  }
  os << commands.size() << " commands run three times (1, 1, 3 threads); differing payloads " << differ
     << ", non-zero exits " << errors;
  return {differ == 0 && errors == 0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds;  // 0: no runtime requirement
  };
  const std::vector<Entry> entries{
      {1, "rate-function suite", criterion_1, 10.0},
      {2, "FD solver vs grid oracle", criterion_2, 120.0},
      {3, "payment identity", criterion_3, 0.0},
      {4, "epsilon-IC and epsilon-IR", criterion_4, 0.0},
      {5, "revenue identity", criterion_5, 0.0},
      {6, "counterexample sensitivity", criterion_6, 0.0},
      {7, "SS solver", criterion_7, 300.0},
      {8, "SS mechanism properties", criterion_8, 0.0},
      {9, "reproducibility", criterion_9, 0.0},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));

  int failures = 0;
  for (const auto& e : entries) {
    if (!only.empty() && !only.count(e.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (e.budget_seconds > 0.0 && secs > e.budget_seconds) {
      o.pass = false;
      o.detail += "; runtime over budget";
    }
    std::printf("[%s] criterion %d (%s): %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", e.id, e.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

// hyhardy — batch CLI over the library: kernel tables, invariant suites,
// quotient minimization, ball masses, the lambda* threshold, and existence
// certificates. JSON is the canonical output (schema_version "1", keys
// sorted, bytes deterministic for a fixed config and seed); CSV is
// available for the kernels table only.
//
// Exit codes: 0 success, 1 failed verification/internal numerical failure,
// 2 validation error (bad flags or parameters), 3 mathematical refusal
// (non-coercive operator, wrong regime, bad bracket).

#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyhardy/conformal.hpp"
#include "hyhardy/kernels.hpp"
#include "hyhardy/mass.hpp"
#include "hyhardy/params.hpp"
#include "hyhardy/radial.hpp"
#include "hyhardy/variational.hpp"
#include "hyhardy/verify.hpp"

namespace {

using nlohmann::json;
using namespace hyhardy;

constexpr const char* kSchemaVersion = "1";

// ------------------------------------------------------------------ output

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open output file '" + path + "'");
  out << text;
}

void emit_json(json doc, const std::string& path) {
  doc["schema_version"] = kSchemaVersion;
  write_text(doc.dump(2) + "\n", path);
}

// JSON has no representation for non-finite doubles; nlohmann would emit
// a literal null anyway, so make the substitution explicit.
json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

// ------------------------------------------------------------ shared flags

struct CommonParams {
  int n = 3;
  double gamma = 0.0;
  double s = 0.0;
  double lambda = 0.0;
  double theta = 0.0;
};

void add_param_flags(CLI::App* cmd, CommonParams& p, bool with_s = true) {
  cmd->add_option("--n", p.n, "dimension (>= 3)")->required();
  cmd->add_option("--gamma", p.gamma, "Hardy coupling (< (n-2)^2/4)")->required();
  if (with_s) cmd->add_option("--s", p.s, "Hardy-Sobolev parameter in [0,2)");
  cmd->add_option("--lambda", p.lambda, "linear perturbation coupling");
  cmd->add_option("--theta", p.theta, "declared singularity order of h, in [0,2)");
}

json params_json(const ProblemParams& p) {
  return json{{"n", p.n}, {"gamma", p.gamma}, {"s", p.s},
              {"lambda", p.lambda}, {"theta", p.theta}};
}

int thread_count(int flag_value) {
  if (const char* env = std::getenv("HYHARDY_THREADS")) {
    try {
      const int k = std::stoi(env);
      if (k >= 1) return k;
    } catch (...) {
      throw validation_error("HYHARDY_THREADS must be a positive integer, got '" +
                             std::string(env) + "'");
    }
    throw validation_error("HYHARDY_THREADS must be a positive integer, got '" +
                           std::string(env) + "'");
  }
  if (flag_value >= 1) return flag_value;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Fan a batch of independent jobs over a fixed-size pool; results land at
// their input index, so output order never depends on completion order.
template <typename Fn>
void run_indexed(int jobs, int threads, Fn&& fn) {
  if (jobs <= 1 || threads <= 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int workers = std::min(threads, jobs);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------- kernels

struct KernelsArgs {
  int n = 3;
  double p = 2.0;
  std::vector<double> r_values;
  std::string r_grid; // "lo:hi:count[:uniform]"
  std::string format = "json";
  std::string output;
};

std::vector<double> parse_r_spec(const KernelsArgs& a) {
  std::vector<double> r = a.r_values;
  if (!a.r_grid.empty()) {
    std::vector<std::string> parts;
    std::stringstream ss(a.r_grid);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() < 3 || parts.size() > 4)
      throw validation_error("--r-grid expects lo:hi:count[:uniform|geometric]");
    double lo, hi;
    int count;
    try {
      lo = std::stod(parts[0]);
      hi = std::stod(parts[1]);
      count = std::stoi(parts[2]);
    } catch (...) {
      throw validation_error("--r-grid expects numeric lo:hi:count");
    }
    const bool uniform = parts.size() == 4 && parts[3] == "uniform";
    if (parts.size() == 4 && parts[3] != "uniform" && parts[3] != "geometric")
      throw validation_error("--r-grid scheme must be 'uniform' or 'geometric'");
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
      throw validation_error("--r-grid needs 0 < lo < hi and count >= 2");
    for (int i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / (count - 1);
      r.push_back(uniform ? lo + (hi - lo) * t : lo * std::pow(hi / lo, t));
    }
  }
  if (r.empty()) throw validation_error("kernels: provide --r values or --r-grid");
  for (double x : r)
    if (!(x > 0.0) || x > 1.0)
      throw validation_error("kernels: r must lie in (0, 1], got " + std::to_string(x));
  return r;
}

int cmd_kernels(const KernelsArgs& a) {
  if (a.n < 3) throw validation_error("kernels: dimension must be >= 3");
  if (!(a.p >= 1.0)) throw validation_error("kernels: p must be >= 1");
  const std::vector<double> r = parse_r_spec(a);

  struct Row {
    double r, f, G, Vp;
  };
  std::vector<Row> rows;
  rows.reserve(r.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double x : r) {
    Row row{x, nan, nan, nan};
    row.G = green_G(a.n, x);
    // f and V_p live on the open interval; at r = 1 only G extends (G=0).
    try {
      row.f = f_weight(a.n, x);
    } catch (const std::exception&) {
    }
    try {
      row.Vp = weight_V_p(a.n, a.p, x);
    } catch (const std::exception&) {
    }
    rows.push_back(row);
  }

  if (a.format == "csv") {
    std::ostringstream out;
    out.precision(17);
    out << "r,f,G,V_p\n";
    for (const auto& row : rows) {
      out << row.r << ',';
      if (std::isfinite(row.f)) out << row.f;
      out << ',' << row.G << ',';
      if (std::isfinite(row.Vp)) out << row.Vp;
      out << '\n';
    }
    write_text(out.str(), a.output);
    return 0;
  }
  if (a.format != "json")
    throw validation_error("kernels: --format must be json or csv");
  json doc;
  doc["command"] = "kernels";
  doc["n"] = a.n;
  doc["p"] = a.p;
  json jrows = json::array();
  for (const auto& row : rows)
    jrows.push_back(json{{"r", row.r},
                         {"f", finite_or_null(row.f)},
                         {"G", row.G},
                         {"V_p", finite_or_null(row.Vp)}});
  doc["rows"] = jrows;
  emit_json(doc, a.output);
  return 0;
}

// ----------------------------------------------------------------- verify

int cmd_verify(const std::string& suite, const std::string& output) {
  const VerifyReport report = run_verify_suite(suite);
  json doc;
  doc["command"] = "verify";
  doc["suite"] = report.suite;
  json checks = json::array();
  for (const auto& c : report.checks) {
    json jc;
    jc["name"] = c.name;
    jc["status"] = c.informational ? "info" : (c.passed ? "pass" : "fail");
    jc["measured"] = finite_or_null(c.measured);
    jc["tolerance"] = c.tolerance;
    if (!c.note.empty()) jc["note"] = c.note;
    checks.push_back(jc);
  }
  doc["checks"] = checks;
  doc["all_passed"] = report.all_passed();
  emit_json(doc, output);
  return report.all_passed() ? 0 : 1;
}

// --------------------------------------------------------------------- mu

struct MuArgs {
  CommonParams p;
  double ball_radius = 0.5;
  double grid_rmin = 1e-6;
  int grid_count = 801;
  unsigned seed = 9001;
  std::string output;
};

int cmd_mu(const MuArgs& a) {
  const auto params = make_params(a.p.n, a.p.gamma, a.p.s, a.p.lambda, a.p.theta);
  if (!(a.grid_rmin > 0.0) || a.grid_rmin >= a.ball_radius)
    throw validation_error("mu: --grid-rmin must lie in (0, ball radius)");
  if (a.grid_count < 16 || a.grid_count > 100000)
    throw validation_error("mu: --grid-count must lie in [16, 100000]");
  auto grid = RadialGrid::hyperbolic(a.grid_rmin * a.ball_radius, a.ball_radius,
                                     static_cast<std::size_t>(a.grid_count));
  MinimizeOptions opt;
  opt.seed = a.seed;
  const MinimizeResult res = minimize_quotient(params, a.ball_radius, grid, opt);
  const auto problem = build_euclidean_problem(params, a.ball_radius);
  const double threshold = attainment_threshold(params, problem);

  json doc;
  doc["command"] = "mu";
  doc["params"] = params_json(params);
  doc["ball_radius"] = a.ball_radius;
  doc["seed"] = a.seed;
  doc["grid"] = json{{"r_min_fraction", a.grid_rmin}, {"count", a.grid_count},
                     {"scheme", "geometric"}};
  doc["mu_est"] = res.mu_est;
  doc["iterations"] = res.history.size();
  doc["stationarity"] = res.stationarity;
  doc["threshold"] = threshold;
  doc["margin_vs_threshold"] = threshold - res.mu_est;
  emit_json(doc, a.output);
  return 0;
}

// ------------------------------------------------------------------- mass

struct MassArgs {
  CommonParams p;
  double ball_radius = 0.0;         // hyperbolic mode
  double unperturbed_radius = 0.0;  // h = 0 Euclidean oracle mode
  std::vector<double> lambdas;      // sweep (hyperbolic mode)
  double r0 = 0.0;
  int threads_flag = 0;
  std::string output;
};

json mass_report_json(const MassReport& rep) {
  return json{{"c1", rep.c1},
              {"c2", rep.c2},
              {"mass", rep.mass},
              {"mass_hyperbolic", rep.mass_hyperbolic},
              {"r0_used", rep.r0_used},
              {"r0_halved_delta", rep.r0_halved_delta}};
}

int cmd_mass(const MassArgs& a) {
  const bool hyp = a.ball_radius > 0.0;
  const bool unp = a.unperturbed_radius > 0.0;
  if (hyp == unp)
    throw validation_error("mass: pass exactly one of --ball-radius (hyperbolic) or "
                           "--unperturbed-radius (h=0 Euclidean oracle)");

  json doc;
  doc["command"] = "mass";

  if (unp) {
    const auto params = make_params(a.p.n, a.p.gamma, 0.0, 0.0, 0.0);
    EuclideanProblem problem;
    problem.params = params;
    problem.R = a.unperturbed_radius;
    problem.h = [](double) { return 0.0; };
    problem.b = [](double) { return 1.0; };
    ShootingConfig config;
    config.R = a.unperturbed_radius;
    config.r0 = a.r0;
    const MassReport rep = euclidean_mass(params, problem, config);
    doc["params"] = params_json(params);
    doc["domain"] = json{{"kind", "euclidean_unperturbed"}, {"radius", a.unperturbed_radius}};
    json result = mass_report_json(rep);
    result.erase("mass_hyperbolic"); // no hyperbolic provenance in this mode
    doc["result"] = result;
    const auto e = exponents(params);
    doc["oracle_closed_form"] = -std::pow(a.unperturbed_radius, -(e.beta_plus - e.beta_minus));
    emit_json(doc, a.output);
    return 0;
  }

  std::vector<double> lambdas = a.lambdas;
  if (lambdas.empty()) lambdas.push_back(a.p.lambda);
  doc["domain"] = json{{"kind", "hyperbolic_ball"}, {"ball_radius", a.ball_radius}};

  // exceptions from worker threads are rethrown after the join
  std::vector<json> results(lambdas.size());
  std::vector<std::exception_ptr> errors(lambdas.size());
  run_indexed(static_cast<int>(lambdas.size()), thread_count(a.threads_flag), [&](int i) {
    try {
      const auto params = make_params(a.p.n, a.p.gamma, a.p.s, lambdas[i], a.p.theta);
      const MassReport rep = hyperbolic_mass(params, a.ball_radius);
      json r = mass_report_json(rep);
      r["lambda"] = lambdas[i];
      results[i] = std::move(r);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const auto params0 = make_params(a.p.n, a.p.gamma, a.p.s, lambdas.front(), a.p.theta);
  doc["params"] = params_json(params0);
  if (results.size() == 1) {
    doc["result"] = results.front();
  } else {
    doc["results"] = results;
  }
  emit_json(doc, a.output);
  return 0;
}

// ------------------------------------------------------------ lambda-star

struct LambdaStarArgs {
  CommonParams p;
  double ball_radius = 0.5;
  std::vector<double> bracket;
  std::string output;
};

int cmd_lambda_star(const LambdaStarArgs& a) {
  const auto params = make_params(a.p.n, a.p.gamma, a.p.s, 0.0, a.p.theta);
  if (a.bracket.size() != 2 || !(a.bracket[0] < a.bracket[1]))
    throw validation_error("lambda-star: --bracket expects LO HI with LO < HI");
  const double star = lambda_star(params, a.ball_radius, {a.bracket[0], a.bracket[1]});

  // Sign certificate: the mass flips across lambda* +- 1e-3. A coercivity
  // refusal on the high side counts as the positive side (the operator
  // loses coercivity only above the sign change).
  const double width = 1e-3;
  json below = nullptr, above = nullptr;
  {
    const auto pm = make_params(a.p.n, a.p.gamma, a.p.s, star - width, a.p.theta);
    below = hyperbolic_mass(pm, a.ball_radius).mass_hyperbolic;
  }
  try {
    const auto pp = make_params(a.p.n, a.p.gamma, a.p.s, star + width, a.p.theta);
    above = hyperbolic_mass(pp, a.ball_radius).mass_hyperbolic;
  } catch (const refusal_error&) {
    // leave null: refused as non-coercive, which certifies the sign change
  }

  json doc;
  doc["command"] = "lambda-star";
  doc["params"] = params_json(params);
  doc["ball_radius"] = a.ball_radius;
  doc["bracket"] = json::array({a.bracket[0], a.bracket[1]});
  doc["lambda_star"] = star;
  doc["sign_certificate"] =
      json{{"width", width},
           {"mass_below", below},
           {"mass_above", above},
           {"note", above.is_null()
                        ? "mass(lambda*-w) < 0; lambda*+w refused as non-coercive"
                        : "mass(lambda*-w) < 0 < mass(lambda*+w)"}};
  emit_json(doc, a.output);
  return 0;
}

// ------------------------------------------------------------ certificate

struct CertificateArgs {
  CommonParams p;
  double ball_radius = 0.5;
  std::string output;
};

const char* regime_name(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::HighDim: return "high_dim";
    case RegimeKind::LowDimMassNeeded: return "low_dim_mass_needed";
    case RegimeKind::Infeasible: return "infeasible";
  }
  return "unknown";
}

int cmd_certificate(const CertificateArgs& a) {
  const auto params = make_params(a.p.n, a.p.gamma, a.p.s, a.p.lambda, a.p.theta);
  const Certificate cert = existence_certificate(params, a.ball_radius);

  json doc;
  doc["command"] = "certificate";
  doc["params"] = params_json(params);
  doc["ball_radius"] = a.ball_radius;
  json regime;
  regime["kind"] = regime_name(cert.regime.kind);
  regime["log_type"] = cert.regime.log_type;
  if (cert.regime.threshold_lambda)
    regime["threshold_lambda"] = *cert.regime.threshold_lambda;
  doc["regime"] = regime;
  doc["threshold"] = cert.threshold;
  doc["mu_estimate"] = cert.mu_estimate;
  doc["eps_used"] = cert.eps_used;
  doc["satisfied"] = cert.satisfied;
  doc["inconclusive"] = cert.inconclusive;
  doc["numerical_margin"] = cert.numerical_margin;
  if (cert.mass_input) doc["mass_input"] = mass_report_json(*cert.mass_input);
  emit_json(doc, a.output);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyhardy: Hardy-Schrodinger quotients, masses, and existence "
               "certificates on the hyperbolic ball"};
  app.require_subcommand(1);
  app.fallthrough(); // let --config (a parent option) appear after the subcommand
  app.set_config("--config", "", "flat key=value config file; sections mirror "
                 "subcommands; command-line flags win on conflict");

  KernelsArgs ka;
  auto* k = app.add_subcommand("kernels", "tabulate f, G, and V_p");
  k->add_option("--n", ka.n, "dimension (>= 3)")->required();
  k->add_option("--p", ka.p, "V_p exponent (>= 1)");
  k->add_option("--r", ka.r_values, "radius value(s) in (0, 1]");
  k->add_option("--r-grid", ka.r_grid, "radius grid lo:hi:count[:uniform|geometric]");
  k->add_option("--format", ka.format, "json or csv");
  k->add_option("--output", ka.output, "output path (default stdout)");

  std::string suite = "all";
  std::string verify_output;
  auto* v = app.add_subcommand("verify", "run an invariant suite");
  v->add_option("--suite", suite, "kernels, scaling, hardy, conformal, mass, or all");
  v->add_option("--output", verify_output, "output path (default stdout)");

  MuArgs ma;
  auto* m = app.add_subcommand("mu", "minimize the Rayleigh quotient on a hyperbolic ball");
  add_param_flags(m, ma.p);
  m->add_option("--ball-radius", ma.ball_radius, "Euclidean radius of the hyperbolic ball, in (0,1)")
      ->required();
  m->add_option("--grid-rmin", ma.grid_rmin, "first grid node as a fraction of the ball radius");
  m->add_option("--grid-count", ma.grid_count, "grid node count");
  m->add_option("--seed", ma.seed, "RNG seed for the minimizer restarts");
  m->add_option("--output", ma.output, "output path (default stdout)");

  MassArgs sa;
  auto* s = app.add_subcommand("mass", "mass of a centered ball (dual shooting)");
  add_param_flags(s, sa.p);
  s->add_option("--ball-radius", sa.ball_radius, "hyperbolic ball radius in (0,1)");
  s->add_option("--unperturbed-radius", sa.unperturbed_radius,
                "Euclidean radius for the h=0 closed-form oracle mode");
  s->add_option("--lambda-sweep", sa.lambdas, "evaluate several lambda values (hyperbolic mode)");
  s->add_option("--r0", sa.r0, "inner start radius override (unperturbed mode; 0 = default)");
  s->add_option("--threads", sa.threads_flag,
                "worker pool size for sweeps (default: HYHARDY_THREADS or hardware)");
  s->add_option("--output", sa.output, "output path (default stdout)");

  LambdaStarArgs la;
  auto* l = app.add_subcommand("lambda-star", "largest lambda with nonpositive hyperbolic mass");
  add_param_flags(l, la.p);
  l->add_option("--ball-radius", la.ball_radius, "hyperbolic ball radius in (0,1)")->required();
  l->add_option("--bracket", la.bracket, "bracket LO HI with mass signs differing")
      ->expected(2)
      ->required();
  l->add_option("--output", la.output, "output path (default stdout)");

  CertificateArgs ca;
  auto* c = app.add_subcommand("certificate", "existence certificate for the hyperbolic problem");
  add_param_flags(c, ca.p);
  c->add_option("--ball-radius", ca.ball_radius, "hyperbolic ball radius in (0,1)")->required();
  c->add_option("--output", ca.output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (k->parsed()) return cmd_kernels(ka);
    if (v->parsed()) return cmd_verify(suite, verify_output);
    if (m->parsed()) return cmd_mu(ma);
    if (s->parsed()) return cmd_mass(sa);
    if (l->parsed()) return cmd_lambda_star(la);
    if (c->parsed()) return cmd_certificate(ca);
  } catch (const validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const refusal_error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

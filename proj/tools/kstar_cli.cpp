// kstar: evaluate star products at a point, compare them with the recursion
// oracle, and run the verification suite.
//
// Exit codes: 0 success, 1 check failure, 2 usage or parse error,
// 3 numerical precondition failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kstar/errors.hpp"
#include "kstar/expr.hpp"
#include "kstar/geometry.hpp"
#include "kstar/oracle.hpp"
#include "kstar/presets.hpp"
#include "kstar/star.hpp"
#include "kstar/verification.hpp"

namespace {

using kstar::CheckResult;
using kstar::Complex;
using kstar::Expr;
using nlohmann::json;

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

struct RunConfig {
  std::string command;
  std::string preset;
  std::string potential;
  std::optional<int> n;
  std::vector<std::string> point;
  std::string f, g, h;
  std::string variant = "standard";
  int jet_order = 10;
  std::uint64_t seed = 1;
  int trials = 20;
  std::optional<double> tol;
  bool json = false;
};

struct Chart {
  std::string label;
  Expr phi;
  kstar::ChartPoint point;
  bool flat = false;
};

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json config_json(const RunConfig& cfg) {
  json j = {{"command", cfg.command}, {"variant", cfg.variant}, {"trials", cfg.trials}};
  j["preset"] = cfg.preset.empty() ? json(nullptr) : json(cfg.preset);
  j["potential"] = cfg.potential.empty() ? json(nullptr) : json(cfg.potential);
  j["n"] = cfg.n ? json(*cfg.n) : json(nullptr);
  j["point"] = cfg.point;
  j["f"] = cfg.f;
  j["g"] = cfg.g;
  j["h"] = cfg.h;
  j["tol"] = cfg.tol ? json(*cfg.tol) : json(nullptr);
  return j;
}

json check_json(const CheckResult& c) {
  return {{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}, {"context", c.context}};
}

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void print_check(const CheckResult& c) {
  std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual=" << fmt(c.residual) << "  tol=" << fmt(c.tolerance) << "  ["
            << c.context << "]\n";
}

bool all_pass(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

kstar::StarVariant parse_variant(const std::string& s) {
  if (s == "standard") return kstar::StarVariant::standard;
  if (s == "modified") return kstar::StarVariant::modified;
  throw kstar::UsageError("unknown variant '" + s + "' (expected standard or modified)");
}

int chart_dimension(const RunConfig& cfg) {
  if (cfg.n) {
    if (*cfg.n < 1) throw kstar::UsageError("--n must be at least 1");
    if (!cfg.point.empty() && static_cast<int>(cfg.point.size()) != *cfg.n)
      throw kstar::UsageError("--point has " + std::to_string(cfg.point.size()) + " components but --n is " + std::to_string(*cfg.n));
    return *cfg.n;
  }
  return cfg.point.empty() ? 1 : static_cast<int>(cfg.point.size());
}

std::optional<Chart> user_chart(const RunConfig& cfg) {
  if (!cfg.preset.empty() && !cfg.potential.empty()) throw kstar::UsageError("give either --preset or --potential, not both");
  if (cfg.preset.empty() && cfg.potential.empty()) return std::nullopt;
  const int n = chart_dimension(cfg);
  std::vector<Complex> z(static_cast<std::size_t>(n), Complex{});
  for (std::size_t k = 0; k < cfg.point.size(); ++k) z[k] = kstar::parse_complex(cfg.point[k]);
  Chart chart;
  chart.point = kstar::ChartPoint::from_holomorphic(std::move(z));
  if (!cfg.preset.empty()) {
    chart.phi = kstar::preset_potential(cfg.preset, n);
    kstar::check_preset_point(cfg.preset, chart.point);
    chart.label = "preset " + cfg.preset;
    chart.flat = cfg.preset == "flat";
  } else {
    chart.phi = kstar::parse(cfg.potential, n);
    chart.label = "potential " + cfg.potential;
  }
  return chart;
}

Chart require_chart(const RunConfig& cfg) {
  if (auto c = user_chart(cfg)) return *c;
  RunConfig flat = cfg;
  flat.preset = "flat";
  return *user_chart(flat);
}

/// Parses a test function, or draws a random degree <= 3 polynomial when the text is empty.
Expr test_function(const std::string& text, int n, std::mt19937_64& rng, std::string& shown) {
  if (!text.empty()) {
    shown = text;
    return kstar::parse(text, n);
  }
  Expr e = kstar::random_polynomial(n, 0, 3, kstar::Variables::all, rng);
  shown = kstar::to_string(e);
  return e;
}

std::string context_of(const Chart& chart, int order) {
  return chart.label + " point " + kstar::describe(chart.point) + " J=" + std::to_string(order);
}

int cmd_eval(RunConfig& cfg) {
  const auto v = parse_variant(cfg.variant);
  const Chart chart = require_chart(cfg);
  const int n = chart.point.dimension();
  const auto ctx = kstar::build_chart(chart.phi, chart.point, cfg.jet_order);
  std::mt19937_64 rng(cfg.seed);
  std::string fs, gs, hs;
  const Expr f = test_function(cfg.f, n, rng, fs);
  const Expr g = test_function(cfg.g, n, rng, gs);
  cfg.f = fs;
  cfg.g = gs;

  const kstar::Jet fj = kstar::operand_jet(f, ctx), gj = kstar::operand_jet(g, ctx);
  const auto star = kstar::star_product(fj, gj, ctx, v);
  const auto aux = kstar::op_PQRS(fj, gj, ctx);
  const Complex c3 = kstar::c3(fj, gj, ctx);
  const Complex c3t = kstar::c3_tilde(fj, gj, ctx);

  kstar::Tolerances tol;
  if (cfg.tol) tol.override_all(*cfg.tol);
  const std::string context = context_of(chart, cfg.jet_order);
  std::vector<CheckResult> checks;
  checks.push_back(kstar::make_check("C2-expanded", std::abs(star[2] - kstar::c2_expanded(fj, gj, ctx).value()), tol.pointwise, context));
  checks.push_back(kstar::make_check("S=S~", std::abs(aux.S - aux.S_tilde), tol.pointwise, context));
  checks.push_back(kstar::make_check("C3=P/6-Q/4", std::abs(c3 - (aux.P / 6.0 - aux.Q / 4.0)), tol.decomposition, context));
  if (!cfg.h.empty()) {
    const Expr h = kstar::parse(cfg.h, n);
    for (auto& c : kstar::check_associativity(ctx, v, ctx.function_jet(f), ctx.function_jet(g), ctx.function_jet(h), tol.associativity, context))
      checks.push_back(std::move(c));
  }

  const std::pair<const char*, Complex> values[] = {{"C1", star[1]}, {"C2", star[2]}, {"C3", c3},     {"C3tilde", c3t},
                                                    {"P", aux.P},    {"Q", aux.Q},    {"R", aux.R},   {"S", aux.S},
                                                    {"S_tilde", aux.S_tilde}};
  if (cfg.json) {
    json out = {{"config", config_json(cfg)}, {"seed", cfg.seed}, {"jet_order", cfg.jet_order}};
    json vals = {{"star", json::array()}};
    for (std::size_t r = 0; r < kstar::NuPolynomial::kTerms; ++r) vals["star"].push_back(complex_json(star[r]));
    for (const auto& [name, value] : values) vals[name] = complex_json(value);
    out["values"] = vals;
    out["checks"] = json::array();
    for (const auto& c : checks) out["checks"].push_back(check_json(c));
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "chart    " << context << "\n"
              << "f        " << fs << "\n"
              << "g        " << gs << "\n"
              << "variant  " << cfg.variant << "\n"
              << "star     [";
    for (std::size_t r = 0; r < kstar::NuPolynomial::kTerms; ++r) std::cout << (r ? ", " : "") << kstar::format_complex(star[r]);
    std::cout << "]\n";
    for (const auto& [name, value] : values) std::printf("%-8s %s\n", name, kstar::format_complex(value).c_str());
    for (const auto& c : checks) print_check(c);
  }
  return all_pass(checks) ? kOk : kCheckFailed;
}

int cmd_compare(RunConfig& cfg) {
  const Chart chart = require_chart(cfg);
  const int n = chart.point.dimension();
  const auto ctx = kstar::build_chart(chart.phi, chart.point, cfg.jet_order);
  std::mt19937_64 rng(cfg.seed);
  std::string fs, gs;
  const Expr f = test_function(cfg.f, n, rng, fs);
  const Expr g = test_function(cfg.g, n, rng, gs);
  cfg.f = fs;
  cfg.g = gs;

  const kstar::Jet fj = kstar::operand_jet(f, ctx), gj = kstar::operand_jet(g, ctx);
  const auto ops = kstar::build_left_mult(fj, ctx, 3);
  const Complex covariant[3] = {kstar::c1(fj, gj, ctx).value(), kstar::c2(fj, gj, ctx).value(), kstar::c3(fj, gj, ctx)};
  Complex oracle[3];
  for (int r = 1; r <= 3; ++r) oracle[r - 1] = ops[static_cast<std::size_t>(r)].apply(gj);

  const double tol = cfg.tol.value_or(kstar::Tolerances{}.oracle);
  const std::string context = context_of(chart, cfg.jet_order);
  std::vector<CheckResult> checks;
  for (int r = 0; r < 3; ++r)
    checks.push_back(kstar::make_check("oracle.C" + std::to_string(r + 1),
                                       std::abs(covariant[r] - oracle[r]) / (1.0 + std::abs(oracle[r])), tol, context));

  if (cfg.json) {
    json out = {{"config", config_json(cfg)}, {"seed", cfg.seed}, {"jet_order", cfg.jet_order}};
    json vals = json::object();
    for (int r = 0; r < 3; ++r) {
      const std::string key = "C" + std::to_string(r + 1);
      vals[key] = complex_json(covariant[r]);
      vals[key + "_oracle"] = complex_json(oracle[r]);
    }
    out["values"] = vals;
    out["checks"] = json::array();
    for (const auto& c : checks) out["checks"].push_back(check_json(c));
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "chart  " << context << "\nf      " << fs << "\ng      " << gs << "\n\n";
    std::printf("%-3s %-32s %-32s %s\n", "r", "covariant", "oracle", "residual");
    for (int r = 0; r < 3; ++r)
      std::printf("%-3d %-32s %-32s %s\n", r + 1, kstar::format_complex(covariant[r]).c_str(), kstar::format_complex(oracle[r]).c_str(),
                  fmt(checks[static_cast<std::size_t>(r)].residual).c_str());
    std::cout << "\n";
    for (const auto& c : checks) print_check(c);
  }
  return all_pass(checks) ? kOk : kCheckFailed;
}

int cmd_verify(RunConfig& cfg) {
  if (cfg.trials < 0) throw kstar::UsageError("--trials must be non-negative");
  kstar::SuiteConfig suite;
  suite.trials = cfg.trials;
  suite.seed = cfg.seed;
  suite.order = cfg.jet_order;
  suite.tolerance = cfg.tol;
  if (auto chart = user_chart(cfg)) suite.extra.push_back({"user", chart->phi, chart->point, chart->flat, cfg.seed});
  const auto report = kstar::run_suite(suite);

  if (cfg.json) {
    json out = {{"config", config_json(cfg)}, {"seed", cfg.seed}, {"jet_order", cfg.jet_order}, {"values", json::object()}};
    out["checks"] = json::array();
    for (const auto& c : report.checks) out["checks"].push_back(check_json(c));
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& c : report.checks) print_check(c);
    std::cout << "\n" << report.checks.size() - report.failures() << "/" << report.checks.size() << " checks passed\n";
    if (!report.all_pass()) {
      std::cout << "failing checks:\n";
      for (const auto& c : report.checks)
        if (!c.pass) std::cout << "  " << c.name << "  residual=" << fmt(c.residual) << "  tol=" << fmt(c.tolerance) << "\n";
    }
  }
  return report.all_pass() ? kOk : kCheckFailed;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--preset", cfg.preset, "Built-in potential: flat, fubini-study, poincare-disk");
  sub->add_option("--potential", cfg.potential, "Kaehler potential over z1..zn, zb1..zbn");
  sub->add_option("--n", cfg.n, "Chart dimension (defaults to the number of point components)");
  sub->add_option("--point", cfg.point, "Base point components, e.g. 0.3+0.1i (comma separated or repeated)")->delimiter(',');
  sub->add_option("--f", cfg.f, "First argument (random cubic from --seed if omitted)");
  sub->add_option("--g", cfg.g, "Second argument (random cubic from --seed if omitted)");
  sub->add_option("--h", cfg.h, "Third argument for an associativity check");
  sub->add_option("--variant", cfg.variant, "standard or modified")->capture_default_str();
  sub->add_option("--jet-order", cfg.jet_order, "Jet truncation order J")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  sub->add_option("--trials", cfg.trials, "Random charts in the verification suite")->capture_default_str();
  sub->add_option("--tol", cfg.tol, "Override every tolerance");
  sub->add_flag("--json", cfg.json, "Emit a JSON report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Star products with separation of variables on a Kaehler chart"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  RunConfig cfg;
  auto* eval = app.add_subcommand("eval", "Evaluate f * g and the operators C1..C3, P, Q, R, S at a point");
  auto* verify = app.add_subcommand("verify", "Run the verification suite on presets and random charts");
  auto* compare = app.add_subcommand("compare", "Covariant formulas against the recursion oracle");
  for (auto* sub : {eval, verify, compare}) add_common(sub, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (eval->parsed()) {
      cfg.command = "eval";
      return cmd_eval(cfg);
    }
    if (compare->parsed()) {
      cfg.command = "compare";
      return cmd_compare(cfg);
    }
    cfg.command = "verify";
    return cmd_verify(cfg);
  } catch (const kstar::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const kstar::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const kstar::OracleInconsistencyError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const kstar::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}

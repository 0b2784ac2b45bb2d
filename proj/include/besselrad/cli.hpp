#pragma once
// `besselrad` command line: eval, table, wigner3j, wigner6j, check.
//
// Exit codes: 0 success, 1 check failure, 2 invalid or missing flags,
// 3 no closed form (FormulaInapplicable), 4 oracle NonConvergence,
// 5 unwritable output path.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "besselrad/checks.hpp"
#include "besselrad/closedform.hpp"
#include "besselrad/oracle.hpp"
#include "besselrad/sweep.hpp"
#include "besselrad/wigner.hpp"

namespace besselrad::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kInapplicable = 3,
  kNonConvergence = 4,
  kUnwritable = 5,
};

namespace detail {

using sweep::format_real;
using Json = nlohmann::ordered_json;

struct Globals {
  bool json = false;
  bool quiet = false;
  double rel_tol = 1e-8;
};

struct EvalArgs {
  std::optional<int> lambda1, lambda2, power;
  std::optional<double> k1, k2, alpha;
  bool oracle = false;
  bool product = false;
  bool fallback_oracle = false;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void add_point_flags(CLI::App* cmd, EvalArgs& a) {
  cmd->add_option("--lambda1", a.lambda1, "order of the first Bessel function");
  cmd->add_option("--lambda2", a.lambda2, "order of the second Bessel function");
  cmd->add_option("--power", a.power, "radial power n");
  cmd->add_option("--k1", a.k1, "first wavenumber");
  cmd->add_option("--k2", a.k2, "second wavenumber");
  cmd->add_option("--alpha", a.alpha, "exponential damping");
  cmd->add_flag("--fallback-oracle", a.fallback_oracle, "use quadrature where no closed form exists");
  cmd->add_flag("--oracle", a.oracle, "also evaluate by quadrature and report the discrepancy");
}

inline std::vector<int> parse_ints(const std::string& text, std::size_t count) {
  std::vector<int> v;
  std::string_view rest = text;
  while (true) {
    const auto c = rest.find(',');
    try {
      v.push_back(sweep::parse_int(rest.substr(0, c)));
    } catch (const sweep::SweepError&) {
      throw UsageError("expected " + std::to_string(count) + " comma-separated integers, got '" + text + "'");
    }
    if (c == std::string_view::npos) break;
    rest.remove_prefix(c + 1);
  }
  if (v.size() != count)
    throw UsageError("expected " + std::to_string(count) + " comma-separated integers, got '" + text + "'");
  return v;
}

inline void check_rel_tol(double t) {
  if (!(t >= 1e-12) || !(t < 1)) throw UsageError("--rel-tol must lie in [1e-12, 1)");
}

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(); }

inline int cmd_eval(const Globals& g, const EvalArgs& a, std::ostream& out) {
  if (!a.lambda1 || !a.lambda2 || !a.power || !a.k1 || !a.k2 || !a.alpha)
    throw UsageError("eval needs --lambda1 --lambda2 --power --k1 --k2 --alpha");
  check_rel_tol(g.rel_tol);
  const closedform::IntegralSpec spec{*a.lambda1, *a.lambda2, *a.k1, *a.k2, *a.alpha, *a.power};
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (spec.n < 1) throw UsageError("--power must be at least 1");

  double value = 0;
  std::string method;
  std::optional<double> product;
  std::optional<int> lambda3;
  const double condition = closedform::condition_number(spec.k1, spec.k2, spec.alpha);
  std::optional<oracle::QuadratureResult> quad;
  auto run_oracle = [&] {
    if (!quad)
      quad = oracle::integrate_two_bessel(spec.n, spec.lambda1, spec.lambda2, spec.k1, spec.k2, spec.alpha, g.rel_tol);
    return *quad;
  };
  try {
    const auto r = closedform::bare_integral(spec);
    value = r.value;
    method = closedform::method_name(r.method);
    const auto [l3, offset] = closedform::select_route(spec.n, spec.lambda1, spec.lambda2);
    lambda3 = l3;
    if (a.product)
      product = closedform::two_bessel_product(spec.lambda1, spec.lambda2, l3, spec.k1, spec.k2, spec.alpha, offset).value;
  } catch (const closedform::FormulaInapplicable&) {
    if (!a.fallback_oracle) throw;
    value = run_oracle().value;
    method = closedform::method_name(closedform::Method::kNone);
  }
  std::optional<double> oracle_value, oracle_error, discrepancy;
  if (a.oracle) {
    const auto o = run_oracle();
    oracle_value = o.value;
    oracle_error = o.abs_error_estimate;
    discrepancy = std::abs(value - o.value) / std::abs(o.value);
  }

  if (g.json) {
    Json j;
    j["value"] = value;
    j["method"] = method;
    j["condition"] = condition;
    j["oracle_value"] = optional_json(oracle_value);
    j["oracle_abs_error"] = optional_json(oracle_error);
    j["rel_discrepancy"] = optional_json(discrepancy);
    if (a.product) {
      j["lambda3"] = lambda3 ? Json(*lambda3) : Json();
      j["product"] = optional_json(product);
    }
    out << j.dump() << '\n';
    return kOk;
  }
  out << "value: " << format_real(value) << '\n';
  out << "method: " << method << '\n';
  out << "condition: " << format_real(condition) << '\n';
  if (a.product && product) {
    out << "lambda3: " << *lambda3 << '\n';
    out << "product: " << format_real(*product) << '\n';
  }
  if (a.oracle) {
    out << "oracle_value: " << format_real(*oracle_value) << '\n';
    out << "oracle_abs_error: " << format_real(*oracle_error) << '\n';
    out << "rel_discrepancy: " << format_real(*discrepancy) << '\n';
  }
  return kOk;
}

struct TableArgs {
  EvalArgs point;
  std::vector<std::string> sweeps;
  std::string out_path;
  std::string format = "csv";
};

inline int cmd_table(const Globals& g, const TableArgs& a, std::ostream& out) {
  check_rel_tol(g.rel_tol);
  std::vector<sweep::Axis> axes;
  for (const auto& s : a.sweeps) axes.push_back(sweep::parse_axis(s));
  auto swept = [&](const char* name) {
    for (const auto& ax : axes)
      if (ax.parameter == name) return true;
    return false;
  };
  const auto& p = a.point;
  sweep::Point base;
  auto need = [&](const char* name, const auto& opt, auto& field) {
    if (opt) field = *opt;
    else if (!swept(name)) throw UsageError(std::string("table needs --") + name + " or a sweep over it");
  };
  need("lambda1", p.lambda1, base.lambda1);
  need("lambda2", p.lambda2, base.lambda2);
  need("power", p.power, base.power);
  need("k1", p.k1, base.k1);
  need("k2", p.k2, base.k2);
  need("alpha", p.alpha, base.alpha);
  const auto points = sweep::expand(base, axes);
  for (const auto& pt : points) {
    try {
      closedform::IntegralSpec{pt.lambda1, pt.lambda2, pt.k1, pt.k2, pt.alpha, pt.power}.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (pt.power < 1) throw UsageError("power must be at least 1");
  }
  sweep::Options opt;
  opt.with_oracle = p.oracle;
  opt.fallback_oracle = p.fallback_oracle;
  opt.rel_tol = g.rel_tol;
  const auto table = sweep::run(points, opt);
  const std::string text = a.format == "json" ? table.to_json() : table.to_csv();

  if (a.out_path.empty()) {
    out << text;
    return kOk;
  }
  std::ofstream file(a.out_path, std::ios::binary | std::ios::trunc);
  if (!file) return kUnwritable;
  file << text;
  file.flush();
  if (!file) return kUnwritable;
  if (!g.quiet) out << "wrote " << table.rows().size() << " rows to " << a.out_path << '\n';
  return kOk;
}

inline int print_symbol(const Globals& g, const wigner::WignerValue& v, std::ostream& out) {
  if (g.json) {
    Json j;
    j["exact"] = v.exact_string();
    j["value"] = v.to_double();
    out << j.dump() << '\n';
  } else {
    out << v.exact_string() << '\n' << format_real(v.to_double()) << '\n';
  }
  return kOk;
}

inline int cmd_wigner3j(const Globals& g, const std::string& js, const std::string& ms, std::ostream& out) {
  const auto j = parse_ints(js, 3);
  const auto m = parse_ints(ms, 3);
  for (int x : j)
    if (x < 0 || x > wigner::kMaxMomentum) throw UsageError("angular momenta must lie in [0, 60]");
  return print_symbol(g, wigner::wigner_3j(j[0], j[1], j[2], m[0], m[1], m[2]), out);
}

inline int cmd_wigner6j(const Globals& g, const std::string& js, std::ostream& out) {
  const auto j = parse_ints(js, 6);
  for (int x : j)
    if (x < 0 || x > wigner::kMaxMomentum) throw UsageError("angular momenta must lie in [0, 60]");
  return print_symbol(g, wigner::wigner_6j(j[0], j[1], j[2], j[3], j[4], j[5]), out);
}

inline int cmd_check(const Globals& g, const std::string& suite, int max_l, bool tolerance_given,
                     std::ostream& out) {
  checks::Settings s;
  s.max_l = max_l;
  if (max_l < 0 || max_l > checks::kMaxL) throw UsageError("--max-l must lie in [0, 10]");
  if (tolerance_given) {
    check_rel_tol(g.rel_tol);
    s.tolerance = g.rel_tol;
  }
  const auto cases = checks::run_suite(suite, s);
  std::size_t passed = 0;
  for (const auto& c : cases) passed += c.passed;
  if (g.json) {
    Json list = Json::array();
    for (const auto& c : cases) {
      Json o;
      o["suite"] = c.suite;
      o["case"] = c.label;
      o["discrepancy"] = c.discrepancy;
      o["tolerance"] = c.tolerance;
      o["pass"] = c.passed;
      list.push_back(std::move(o));
    }
    Json j;
    j["suite"] = suite;
    j["passed"] = passed;
    j["total"] = cases.size();
    j["cases"] = std::move(list);
    out << j.dump(2) << '\n';
  } else {
    for (const auto& c : cases) {
      if (g.quiet && c.passed) continue;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3g (tol %.0e)", c.discrepancy, c.tolerance);
      out << (c.passed ? "pass " : "FAIL ") << c.suite << ' ' << c.label << ": " << buf << '\n';
    }
    out << "PASS " << passed << '/' << cases.size() << '\n';
  }
  return passed == cases.size() ? kOk : kCheckFailed;
}

}  // namespace detail

/// Entry point; never throws. Output goes to `out`, diagnostics to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Closed-form radial integrals of spherical Bessel functions", "besselrad"};
  app.require_subcommand(1);
  Globals g;
  auto add_globals = [&](CLI::App* cmd) {
    cmd->add_flag("--json", g.json, "machine-readable output");
    cmd->add_flag("--quiet", g.quiet, "suppress informational lines");
    cmd->add_option("--rel-tol", g.rel_tol, "oracle relative tolerance (check: pass threshold)");
  };
  add_globals(&app);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "evaluate one bare integral");
  add_point_flags(eval, eval_args);
  eval->add_flag("--product", eval_args.product, "also print the 3j-weighted product");

  TableArgs table_args;
  auto* table = app.add_subcommand("table", "sweep a parameter grid to CSV or JSON");
  add_point_flags(table, table_args.point);
  table->add_option("--sweep", table_args.sweeps, "param=start:stop:count (repeatable, cartesian)");
  table->add_option("--out", table_args.out_path, "output file (default stdout)");
  table->add_option("--format", table_args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string j3, m3;
  auto* w3 = app.add_subcommand("wigner3j", "exact Wigner 3j symbol");
  w3->add_option("--j", j3, "a,b,c")->required();
  w3->add_option("--m", m3, "x,y,z")->required();

  std::string j6;
  auto* w6 = app.add_subcommand("wigner6j", "exact Wigner 6j symbol");
  w6->add_option("--j", j6, "a,b,c,d,e,f")->required();

  std::string suite;
  int max_l = 4;
  auto* check = app.add_subcommand("check", "run an identity-check suite");
  std::vector<std::string> names(std::begin(checks::kSuites), std::end(checks::kSuites));
  names.push_back("all");
  check->add_option("--suite", suite, "eq28|eq211|eq29|eq26|eq212|eq21|wigner|qfunc|all")
      ->required()
      ->check(CLI::IsMember(names));
  check->add_option("--max-l", max_l, "largest order in the grids (default 4)");

  CLI::Option* rel_tol_opts[5];
  {
    int i = 0;
    for (auto* cmd : {eval, table, w3, w6, check}) {
      add_globals(cmd);
      rel_tol_opts[i++] = cmd->get_option("--rel-tol");
    }
  }

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*eval) return cmd_eval(g, eval_args, out);
    if (*table) return cmd_table(g, table_args, out);
    if (*w3) return cmd_wigner3j(g, j3, m3, out);
    if (*w6) return cmd_wigner6j(g, j6, out);
    bool tolerance_given = app.get_option("--rel-tol")->count() > 0;
    for (auto* o : rel_tol_opts) tolerance_given = tolerance_given || o->count() > 0;
    return cmd_check(g, suite, max_l, tolerance_given, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const sweep::SweepError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const closedform::FormulaInapplicable& e) {
    err << "error: " << e.what() << '\n';
    return kInapplicable;
  } catch (const oracle::NonConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  }
}

}  // namespace besselrad::cli

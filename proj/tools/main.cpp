// Command-line front end: order-condition reports, convergence studies and
// stability scans, with CSV output for external plotting.
//
// Exit codes: 0 success / criteria met, 1 criteria unmet, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrgark/conditions.hpp"
#include "mrgark/methods.hpp"
#include "mrgark/mri.hpp"
#include "mrgark/stability.hpp"
#include "mrgark/stepping.hpp"
#include "mrgark/tableau_io.hpp"

using namespace mrgark;

namespace {

struct CommonOpts {
  std::string method = "imim23";
  MethodParams params;
  std::string config_path;
};

void add_method_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("method", o.method, "registered method name")->required();
  cmd->add_option("--gamma", o.params.gamma, "stage diagonal parameter");
  cmd->add_option("--beta21", o.params.beta21, "free subdiagonal parameter");
  cmd->add_option("--M", o.params.M, "micro-step count");
  cmd->add_option("--base", o.params.base, "base method for generic recipes");
  cmd->add_option("--base-file", o.params.base_file,
                  "tableau file for file-loaded bases");
  cmd->add_option("--theta", o.params.theta, "free coupling parameter");
  cmd->add_option("--mu", o.params.mu, "base diagonal for derived couplings");
  cmd->add_option("--config", o.config_path,
                  "JSON file with defaults; flags take precedence");
}

// config file values fill anything the command line left at its default
void merge_config(const CLI::App& cmd, CommonOpts& o,
                  std::map<std::string, double>* problem_params = nullptr) {
  if (o.config_path.empty()) return;
  std::ifstream is(o.config_path);
  if (!is) throw Error("cannot open config file '" + o.config_path + "'");
  nlohmann::json j;
  is >> j;
  auto maybe = [&](const char* flag, const char* key, auto& slot) {
    if (j.contains(key) && cmd.count(flag) == 0)
      slot = j[key].get<std::decay_t<decltype(slot)>>();
  };
  maybe("--gamma", "gamma", o.params.gamma);
  maybe("--beta21", "beta21", o.params.beta21);
  maybe("--M", "M", o.params.M);
  maybe("--base", "base", o.params.base);
  maybe("--base-file", "base_file", o.params.base_file);
  maybe("--theta", "theta", o.params.theta);
  maybe("--mu", "mu", o.params.mu);
  if (problem_params && j.contains("problem_params"))
    for (auto& [k, v] : j["problem_params"].items())
      if (!problem_params->count(k)) (*problem_params)[k] = v.get<double>();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  os << text;
}

int run_check(const CommonOpts& o, int order, const std::string& mode_str,
              const std::string& format, double tol) {
  const ConditionMode mode = condition_mode_from_string(mode_str);
  const MultirateMethod mrm = make_method(o.method, o.params);
  const ConditionReport rep =
      mrm.flavor == Flavor::Spc ? check_spc(mrm, order, mode, tol)
                                : check_mr_order(mrm, order, mode, tol);
  std::fputs((format == "csv" ? rep.render_csv() : rep.render_text()).c_str(),
             stdout);
  const auto sa = check_stiff_accuracy(mrm);
  std::printf("stiffly accurate: %s\n", sa.stiffly_accurate ? "yes" : "no");
  return rep.achieved_order >= order ? 0 : 1;
}

int run_converge(const CommonOpts& o, const std::string& problem,
                 std::map<std::string, double> pparams, double h0,
                 std::size_t halvings, const std::string& jac, bool embedded,
                 const std::string& out) {
  if (halvings < 3) throw CLI::ValidationError("need at least 3 halvings");
  const MultirateMethod mrm = make_method(o.method, o.params);
  const ProblemSpec prob = make_problem(problem, pparams);
  ConvergenceOptions copt;
  copt.embedded_weights = embedded;
  if (jac == "exact")
    copt.jacobian = JacobianMode::Exact;
  else if (jac == "lagged")
    copt.jacobian = JacobianMode::TimeLagged;
  else if (jac == "fd")
    copt.jacobian = JacobianMode::FiniteDifference;
  else
    throw CLI::ValidationError("unknown jacobian mode '" + jac + "'");

  const auto rows = convergence_study(mrm, prob, h0, halvings, copt);
  std::string csv = "H,err_slow,err_fast,order_slow,order_fast\n";
  bool any_ok = false;
  for (const auto& r : rows) {
    csv += fmt17(r.H) + "," + fmt17(r.err_slow) + "," + fmt17(r.err_fast) +
           "," + fmt17(r.order_slow) + "," + fmt17(r.order_fast) + "\n";
    if (std::isfinite(r.err_slow)) any_ok = true;
  }
  write_output(out, csv);
  return any_ok ? 0 : 1;
}

int run_stability(const CommonOpts& o, const ScanSpec& spec,
                  const std::string& out) {
  const MultirateMethod mrm = make_method(o.method, o.params);
  write_output(out, scan_csv(stability_scan(mrm, spec)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multirate linearly implicit integrators: order-condition "
               "reports, convergence studies, stability scans"};
  app.require_subcommand(1);

  CommonOpts check_o, conv_o, stab_o;
  int order = 3;
  std::string mode = "ros", format = "text";
  double tol = kConditionTolerance;
  CLI::App* check = app.add_subcommand("check", "evaluate order conditions");
  add_method_options(check, check_o);
  check->add_option("--order", order, "requested order (1..4)");
  check->add_option("--mode", mode, "ros | row | time_lagged");
  check->add_option("--format", format, "text | csv");
  check->add_option("--tol", tol, "pass/fail tolerance");

  std::string problem = "pr", jac = "exact", out;
  std::map<std::string, double> pparams;
  double h0 = 1.0 / 512.0;
  std::size_t halvings = 5;
  bool embedded = false;
  CLI::App* conv = app.add_subcommand("converge", "final-time error study");
  add_method_options(conv, conv_o);
  conv->add_option("--problem", problem, "registered problem name");
  conv->add_option("--pp", pparams, "problem parameter (name value)");
  conv->add_option("--h0", h0, "coarsest macro step");
  conv->add_option("--halvings", halvings, "number of halvings (>= 3)");
  conv->add_option("--jacobian", jac, "exact | lagged | fd");
  conv->add_flag("--embedded", embedded, "propagate the embedded weights");
  conv->add_option("--out", out, "output CSV path (default stdout)");

  ScanSpec spec;
  std::string vary = "both", stab_out;
  double fixed_re = 0.0, fixed_im = 0.0;
  CLI::App* stab = app.add_subcommand("stability", "|R| scan over a grid");
  add_method_options(stab, stab_o);
  stab->add_option("--re0", spec.re0, "left real bound");
  stab->add_option("--re1", spec.re1, "right real bound");
  stab->add_option("--im0", spec.im0, "lower imaginary bound");
  stab->add_option("--im1", spec.im1, "upper imaginary bound");
  stab->add_option("--nre", spec.n_re, "points along the real axis");
  stab->add_option("--nim", spec.n_im, "points along the imaginary axis");
  stab->add_option("--vary", vary, "both | fast | slow");
  stab->add_option("--fixed-re", fixed_re, "fixed argument, real part");
  stab->add_option("--fixed-im", fixed_im, "fixed argument, imaginary part");
  stab->add_option("--out", stab_out, "output CSV path (default stdout)");

  CLI::App* methods = app.add_subcommand("methods", "method registry");
  methods->add_subcommand("list", "list registered methods");
  CLI::App* problems = app.add_subcommand("problems", "problem registry");
  problems->add_subcommand("list", "list registered problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) {
      merge_config(*check, check_o);
      return run_check(check_o, order, mode, format, tol);
    }
    if (conv->parsed()) {
      merge_config(*conv, conv_o, &pparams);
      return run_converge(conv_o, problem, pparams, h0, halvings, jac,
                          embedded, out);
    }
    if (stab->parsed()) {
      merge_config(*stab, stab_o);
      if (vary == "fast")
        spec.vary = ScanVariable::FastOnly;
      else if (vary == "slow")
        spec.vary = ScanVariable::SlowOnly;
      else if (vary != "both")
        throw CLI::ValidationError("unknown vary mode '" + vary + "'");
      spec.fixed = Cplx{fixed_re, fixed_im};
      return run_stability(stab_o, spec, stab_out);
    }
    if (methods->parsed()) {
      for (const auto& info : method_registry())
        std::printf("%-10s %s\n", info.name.c_str(), info.summary.c_str());
      return 0;
    }
    if (problems->parsed()) {
      for (const auto& info : problem_registry())
        std::printf("%-10s %s\n", info.name.c_str(), info.summary.c_str());
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    const std::string what = e.what();
    return what.find("unknown method") != std::string::npos ||
                   what.find("unknown problem") != std::string::npos
               ? 2
               : 1;
  }
  return 2;
}

// Acceptance suite: runs every gate criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion (with per-part detail where a
// criterion bundles several measurements). Exits nonzero when any criterion
// fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "mrgark/conditions.hpp"
#include "mrgark/methods.hpp"
#include "mrgark/mri.hpp"
#include "mrgark/stability.hpp"
#include "mrgark/stepping.hpp"
#include "mrgark/tableau_io.hpp"
#include "oracles.hpp"

using namespace mrgark;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  if (!ok) ++failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// --- criterion 1: condition engine on the order-(2)3 families -------------

void criterion_1() {
  const double t0 = now_seconds();
  double worst = 0.0;
  for (std::size_t M : {2u, 4u, 10u}) {
    for (bool explicit_tail : {false, true}) {
      const MultirateMethod mrm = explicit_tail ? imex_order23(1.0, 0.5, M)
                                                : imim_order23(1.0, 0.5, M);
      worst = std::max(worst,
                       check_internal_consistency(mrm, 1e-12).max_residual(1));
      const ConditionReport ros =
          check_mr_order(mrm, 3, ConditionMode::Ros, 1e-12);
      const ConditionReport lag =
          check_mr_order(mrm, 3, ConditionMode::TimeLagged, 1e-12);
      worst = std::max({worst, ros.max_residual(3), lag.max_residual(3)});
      if (ros.achieved_order != 3 || lag.achieved_order != 3) worst = 1.0;
    }
  }
  const double dt = now_seconds() - t0;
  report("criterion-1 order-(2)3 condition checks", worst <= 1e-12 && dt < 1.0,
         "max residual " + fmt(worst) + ", " + fmt(dt) + " s");
}

// --- criterion 2: engine agreement on random coefficient sets -------------

void criterion_2() {
  const double t0 = now_seconds();
  std::mt19937 rng(424242);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const MultirateMethod mrm =
        oracles::random_multirate(rng, 3, 1 + trial % 3);
    const AssembledTableau tab = assemble_gark(mrm);
    for (auto mode : {ConditionMode::Ros, ConditionMode::Row}) {
      const ConditionReport spec = check_mr_order(mrm, 4, mode, 1e-12);
      const ConditionReport gen = check_generic_gark(tab, 4, mode, 1e-12);
      for (const auto& en : gen.entries) {
        const ConditionEntry* other = spec.find(en.id);
        if (!other) {
          worst = 1.0;
          continue;
        }
        worst = std::max(worst, std::abs(en.residual - other->residual));
      }
    }
  }
  const double dt = now_seconds() - t0;
  report("criterion-2 specialized vs generic engine",
         worst <= 1e-12 && dt < 5.0,
         "entrywise difference " + fmt(worst) + " over 20 random sets, " +
             fmt(dt) + " s");
}

// --- criterion 3: multirate step vs monolithic tableau solve --------------

void criterion_3() {
  const MultirateMethod mrm = imim_order23(1.0, 0.5, 4);
  const ProblemSpec prob = pendulum_oscillator();
  const auto& ode = std::get<AdditiveProblem>(prob.ode);
  AdditiveProblem with_jacobian = ode;
  {
    PendulumParams prm;
    prm.exact_jacobian = true;
    with_jacobian = std::get<AdditiveProblem>(pendulum_oscillator(prm).ode);
  }
  const Vec got = Stepper(mrm).step(prob, 0.0, prob.y0, 0.1).y;
  ProblemSpec probx = prob;
  probx.ode = with_jacobian;
  const Vec gotx = Stepper(mrm).step(probx, 0.0, prob.y0, 0.1).y;
  const Vec want = oracles::monolithic_gark_step(assemble_gark(mrm),
                                                 with_jacobian, 0.0, prob.y0,
                                                 0.1);
  const double rel = norm2(vsub(gotx, want)) / norm2(want);
  (void)got;
  report("criterion-3 monolithic tableau oracle", rel <= 1e-12,
         "relative difference " + fmt(rel) + " (pendulum, H=0.1, M=4)");
}

// --- criterion 4: stability consistency ------------------------------------

void criterion_4() {
  double worst = 0.0;
  SpcCoupling sc;
  sc.v1 = spc_rank_one_weights(ros34pw2());
  const MultirateMethod methods[] = {imim_order23(1.0, 0.5, 3),
                                     spc_telescopic(ros34pw2(), 3, sc)};
  for (const MultirateMethod& mrm : methods) {
    Stepper st(mrm);
    const AssembledTableau tab = assemble_gark(mrm);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) {
        const double zS = -10.0 + 10.0 * i / 6.0;
        const double zF = -10.0 + 10.0 * j / 6.0;
        const ProblemSpec prob = dahlquist(zS, zF);
        const double ratio = st.step(prob, 0.0, {1.0}, 1.0).y[0];
        const Cplx R = stability_function(tab, {zS, 0.0}, {zF, 0.0});
        worst = std::max(worst, std::abs(ratio - R.real()));
      }
  }
  // one-sided coupling: eigenvalues equal the base stability values
  double eig_worst = 0.0;
  {
    const AssembledTableau tab = assemble_gark(methods[0]);
    const Cplx zF{-7.0, 0.0}, zS{-2.0, 0.0};
    const CMat m = stability_matrix_2x2(tab, zF, zS, {0.9, 0.0}, 0.0);
    const Cplx tr = m(0, 0) + m(1, 1);
    const Cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const Cplx disc = std::sqrt(tr * tr - 4.0 * det);
    Cplx e1 = (tr + disc) / 2.0, e2 = (tr - disc) / 2.0;
    const Cplx RF = stability_function(tab, 0.0, zF);
    const Cplx RS = stability_function(tab, zS, 0.0);
    const double v1 =
        std::min(std::abs(e1 - RF), std::abs(e2 - RF));
    const double v2 =
        std::min(std::abs(e1 - RS), std::abs(e2 - RS));
    eig_worst = std::max(v1, v2);
  }
  report("criterion-4 stability consistency",
         worst <= 1e-13 && eig_worst <= 1e-12,
         "grid difference " + fmt(worst) + ", one-sided eigenvalue difference " +
             fmt(eig_worst));
}

// --- criterion 5: quasilinear benchmark convergence ------------------------

struct FitResult {
  double order_slow = 0.0, order_fast = 0.0;
  std::vector<double> ratio_slow;
};

FitResult run_pr(const MultirateMethod& mrm, const ProblemSpec& prob,
                 bool embedded) {
  ConvergenceOptions opt;
  opt.embedded_weights = embedded;
  // The anchored error tables live in the trajectory-wide norm: the quoted
  // slow-error constant matches the 20-pi-forcing quadrature defect, which
  // telescopes away in a pure final-time reading on the 20-period interval.
  opt.norm = ErrorNorm::TrajectoryMax;
  const auto rows = convergence_study(mrm, prob, 1.0 / 512.0, 4, opt);
  FitResult fr;
  std::vector<double> H, es, ef;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    H.push_back(rows[i].H);
    es.push_back(rows[i].err_slow);
    ef.push_back(rows[i].err_fast);
    if (i > 0) fr.ratio_slow.push_back(rows[i - 1].err_slow / rows[i].err_slow);
  }
  fr.order_slow = fitted_order(H, es);
  fr.order_fast = fitted_order(H, ef);
  return fr;
}

void criterion_5() {
  const double t0 = now_seconds();
  const ProblemSpec prob = prothero_robinson();  // lambda1 default, eps=5e-4
  // gamma = 1; the free subdiagonal is set to 1/2 - gamma, the unique value
  // with b_hat^T g = 0, which keeps the embedded companions of both families
  // uniformly second order (the anchored embedded tables show the exact 4x
  // ratios this produces).
  const MultirateMethod imim = imim_order23(1.0, -0.5, 10);
  const MultirateMethod imex = imex_order23(1.0, -0.5, 10);
  bool ok = true;
  std::string detail;
  auto window = [&](const char* tag, double value, double lo, double hi) {
    const bool good = value >= lo && value <= hi;
    std::printf("  %s criterion-5 %-28s %.3f (window [%.1f, %.1f])\n",
                good ? "pass" : "FAIL", tag, value, lo, hi);
    if (!good) ok = false;
  };
  const FitResult mi = run_pr(imim, prob, false);
  const FitResult mx = run_pr(imex, prob, false);
  const FitResult ei = run_pr(imim, prob, true);
  const FitResult ex = run_pr(imex, prob, true);
  window("imim main slow order", mi.order_slow, 2.7, 3.3);
  window("imim main fast order", mi.order_fast, 2.7, 3.3);
  window("imex main slow order", mx.order_slow, 2.7, 3.3);
  window("imex main fast order", mx.order_fast, 2.7, 3.3);
  window("imim embedded slow order", ei.order_slow, 1.7, 2.3);
  window("imim embedded fast order", ei.order_fast, 1.7, 2.3);
  window("imex embedded slow order", ex.order_slow, 1.7, 2.3);
  window("imex embedded fast order", ex.order_fast, 1.7, 2.3);
  // the halving-ratio pattern of the anchored table rows (slow component)
  for (const FitResult* fr : {&mi, &mx})
    for (double r : fr->ratio_slow)
      if (!(r >= 6.5 && r <= 9.5)) {
        std::printf("  FAIL criterion-5 slow ratio out of window: %.2f\n", r);
        ok = false;
      }
  const double dt = now_seconds() - t0;
  if (dt >= 30.0) ok = false;
  report("criterion-5 quasilinear convergence windows", ok,
         "slow ratios within [6.5,9.5]; see part lines above; " + fmt(dt) +
             " s");
}

// --- criterion 6: infinitesimal-step equivalence ---------------------------

void criterion_6() {
  std::mt19937 rng(99);
  const MriCoupling cpl = mri_ros3_coupling(0.5, 0.2);
  const BaseMethod inner = kutta3_erk();
  const MultirateMethod mrm = mri_as_imex(cpl, inner);
  const ProblemSpec prob = oracles::random_smooth_additive(rng, 3);
  InnerRk spec;
  spec.erk = inner;
  spec.substeps = 1;
  const Vec a = mri_step(cpl, prob, spec, 0.0, prob.y0, 0.25).y;
  const Vec b = Stepper(mrm).step(prob, 0.0, prob.y0, 0.25).y;
  const double rel = norm2(vsub(a, b)) / norm2(b);
  report("criterion-6 infinitesimal-step equivalence", rel <= 1e-12,
         "relative difference " + fmt(rel) + " on a dimension-3 problem");
}

// --- criterion 7: step-predictor-corrector coupling coefficients -----------

void criterion_7() {
  double worst = 0.0;
  for (double theta : {0.0, 1.0}) {
    const SpcMriCoupling cpl = ros34pw2_spc_mri(theta);
    double s = 0.0;
    for (double v : cpl.mu[1]) s += v;
    worst = std::max(worst, std::abs(s - 1.0));
    worst = std::max(worst, std::abs(dot(cpl.mu[1], cpl.slow.c) - 1.0 / 3.0));
    worst = std::max(worst, std::abs(dot(cpl.mu[1], cpl.slow.g)));
  }
  bool ok = worst <= 1e-9;
  std::string detail = "four-stage family residual " + fmt(worst);

  std::ifstream probe("data/rodas4.tableau");
  if (!probe.good()) {
    detail += "; six-stage check skipped (data/rodas4.tableau absent)";
  } else {
    const BaseMethod rodas = load_base_tableau_file("data/rodas4.tableau");
    double worst6 = 0.0;
    for (double t1 : {0.0, 1.0}) {
      const SpcMriCoupling cpl = rodas_spc_mri(t1, 0.5, 0.1, -0.2, rodas);
      const ConditionReport rep =
          check_spc_mri(cpl, 4, ConditionMode::Ros, 1e-9);
      worst6 = std::max(worst6, rep.max_residual(4));
      for (const auto& en : rep.entries)
        if (en.informational) worst6 = std::max(worst6, std::abs(en.residual));
    }
    ok = ok && worst6 <= 1e-9;
    detail += "; six-stage family residual " + fmt(worst6);
  }
  report("criterion-7 infinitesimal SPC coefficients", ok, detail);
}

// --- criterion 8: stiff accuracy and the stiff fast limit ------------------

void criterion_8() {
  MethodParams p;
  bool ok = true;
  double worst = 0.0;
  for (std::size_t M : {2u, 4u}) {
    p.M = M;
    const MultirateMethod sa = make_method("cfs-sa", p);
    if (!check_stiff_accuracy(sa).stiffly_accurate) ok = false;
    worst = std::max(worst, stiff_limit(sa, {-1.0, 0.0}, 1e8));
  }
  report("criterion-8 stiff fast limit", ok && worst <= 1e-6,
         "|R(-1, -1e8)| = " + fmt(worst) + " over stiffly accurate methods");
}

// --- criterion 9: degenerate reductions ------------------------------------

void criterion_9() {
  std::mt19937 rng(7);
  const BaseMethod base = kutta3_ros(1.0, 0.5);
  ProblemSpec prob = oracles::random_smooth_additive(rng, 3);
  auto& ode = std::get<AdditiveProblem>(prob.ode);

  // M = 1 with coupling = base equals the single-rate step on f_S + f_F
  const Vec got1 =
      Stepper(single_rate_compound(base)).step(prob, 0.0, prob.y0, 0.1).y;
  const Mat L = ode.jac_slow(0.0, prob.y0) + ode.jac_fast(0.0, prob.y0);
  const Vec want1 = oracles::single_rate_ros_step(
      base,
      [&](double t, const Vec& y) {
        return vadd(ode.f_slow(t, y), ode.f_fast(t, y));
      },
      L, Vec(3, 0.0), 0.0, prob.y0, 0.1);
  const double d1 = norm_inf(vsub(got1, want1));

  // vanishing fast part reduces the multirate method to the slow base step
  ode.f_fast = [](double, const Vec& y) { return Vec(y.size(), 0.0); };
  ode.jac_fast = [](double, const Vec&) { return Mat(3, 3); };
  const Vec got2 =
      Stepper(imim_order23(1.0, 0.5, 4)).step(prob, 0.0, prob.y0, 0.1).y;
  const Vec want2 = oracles::single_rate_ros_step(
      base, [&](double t, const Vec& y) { return ode.f_slow(t, y); },
      ode.jac_slow(0.0, prob.y0), Vec(3, 0.0), 0.0, prob.y0, 0.1);
  const double d2 = norm_inf(vsub(got2, want2));

  report("criterion-9 degenerate reductions", d1 <= 1e-14 && d2 <= 1e-14,
         "single-rate " + fmt(d1) + ", slow-only " + fmt(d2));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

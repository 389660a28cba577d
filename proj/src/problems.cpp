#include "mrgark/problems.hpp"

#include <cmath>
#include <map>

namespace mrgark {

ProblemSpec dahlquist(double lambdaS, double lambdaF, double y0) {
  AdditiveProblem ode;
  ode.dim = 1;
  ode.f_slow = [lambdaS](double, const Vec& y) { return Vec{lambdaS * y[0]}; };
  ode.f_fast = [lambdaF](double, const Vec& y) { return Vec{lambdaF * y[0]}; };
  ode.jac_slow = [lambdaS](double, const Vec&) {
    Mat j(1, 1);
    j(0, 0) = lambdaS;
    return j;
  };
  ode.jac_fast = [lambdaF](double, const Vec&) {
    Mat j(1, 1);
    j(0, 0) = lambdaF;
    return j;
  };

  ProblemSpec p;
  p.name = "dahlquist";
  p.summary = "scalar y' = (lambdaS + lambdaF) y";
  p.ode = std::move(ode);
  p.y0 = {y0};
  p.t0 = 0.0;
  p.t_end = 1.0;
  p.exact = [lambdaS, lambdaF, y0](double t) {
    return Vec{y0 * std::exp((lambdaS + lambdaF) * t)};
  };
  p.fast_indices = {0};
  p.slow_indices = {0};
  return p;
}

ProblemSpec coupled_linear_2x2(double lambdaF, double lambdaS, double etaS,
                               double etaF, Vec y0) {
  ComponentProblem ode;
  ode.dim_fast = 1;
  ode.dim_slow = 1;
  ode.f_fast = [lambdaF, etaS](double, const Vec& yF, const Vec& yS) {
    return Vec{lambdaF * yF[0] + etaS * yS[0]};
  };
  ode.f_slow = [lambdaS, etaF](double, const Vec& yF, const Vec& yS) {
    return Vec{etaF * yF[0] + lambdaS * yS[0]};
  };
  auto constmat = [](double v) {
    return [v](double, const Vec&, const Vec&) {
      Mat j(1, 1);
      j(0, 0) = v;
      return j;
    };
  };
  ode.jac_ff = constmat(lambdaF);
  ode.jac_fs = constmat(etaS);
  ode.jac_sf = constmat(etaF);
  ode.jac_ss = constmat(lambdaS);

  ProblemSpec p;
  p.name = "linear2x2";
  p.summary = "two-by-two linear component-partitioned test problem";
  p.ode = std::move(ode);
  p.y0 = std::move(y0);
  p.t0 = 0.0;
  p.t_end = 1.0;
  p.fast_indices = {0};
  p.slow_indices = {1};
  return p;
}

ProblemSpec pendulum_oscillator(const PendulumParams& prm, Vec y0, double t0,
                                double t_end) {
  if (prm.m_pend <= 0.0 || prm.m_osc <= 0.0 || prm.length <= 0.0 ||
      prm.k < 0.0 || prm.d < 0.0)
    throw Error("pendulum_oscillator: invalid parameters");

  const double mp = prm.m_pend, mo = prm.m_osc, l = prm.length;
  const double k = prm.k, d = prm.d, g = prm.g;

  // spring-damper force between the pendulum tip and the oscillator mass
  auto force = [=](const Vec& y) {
    const double stretch = y[1] - l * std::sin(y[0]);
    const double rate = y[3] - l * y[2] * std::cos(y[0]);
    return k * stretch * std::abs(stretch) + d * rate * std::abs(rate);
  };

  AdditiveProblem ode;
  ode.dim = 4;
  ode.f_fast = [g](double, const Vec& y) {
    return Vec{y[2], y[3], -g * std::sin(y[0]), 0.0};
  };
  ode.f_slow = [=](double, const Vec& y) {
    const double F = force(y);
    return Vec{0.0, 0.0, std::cos(y[0]) * F / (mp * l), -F / mo};
  };
  ode.jac_fast = [g](double, const Vec& y) {
    Mat j(4, 4);
    j(0, 2) = 1.0;
    j(1, 3) = 1.0;
    j(2, 0) = -g * std::cos(y[0]);
    return j;
  };
  if (prm.exact_jacobian) {
    ode.jac_slow = [=](double, const Vec& y) {
      const double stretch = y[1] - l * std::sin(y[0]);
      const double rate = y[3] - l * y[2] * std::cos(y[0]);
      const double F = force(y);
      // dF/dz with d(v|v|)/dv = 2|v|
      Vec dF(4, 0.0);
      dF[0] = 2.0 * k * std::abs(stretch) * (-l * std::cos(y[0])) +
              2.0 * d * std::abs(rate) * (l * y[2] * std::sin(y[0]));
      dF[1] = 2.0 * k * std::abs(stretch);
      dF[2] = 2.0 * d * std::abs(rate) * (-l * std::cos(y[0]));
      dF[3] = 2.0 * d * std::abs(rate);
      Mat j(4, 4);
      for (std::size_t z = 0; z < 4; ++z) {
        j(2, z) = std::cos(y[0]) * dF[z] / (mp * l);
        j(3, z) = -dF[z] / mo;
      }
      j(2, 0) += -std::sin(y[0]) * F / (mp * l);
      return j;
    };
  }

  ProblemSpec p;
  p.name = "pendulum";
  p.summary = "pendulum coupled to a damped oscillator (4d first-order form)";
  p.ode = std::move(ode);
  p.y0 = std::move(y0);
  p.t0 = t0;
  p.t_end = t_end;
  p.fast_indices = {0, 2};
  p.slow_indices = {1, 3};
  return p;
}

ProblemSpec prothero_robinson(double lambda1, double lambda2, double eps) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  auto f1 = [](double t) { return std::sin(two_pi * t) + 2.0; };
  auto f2 = [](double t) { return std::sin(10.0 * two_pi * t) + 2.0; };
  auto df1 = [](double t) { return two_pi * std::cos(two_pi * t); };
  auto df2 = [](double t) { return 10.0 * two_pi * std::cos(10.0 * two_pi * t); };
  auto ddf1 = [](double t) { return -two_pi * two_pi * std::sin(two_pi * t); };
  auto ddf2 = [](double t) {
    return -100.0 * two_pi * two_pi * std::sin(10.0 * two_pi * t);
  };

  ComponentProblem ode;
  ode.dim_fast = 1;
  ode.dim_slow = 1;
  ode.autonomous = false;
  ode.f_fast = [=](double t, const Vec& yF, const Vec& yS) {
    return Vec{eps * (yS[0] - f1(t)) + lambda2 * yF[0] * (yF[0] - f2(t)) +
               df2(t)};
  };
  ode.f_slow = [=](double t, const Vec& yF, const Vec& yS) {
    return Vec{lambda1 * yS[0] * (yS[0] - f1(t)) + eps * (yF[0] - f2(t)) +
               df1(t)};
  };
  auto mat1 = [](double v) {
    Mat j(1, 1);
    j(0, 0) = v;
    return j;
  };
  ode.jac_ff = [=](double t, const Vec& yF, const Vec&) {
    return mat1(lambda2 * (2.0 * yF[0] - f2(t)));
  };
  ode.jac_fs = [=](double, const Vec&, const Vec&) { return mat1(eps); };
  ode.jac_sf = [=](double, const Vec&, const Vec&) { return mat1(eps); };
  ode.jac_ss = [=](double t, const Vec&, const Vec& yS) {
    return mat1(lambda1 * (2.0 * yS[0] - f1(t)));
  };
  ode.dfdt_fast = [=](double t, const Vec& yF, const Vec&) {
    return Vec{-eps * df1(t) - lambda2 * yF[0] * df2(t) + ddf2(t)};
  };
  ode.dfdt_slow = [=](double t, const Vec&, const Vec& yS) {
    return Vec{-lambda1 * yS[0] * df1(t) - eps * df2(t) + ddf1(t)};
  };

  ProblemSpec p;
  p.name = "pr";
  p.summary = "quasilinear two-component problem whose exact solution is the "
              "forcing itself";
  p.ode = std::move(ode);
  p.y0 = {2.0, 2.0};
  p.t0 = 0.0;
  p.t_end = 2.0;
  p.exact = [=](double t) { return Vec{f2(t), f1(t)}; };
  p.fast_indices = {0};
  p.slow_indices = {1};
  return p;
}

namespace {

double param_or(const std::map<std::string, double>& m, const std::string& k,
                double fallback) {
  auto it = m.find(k);
  return it == m.end() ? fallback : it->second;
}

}  // namespace

const std::vector<ProblemInfo>& problem_registry() {
  static const std::vector<ProblemInfo> registry = {
      {"dahlquist", "scalar linear additive split (lambdaS, lambdaF)",
       [](const std::map<std::string, double>& m) {
         return dahlquist(param_or(m, "lambdaS", -1.0),
                          param_or(m, "lambdaF", -10.0));
       }},
      {"linear2x2",
       "linear component split (lambdaF, lambdaS, etaS, etaF)",
       [](const std::map<std::string, double>& m) {
         return coupled_linear_2x2(
             param_or(m, "lambdaF", -10.0), param_or(m, "lambdaS", -1.0),
             param_or(m, "etaS", 1.0), param_or(m, "etaF", 0.5));
       }},
      {"pendulum",
       "pendulum coupled to a damped oscillator (m_pend, m_osc, l, k, d, g)",
       [](const std::map<std::string, double>& m) {
         PendulumParams prm;
         prm.m_pend = param_or(m, "m_pend", prm.m_pend);
         prm.m_osc = param_or(m, "m_osc", prm.m_osc);
         prm.length = param_or(m, "l", prm.length);
         prm.k = param_or(m, "k", prm.k);
         prm.d = param_or(m, "d", prm.d);
         prm.g = param_or(m, "g", prm.g);
         prm.exact_jacobian = param_or(m, "exact_jacobian", 0.0) != 0.0;
         return pendulum_oscillator(prm);
       }},
      {"pr",
       "quasilinear two-component benchmark (lambda1, lambda2, eps)",
       [](const std::map<std::string, double>& m) {
         return prothero_robinson(param_or(m, "lambda1", -1e-6),
                                  param_or(m, "lambda2", -1.0),
                                  param_or(m, "eps", 5e-4));
       }},
  };
  return registry;
}

ProblemSpec make_problem(const std::string& name,
                         const std::map<std::string, double>& params) {
  for (const auto& info : problem_registry())
    if (info.name == name) return info.build(params);
  throw Error("unknown problem '" + name + "'");
}

}  // namespace mrgark

// Benchmark problems with exact or reference solutions, in additive or
// component-partitioned form.

#pragma once

#include <functional>
#include <map>
#include <string>
#include <variant>

#include "mrgark/dense.hpp"

namespace mrgark {

// y' = f_slow(t,y) + f_fast(t,y). Jacobian providers are optional; the
// integrator falls back to finite differences when they are missing.
struct AdditiveProblem {
  std::size_t dim = 0;
  std::function<Vec(double, const Vec&)> f_slow, f_fast;
  std::function<Mat(double, const Vec&)> jac_slow, jac_fast;
  std::function<Vec(double, const Vec&)> dfdt_slow, dfdt_fast;
  bool autonomous = true;
};

// [yF' ; yS'] = [f_fast(t,yF,yS) ; f_slow(t,yF,yS)] with four Jacobian
// blocks d f^a / d y^b.
struct ComponentProblem {
  std::size_t dim_fast = 0, dim_slow = 0;
  std::function<Vec(double, const Vec&, const Vec&)> f_fast, f_slow;
  std::function<Mat(double, const Vec&, const Vec&)> jac_ff, jac_fs, jac_sf,
      jac_ss;
  std::function<Vec(double, const Vec&, const Vec&)> dfdt_fast, dfdt_slow;
  bool autonomous = true;
};

struct ProblemSpec {
  std::string name;
  std::string summary;
  std::variant<AdditiveProblem, ComponentProblem> ode;
  Vec y0;  // stacked [yF ; yS] for component problems
  double t0 = 0.0, t_end = 1.0;
  std::function<Vec(double)> exact;  // empty when no closed form exists
  // index groups of the state vector used for split error reporting
  std::vector<std::size_t> fast_indices, slow_indices;

  bool is_component() const {
    return std::holds_alternative<ComponentProblem>(ode);
  }
  std::size_t dim() const {
    return is_component() ? std::get<ComponentProblem>(ode).dim_fast +
                                std::get<ComponentProblem>(ode).dim_slow
                          : std::get<AdditiveProblem>(ode).dim;
  }
};

// y' = lambdaS y + lambdaF y, exact y0 exp((lambdaS+lambdaF) t).
ProblemSpec dahlquist(double lambdaS, double lambdaF, double y0 = 1.0);

// [yF';yS'] = [[lF, etaS],[etaF, lS]] [yF;yS]; reference solutions come from
// the matrix exponential (computed where needed, no closed form is stored).
ProblemSpec coupled_linear_2x2(double lambdaF, double lambdaS, double etaS,
                               double etaF, Vec y0 = {1.0, 1.0});

struct PendulumParams {
  double m_pend = 1.0, m_osc = 1.0, length = 1.0;
  double k = 10.0, d = 1.0, g = 9.81;
  bool exact_jacobian = false;  // finite differences by default
};

// Pendulum coupled to a horizontally moving mass through a nonlinear
// spring-damper; state [angle, x1, angle', x1'], fast = gravity + kinematics,
// slow = spring-damper forces.
ProblemSpec pendulum_oscillator(const PendulumParams& p = {},
                                Vec y0 = {0.7853981633974483, 0.5, 0.0, 0.0},
                                double t0 = 0.0, double t_end = 1.0);

// Quasilinear system y' = A(y)(y - f(t)) + f'(t) with
// A = [[l1 yS, eps],[eps, l2 yF]] and f = [sin(2 pi t)+2 ; sin(20 pi t)+2];
// the exact solution is f itself. Stored component-partitioned with the
// rapidly oscillating component as the fast block.
ProblemSpec prothero_robinson(double lambda1 = -1e-6, double lambda2 = -1.0,
                              double eps = 5e-4);

struct ProblemInfo {
  std::string name;
  std::string summary;
  std::function<ProblemSpec(const std::map<std::string, double>&)> build;
};

const std::vector<ProblemInfo>& problem_registry();
ProblemSpec make_problem(const std::string& name,
                         const std::map<std::string, double>& params = {});

}  // namespace mrgark

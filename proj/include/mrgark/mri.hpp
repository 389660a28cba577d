// Infinitesimal-step methods: the fast subsystem is advanced by integrating
// a modified ODE between slow stages (or once across the macro-step for the
// step-predictor-corrector variant) with an explicit Runge-Kutta scheme of
// configurable substep count.

#pragma once

#include "mrgark/conditions.hpp"
#include "mrgark/stepping.hpp"

namespace mrgark {

// Slow base with non-decreasing abscissae, polynomial slow-stage injection
// r_lambda(theta) and fast-increment feedback weights q. The time-augmented
// formulation requires g^S_1 = 0 (explicit first slow stage) for internal
// consistency, since the first micro interval is empty.
struct MriCoupling {
  BaseMethod slow;
  // r_coeff[k](lambda-1, j-1) is the theta^k coefficient of the polynomial
  // multiplying the j-th slow stage increment inside interval lambda;
  // entries with j >= lambda must vanish.
  std::vector<Mat> r_coeff;
  // q(lambda-1, ell-1): weight of the ell-th fast interval increment in the
  // lambda-th slow stage; lower triangular.
  Mat q;

  std::size_t stages() const { return slow.stages(); }
  Vec delta_c() const;
  void validate() const;
};

struct InnerRk {
  BaseMethod erk = rk4_erk();
  std::size_t substeps = 20;
};

// One macro-step on an additive problem.
StepResult mri_step(const MriCoupling& coupling, const ProblemSpec& prob,
                    const InnerRk& inner, double t, const Vec& y, double H,
                    const StepOptions& opt = {});

// Discrete reformulation: micro-step lambda covers Delta c^S_lambda of the
// macro-step with the given explicit fast base; exactly reproduces mri_step
// when the inner integrator takes one substep per interval.
MultirateMethod mri_as_imex(const MriCoupling& coupling,
                            const BaseMethod& inner_erk);

ConditionReport check_mri_order3(const MriCoupling& coupling,
                                 ConditionMode mode,
                                 double tol = kConditionTolerance);

// Order-3 coupling on the explicit-first-stage Kutta base; free parameters
// mu (base diagonal) and delta (gamma row-sum shift).
MriCoupling mri_ros3_coupling(double mu = 0.5, double delta = 0.0);

// Step-predictor-corrector infinitesimal methods: predictor as in the
// discrete SPC flavor, then one modified fast ODE across the whole step.
struct SpcMriCoupling {
  BaseMethod slow;
  std::vector<Vec> mu;  // mu[k]: theta^k coefficient vectors
  std::vector<Vec> nu;  // empty = zero (explicit modified ODE)
};

StepResult spc_mri_step(const SpcMriCoupling& coupling,
                        const ProblemSpec& prob, const InnerRk& inner,
                        double t, const Vec& y, double H,
                        const StepOptions& opt = {});

// Equivalent discrete SPC method whose single fast "micro-step" is the
// (composed) inner scheme evaluated at its abscissae.
MultirateMethod spc_mri_as_discrete(const SpcMriCoupling& coupling,
                                    const BaseMethod& inner_erk);

// n-fold composition of an explicit Runge-Kutta method as one tableau.
BaseMethod compose_substeps(const BaseMethod& erk, std::size_t n);

ConditionReport check_spc_mri(const SpcMriCoupling& coupling, int order,
                              ConditionMode mode,
                              double tol = kConditionTolerance);

// Four-stage stiffly accurate slow base with the linear-in-time coupling
// family; theta is a free parameter.
SpcMriCoupling ros34pw2_spc_mri(double theta);

// Six-stage coupling family over an externally supplied base.
SpcMriCoupling rodas_spc_mri(double theta1, double theta2, double theta3,
                             double theta4, const BaseMethod& rodas_base);

}  // namespace mrgark

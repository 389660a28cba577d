// Macro-step execution for additive and component partitioned problems.
//
// Non-autonomous right-hand sides are handled by appending the time as an
// extra slow-partition component with unit slope; with internally consistent
// methods this reproduces the stage abscissae exactly and collapses to the
// plain arithmetic for autonomous problems.
//
// Stage computations are scheduled through the strongly connected components
// of the stage dependency graph (edges = nonzero assembled A or G entries):
// singleton components are ordinary Rosenbrock stage solves, larger ones are
// joint linear systems (compound pairs in the first-micro-step couplings, a
// monolithic group in the worst case). Factorizations are reused across
// groups with the same diagonal coupling pattern.

#pragma once

#include "mrgark/multirate.hpp"
#include "mrgark/problems.hpp"

namespace mrgark {

enum class JacobianMode : std::uint8_t {
  Exact,             // providers at the current macro-step start
  TimeLagged,        // providers at the previous macro-step start
  FiniteDifference,  // central differences (Rosenbrock-W accuracy)
};

enum class ScheduleKind : std::uint8_t {
  Decoupled,      // all stages sequential
  CompoundPairs,  // joint solves of fast/slow pairs, rest sequential
  Monolithic,     // at least one larger joint group
  Spc,            // predictor / corrector path
};

std::string to_string(ScheduleKind k);

struct StepResult {
  Vec y;                         // stacked next state
  std::optional<Vec> y_embedded;
  std::vector<Vec> stage_k;      // per-stage increments (assembled order)
};

struct StepOptions {
  JacobianMode jacobian = JacobianMode::Exact;
};

class Stepper {
 public:
  explicit Stepper(MultirateMethod mrm);

  ScheduleKind schedule() const { return schedule_; }
  const MultirateMethod& method() const { return mrm_; }
  const AssembledTableau& tableau() const { return tab_; }

  // One macro-step from (t, y) of size H. `lag_state` supplies the Jacobian
  // linearization point for TimeLagged mode (defaults to (t, y)).
  StepResult step(const ProblemSpec& prob, double t, const Vec& y, double H,
                  const StepOptions& opt = {},
                  const Vec* lag_state = nullptr, double lag_t = 0.0) const;

 private:
  struct Group {
    std::vector<std::size_t> stages;
  };

  StepResult step_scheduled(const ProblemSpec& prob, double t, const Vec& y,
                            double H, const StepOptions& opt,
                            const Vec* lag_state, double lag_t) const;
  StepResult step_spc(const ProblemSpec& prob, double t, const Vec& y,
                      double H, const StepOptions& opt, const Vec* lag_state,
                      double lag_t) const;

  MultirateMethod mrm_;
  AssembledTableau tab_;
  ScheduleKind schedule_;
  std::vector<Group> groups_;  // topological order
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> y;
  const Vec& final_state() const { return y.back(); }
};

struct IntegrateOptions {
  JacobianMode jacobian = JacobianMode::Exact;
  bool embedded_weights = false;  // propagate with the embedded weights
  bool store_trajectory = true;
};

// Fixed-step driver; (t_end - t0)/H must be an integer up to a few ulp.
Trajectory integrate(const MultirateMethod& mrm, const ProblemSpec& prob,
                     double t0, double t_end, double H,
                     const IntegrateOptions& opt = {});

// High-accuracy reference at t_end: single-rate solve on the full right-hand
// side, halving the step until two successive solutions agree within tol.
Vec reference_solve(const ProblemSpec& prob, double t0, double t_end,
                    double tol, const BaseMethod& base = ros34pw2());

struct ConvergenceRow {
  double H = 0.0;
  double err_slow = 0.0, err_fast = 0.0;
  double order_slow = 0.0, order_fast = 0.0;  // pairwise log2 ratios
};

enum class ErrorNorm : std::uint8_t {
  FinalTime,      // Euclidean norm of the final-time error per group
  TrajectoryMax,  // maximum over all step points (needs an exact solution)
};

struct ConvergenceOptions {
  JacobianMode jacobian = JacobianMode::Exact;
  bool embedded_weights = false;
  double reference_tol = 1e-12;  // used when the problem has no exact solution
  ErrorNorm norm = ErrorNorm::FinalTime;
};

// Final-time errors over a halving sequence H0, H0/2, ..., split by the
// problem's fast/slow component groups.
std::vector<ConvergenceRow> convergence_study(const MultirateMethod& mrm,
                                              const ProblemSpec& prob,
                                              double H0, std::size_t halvings,
                                              const ConvergenceOptions& opt = {});

// Least-squares slope of log2(err) against log2(H).
double fitted_order(const std::vector<double>& H,
                    const std::vector<double>& err);

}  // namespace mrgark

// Rosenbrock(-W) base method coefficients: weights b, strictly lower alpha,
// lower triangular gamma, and the derived vectors used by every order
// condition. Explicit Runge-Kutta methods are the gamma == 0 special case.

#pragma once

#include <optional>
#include <string>

#include "mrgark/dense.hpp"

namespace mrgark {

struct BaseMethod {
  std::string name;
  Mat alpha;                  // s x s, strictly lower triangular
  Mat gamma;                  // s x s, lower triangular
  Vec b;                      // s weights
  std::optional<Vec> b_hat;   // embedded weights, if any

  // Derived at construction, never recomputed.
  Mat beta;                   // alpha + gamma
  Vec c;                      // alpha * 1
  Vec g;                      // gamma * 1
  Vec e;                      // beta * 1

  std::size_t stages() const { return b.size(); }
  bool explicit_method() const { return gamma.max_abs() == 0.0; }
  // All diagonal gamma entries equal: one LU factorization per step.
  bool single_lu() const;

  static BaseMethod make(std::string name, Mat alpha, Mat gamma, Vec b,
                         std::optional<Vec> b_hat = std::nullopt);
};

// Order-3 scheme built on Kutta's third-order ERK weights with free
// parameters gamma (stage diagonal) and beta21.
BaseMethod kutta3_ros(double gamma, double beta21);

// Same alpha/b but an explicit first stage; gamma solved so the scheme
// retains order 3. Serves as a slow base for infinitesimal-step couplings,
// which require g_1 = 0. mu != 0; delta shifts row sums of gamma.
BaseMethod kutta3_explicit_first(double mu = 0.5, double delta = 0.0);

// Kutta's explicit third-order method (gamma = 0).
BaseMethod kutta3_erk();

// Classical four-stage explicit Runge-Kutta method.
BaseMethod rk4_erk();

// Four-stage order-3 stiffly accurate Rosenbrock-W method of Rang and
// Angermann.
BaseMethod ros34pw2();

// One-stage linearly implicit Euler (b=[1], gamma=[g]).
BaseMethod implicit_euler_ros(double g = 1.0);

// Two-stage order-2 scheme, diagonal gd (default 1 - 1/sqrt(2)).
BaseMethod ros2(double gd = 0.29289321881345254);

// Two-stage order-2 scheme with an explicit first stage.
BaseMethod ros2_explicit_first(double gd = 0.5);

}  // namespace mrgark

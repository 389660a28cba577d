// Coefficient constructors: the embedded order (2)3 implicit-implicit and
// implicit-explicit compound-first-step families, generic telescopic
// compound-first-step and step-predictor-corrector couplings, and the
// minimal first-stage-only coupling. All outputs are validated against the
// condition engine in the tests rather than trusted from transcription.

#pragma once

#include <functional>
#include <map>

#include "mrgark/multirate.hpp"

namespace mrgark {

// Embedded implicit-implicit scheme of order (2)3 with a fully implicit
// compound first micro-step; also satisfies the lagged-Jacobian order-3
// conditions. Free parameters gamma != 0 and beta21 != 0.
MultirateMethod imim_order23(double gamma, double beta21, std::size_t M);

// Same family with explicit fast micro-steps 2..M (only the compound first
// micro-step is implicit in the fast variable).
MultirateMethod imex_order23(double gamma, double beta21, std::size_t M);

struct CfsExtras {
  // F(lambda) matrices (1-based micro-step index shifted to 0-based vector),
  // each with row sums (lambda-1). Empty means F = 0 (valid only for M = 1).
  std::vector<Mat> F;
  // Optional strictly-lower / lower tilde corrections with zero row sums.
  std::vector<Mat> alpha_fs_tilde, gamma_fs_tilde;
  std::optional<Mat> alpha_sf_tilde, gamma_sf_tilde;
};

// Telescopic compound-first-step coupling: both partitions use `base`, the
// slow/fast coupling lives on the first micro-step only.
MultirateMethod compound_first_step(const BaseMethod& base, std::size_t M,
                                    const CfsExtras& extras);

// F(lambda) = (lambda-1) * 1 v^T, v^T 1 = 1.
std::vector<Mat> rank_one_shift(const Vec& v, std::size_t stages,
                                std::size_t M);

struct SpcCoupling {
  // rank-one: F(lambda) = (lambda-1) 1 v1^T with v1^T 1 = 1.
  std::optional<Vec> v1;
  // polynomial: F(lambda) = (lambda-1) D1 + (lambda-1)^2 D2 with
  // D1 1 = 1, D2 1 = 0.
  std::optional<Mat> D1, D2;
};

// Telescopic step-predictor-corrector method on `base`.
MultirateMethod spc_telescopic(const BaseMethod& base, std::size_t M,
                               const SpcCoupling& coupling);

// v1 = 2 b^T beta, the third-order rank-one choice.
Vec spc_rank_one_weights(const BaseMethod& base);

// Solves the order-4 polynomial coupling equations for D1, D2 (three-dyad
// ansatz spanned by 1, c and e). Requires an order-4 base.
SpcCoupling spc_polynomial_solve(const BaseMethod& base);

// Two-stage bases, joint solve only between the first fast and first slow
// stage; every other stage is decoupled. theta/phi distribute the free row
// sums of the second-row couplings.
MultirateMethod first_stage_only_coupling(const BaseMethod& base,
                                          std::size_t M, double theta = 0.0,
                                          double phi = 0.0);

// M = 1 method whose fast/slow coupling blocks equal the base matrices; one
// step equals a single-rate base step on f_slow + f_fast.
MultirateMethod single_rate_compound(const BaseMethod& base);

// ---- registry (CLI surface) ----

struct MethodParams {
  double gamma = 1.0;
  double beta21 = 0.5;
  std::size_t M = 2;
  std::string base = "ros34pw2";
  std::string base_file;  // tableau file for file-loaded bases ("rodas4")
  double theta = 0.0;
  double mu = 0.5;
};

struct MethodInfo {
  std::string name;
  std::string summary;
  std::function<MultirateMethod(const MethodParams&)> build;
};

const std::vector<MethodInfo>& method_registry();
MultirateMethod make_method(const std::string& name, const MethodParams& p);
BaseMethod base_by_name(const std::string& name, const MethodParams& p);

}  // namespace mrgark

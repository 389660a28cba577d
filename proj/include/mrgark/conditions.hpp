// Order-condition evaluation. Two engines share one condition catalogue:
// a generic one that walks the monolithic assembled tableau, and a
// specialized one that evaluates the same instances through per-micro-step
// block sums without ever forming the big matrix. Residuals of both are
// normalized to the single-rate scale so they can be compared entrywise.

#pragma once

#include <string>
#include <vector>

#include "mrgark/multirate.hpp"

namespace mrgark {

enum class ConditionMode : std::uint8_t { Ros, Row, TimeLagged };

std::string to_string(ConditionMode m);
ConditionMode condition_mode_from_string(const std::string& s);

struct ConditionEntry {
  std::string id;
  int order = 0;
  double target = 0.0;    // as reported (micro-step-scaled for named entries)
  double value = 0.0;     // computed left-hand side, same scaling as target
  double residual = 0.0;  // (value - target) / scale, single-rate units
  bool applicable = true; // false when a precondition failed
  bool informational = false;  // excluded from achieved_order

  bool pass(double tol) const {
    return !applicable || std::abs(residual) <= tol;
  }
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;
  double tolerance = 1e-10;
  int requested_order = 0;
  int achieved_order = 0;
  bool preconditions_ok = true;
  std::string note;

  // Largest p <= requested_order with every applicable condition of order
  // <= p within tolerance.
  void finalize();
  double max_residual(int up_to_order) const;
  const ConditionEntry* find(const std::string& id) const;

  std::string render_text() const;
  std::string render_csv() const;
};

// Default pass/fail tolerance; coefficients known to ~16 digits accumulate
// roundoff through the matrix products.
inline constexpr double kConditionTolerance = 1e-10;

// Single Rosenbrock(-W) method, orders 1..4. TimeLagged = Ros plus the
// b^T c = 1/2 third-order condition.
ConditionReport check_base_ros(const BaseMethod& base, int order,
                               ConditionMode mode,
                               double tol = kConditionTolerance);

// Residuals of the coupling abscissae/gamma-sum consistency relations,
// flavor-aware (the step-predictor-corrector layout only constrains the
// fast/slow blocks).
ConditionReport check_internal_consistency(const MultirateMethod& mrm,
                                           double tol = kConditionTolerance);

// Every two-partition condition instance up to `order`, evaluated through
// per-micro-step block operations. Rejects the SPC flavor (see check_spc).
// Adds the reduced micro-step-scaled coupling conditions as named
// informational entries when internal consistency holds.
ConditionReport check_mr_order(const MultirateMethod& mrm, int order,
                               ConditionMode mode,
                               double tol = kConditionTolerance);

// Same condition instances evaluated on an assembled tableau.
ConditionReport check_generic_gark(const AssembledTableau& tab, int order,
                                   ConditionMode mode,
                                   double tol = kConditionTolerance);

// Step-predictor-corrector coupling conditions (plus base-method orders).
// Ros mode carries order-4 coupling conditions; Row mode is capped at 3.
ConditionReport check_spc(const MultirateMethod& mrm, int order,
                          ConditionMode mode,
                          double tol = kConditionTolerance);

struct StiffAccuracyResult {
  bool stiffly_accurate = false;
  double residual_slow = 0.0;  // max |b^S - last row of beta^{FS,M}|
  double residual_fast = 0.0;  // max |b^F - last row of beta^{FF,M}|
};

StiffAccuracyResult check_stiff_accuracy(const MultirateMethod& mrm,
                                         double tol = 1e-12);

}  // namespace mrgark

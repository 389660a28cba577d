// Two-partition multirate method data: base methods, per-micro-step coupling
// matrices, and the assembled monolithic tableau over one macro-step.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrgark/base_method.hpp"

namespace mrgark {

enum class Flavor : std::uint8_t {
  General,
  Imex,
  CompoundFirstStep,
  Spc,
  Decoupled,
};

std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string& s);

// Per-micro-step coupling matrices. alpha_fs[l], gamma_fs[l] are sF x sS;
// alpha_sf[l], gamma_sf[l] are sS x sF, l = 0..M-1 for micro-steps 1..M.
struct CouplingSet {
  std::size_t micro_steps = 1;
  std::vector<Mat> alpha_fs, gamma_fs;
  std::vector<Mat> alpha_sf, gamma_sf;

  static CouplingSet zero(std::size_t M, std::size_t sF, std::size_t sS);
};

struct MultirateMethod {
  std::string name;
  BaseMethod slow;
  BaseMethod fast;
  // Fast base for micro-steps 2..M when it differs from the first one
  // (implicit compound step followed by explicit micro-steps).
  std::optional<BaseMethod> fast_tail;
  CouplingSet coupling;
  Flavor flavor = Flavor::General;
  // Fraction of the macro-step covered by each micro-step; uniform 1/M by
  // default. Infinitesimal-step reformulations produce non-uniform entries.
  Vec micro_fractions;

  std::size_t micro_steps() const { return coupling.micro_steps; }
  std::size_t fast_stages() const { return fast.stages(); }
  std::size_t slow_stages() const { return slow.stages(); }
  const BaseMethod& fast_step(std::size_t lambda) const {  // 1-based
    return (lambda >= 2 && fast_tail) ? *fast_tail : fast;
  }
  bool has_embedded() const {
    return slow.b_hat.has_value() && fast.b_hat.has_value();
  }

  // Checks dimensions, micro fractions, and flavor-vs-sparsity consistency.
  void validate() const;
};

enum class Partition : std::uint8_t { Fast, Slow };

struct StageLabel {
  Partition part;
  std::size_t micro_step;  // 1-based for fast stages; 0 for slow/predictor
  std::size_t stage;       // index within the base method
  bool predictor = false;  // SPC predictor stages (fast partition)
};

// Monolithic two-partition GARK tableau over one macro-step.
struct AssembledTableau {
  Mat A, G;
  Vec b;
  std::optional<Vec> b_hat;
  std::vector<StageLabel> labels;

  std::size_t stages() const { return b.size(); }
  Mat B() const { return A + G; }
  std::vector<std::size_t> partition_rows(Partition p) const;
};

// Builds the monolithic tableau. Non-SPC flavors produce the M*sF+sS stage
// layout (fast micro-step blocks first, slow block last); the SPC flavor has
// its predictor stages prepended to the fast partition.
AssembledTableau assemble_gark(const MultirateMethod& mrm);

// Coupling structure matrix S (M*sF x sS) on the assembled blocks; a nonzero
// S[(lambda,i)][j] marks fast stage (lambda,i) and slow stage j as jointly
// implicit.
Mat structure_matrix(const MultirateMethod& mrm);

enum class CouplingBlock : std::uint8_t { AlphaFS, GammaFS, AlphaSF, GammaSF };

// Moment sum over micro-steps: sum_l (l-1)^k * block[l], k <= 3.
Mat averaged_coupling(const MultirateMethod& mrm, CouplingBlock which,
                      std::size_t k);

// Weights accumulating the intermediate solution after `lambda` completed
// micro-steps: one copy of the fast weight vector per completed micro-step,
// applied to the micro-step increments k^{F,l}.
std::vector<Vec> intermediate_solution_weights(const MultirateMethod& mrm,
                                               std::size_t lambda);

}  // namespace mrgark

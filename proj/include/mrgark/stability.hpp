// Linear stability: scalar stability function R(Z) on the assembled
// tableau, the 2x2 stability matrix of the component-partitioned linear test
// problem, stiff limits and grid scans.

#pragma once

#include <complex>

#include "mrgark/multirate.hpp"

namespace mrgark {

using Cplx = std::complex<double>;

// R(Z) = 1 + b^T (I - Z B)^{-1} Z 1 with Z = diag(zF on fast stages, zS on
// slow stages). Throws on a singular resolvent.
Cplx stability_function(const AssembledTableau& tab, Cplx zS, Cplx zF);
Cplx stability_function(const MultirateMethod& mrm, Cplx zS, Cplx zF);

// Second algebraic route, R = 1 + b^T Z (I - B Z)^{-1} 1.
Cplx stability_function_alt(const AssembledTableau& tab, Cplx zS, Cplx zF);

// One-step matrix of the 2x2 component-partitioned linear problem.
CMat stability_matrix_2x2(const AssembledTableau& tab, Cplx zF, Cplx zS,
                          Cplx wS, Cplx wF);
CMat stability_matrix_2x2(const MultirateMethod& mrm, Cplx zF, Cplx zS,
                          Cplx wS, Cplx wF);

// |R(zS, -zF_magnitude)| for probing the stiff fast limit.
double stiff_limit(const MultirateMethod& mrm, Cplx zS, double zF_magnitude);

struct ScanPoint {
  double re = 0.0, im = 0.0;
  double abs_R = 0.0;  // NaN marks a singular resolvent
};

enum class ScanVariable : std::uint8_t { Both, FastOnly, SlowOnly };

struct ScanSpec {
  double re0 = -10.0, re1 = 0.0;
  double im0 = 0.0, im1 = 0.0;
  std::size_t n_re = 11, n_im = 1;
  ScanVariable vary = ScanVariable::Both;
  Cplx fixed = 0.0;  // value of the non-varying argument
};

std::vector<ScanPoint> stability_scan(const MultirateMethod& mrm,
                                      const ScanSpec& spec);

// CSV rows `re_z,im_z,abs_R`.
std::string scan_csv(const std::vector<ScanPoint>& points);

}  // namespace mrgark

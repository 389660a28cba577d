// Plain-text tableau files.
//
// Header line:  s M sF sS flavor
// For a single base method (flavor "base"): M = sF = sS = 0 and s is the
// stage count, followed by
//   alpha (s rows), gamma (s rows), b (one row),
//   a line "bhat 0|1", and the embedded row when present.
// For a multirate method (s = M*sF + sS): slow block (alpha, gamma, b,
// bhat flag/row), fast block likewise, a line "fast_tail 0|1" (plus the tail
// block used for micro-steps 2..M when present), a line "fractions" followed
// by the M micro-step fractions, then per micro-step lambda = 1..M the
// matrices alphaFS, gammaFS (sF rows each) and alphaSF, gammaSF (sS rows
// each). All numbers are written with 17 significant digits.

#pragma once

#include <iosfwd>
#include <string>

#include "mrgark/multirate.hpp"

namespace mrgark {

void save_tableau(std::ostream& os, const BaseMethod& base);
void save_tableau(std::ostream& os, const MultirateMethod& mrm);
void save_tableau_file(const std::string& path, const BaseMethod& base);
void save_tableau_file(const std::string& path, const MultirateMethod& mrm);

BaseMethod load_base_tableau(std::istream& is, const std::string& name);
BaseMethod load_base_tableau_file(const std::string& path);
MultirateMethod load_multirate_tableau(std::istream& is,
                                       const std::string& name);
MultirateMethod load_multirate_tableau_file(const std::string& path);

}  // namespace mrgark

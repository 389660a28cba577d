#include "mrgark/stability.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mrgark {

namespace {

CVec zvec(const AssembledTableau& tab, Cplx zS, Cplx zF) {
  CVec z(tab.stages());
  for (std::size_t i = 0; i < tab.stages(); ++i)
    z[i] = tab.labels[i].part == Partition::Fast ? zF : zS;
  return z;
}

CMat complex_B(const AssembledTableau& tab) {
  const Mat B = tab.B();
  CMat cb(B.rows(), B.cols());
  for (std::size_t i = 0; i < B.rows(); ++i)
    for (std::size_t j = 0; j < B.cols(); ++j) cb(i, j) = B(i, j);
  return cb;
}

}  // namespace

Cplx stability_function(const AssembledTableau& tab, Cplx zS, Cplx zF) {
  const std::size_t n = tab.stages();
  const CVec z = zvec(tab, zS, zF);
  const CMat B = complex_B(tab);
  // I - Z B
  CMat m = CMat::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) -= z[i] * B(i, j);
  CVec rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = z[i];
  const CVec x = Lu<Cplx>(std::move(m), "stability resolvent").solve(rhs);
  Cplx r = 1.0;
  for (std::size_t i = 0; i < n; ++i) r += tab.b[i] * x[i];
  return r;
}

Cplx stability_function(const MultirateMethod& mrm, Cplx zS, Cplx zF) {
  return stability_function(assemble_gark(mrm), zS, zF);
}

Cplx stability_function_alt(const AssembledTableau& tab, Cplx zS, Cplx zF) {
  const std::size_t n = tab.stages();
  const CVec z = zvec(tab, zS, zF);
  const CMat B = complex_B(tab);
  CMat m = CMat::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) -= B(i, j) * z[j];
  const CVec x =
      Lu<Cplx>(std::move(m), "stability resolvent").solve(CVec(n, 1.0));
  Cplx r = 1.0;
  for (std::size_t i = 0; i < n; ++i) r += tab.b[i] * z[i] * x[i];
  return r;
}

CMat stability_matrix_2x2(const AssembledTableau& tab, Cplx zF, Cplx zS,
                          Cplx wS, Cplx wF) {
  const std::size_t n = tab.stages();
  const Mat B = tab.B();
  CMat m(n, n);
  CMat rhs(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const bool fast_i = tab.labels[i].part == Partition::Fast;
    for (std::size_t j = 0; j < n; ++j) {
      const bool fast_j = tab.labels[j].part == Partition::Fast;
      Cplx w;
      if (fast_i && fast_j) w = zF;
      else if (fast_i && !fast_j) w = wS;
      else if (!fast_i && fast_j) w = wF;
      else w = zS;
      m(i, j) = (i == j ? Cplx{1.0} : Cplx{0.0}) - w * B(i, j);
    }
    rhs(i, 0) = fast_i ? zF : wF;
    rhs(i, 1) = fast_i ? wS : zS;
  }
  const CMat x = Lu<Cplx>(std::move(m), "stability matrix resolvent").solve(rhs);
  CMat out = CMat::identity(2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row = tab.labels[i].part == Partition::Fast ? 0 : 1;
    out(row, 0) += tab.b[i] * x(i, 0);
    out(row, 1) += tab.b[i] * x(i, 1);
  }
  return out;
}

CMat stability_matrix_2x2(const MultirateMethod& mrm, Cplx zF, Cplx zS,
                          Cplx wS, Cplx wF) {
  return stability_matrix_2x2(assemble_gark(mrm), zF, zS, wS, wF);
}

double stiff_limit(const MultirateMethod& mrm, Cplx zS, double zF_magnitude) {
  return std::abs(stability_function(mrm, zS, Cplx{-zF_magnitude, 0.0}));
}

std::vector<ScanPoint> stability_scan(const MultirateMethod& mrm,
                                      const ScanSpec& spec) {
  const AssembledTableau tab = assemble_gark(mrm);
  std::vector<ScanPoint> out;
  out.reserve(spec.n_re * spec.n_im);
  for (std::size_t ii = 0; ii < spec.n_im; ++ii) {
    const double im =
        spec.n_im == 1
            ? spec.im0
            : spec.im0 + (spec.im1 - spec.im0) * static_cast<double>(ii) /
                             static_cast<double>(spec.n_im - 1);
    for (std::size_t ri = 0; ri < spec.n_re; ++ri) {
      const double re =
          spec.n_re == 1
              ? spec.re0
              : spec.re0 + (spec.re1 - spec.re0) * static_cast<double>(ri) /
                               static_cast<double>(spec.n_re - 1);
      const Cplx z{re, im};
      Cplx zS = z, zF = z;
      if (spec.vary == ScanVariable::FastOnly) zS = spec.fixed;
      if (spec.vary == ScanVariable::SlowOnly) zF = spec.fixed;
      ScanPoint pt;
      pt.re = re;
      pt.im = im;
      try {
        pt.abs_R = std::abs(stability_function(tab, zS, zF));
      } catch (const Error&) {
        pt.abs_R = std::numeric_limits<double>::quiet_NaN();
      }
      out.push_back(pt);
    }
  }
  return out;
}

std::string scan_csv(const std::vector<ScanPoint>& points) {
  std::ostringstream os;
  os << "re_z,im_z,abs_R\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.re, p.im, p.abs_R);
    os << buf;
  }
  return os.str();
}

}  // namespace mrgark

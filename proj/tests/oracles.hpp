// Test-side oracles, independent of the library's stepping and condition
// paths: a textbook single-rate Rosenbrock step, a fixed-point monolithic
// GARK step on the assembled tableau, a scaling-and-squaring matrix
// exponential, and a random-method generator.

#pragma once

#include <functional>
#include <random>

#include "mrgark/multirate.hpp"
#include "mrgark/problems.hpp"

namespace oracles {

using namespace mrgark;

// Plain single-rate Rosenbrock(-W) step on y' = f(t, y) with Jacobian L and
// time-derivative column dfdt (non-autonomous correction), straight from the
// stage recursion.
inline Vec single_rate_ros_step(const BaseMethod& m,
                                const std::function<Vec(double, const Vec&)>& f,
                                const Mat& L, const Vec& dfdt, double t,
                                const Vec& y, double H) {
  const std::size_t s = m.stages();
  const std::size_t d = y.size();
  std::vector<Vec> k(s);
  for (std::size_t i = 0; i < s; ++i) {
    Vec arg = y;
    double targ = t;
    for (std::size_t j = 0; j < i; ++j) {
      axpy(m.alpha(i, j), k[j], arg);
      targ += m.alpha(i, j) * H;
    }
    Vec rhs = f(targ, arg);
    for (auto& x : rhs) x *= H;
    Vec gacc(d, 0.0);
    double gsum = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      axpy(m.gamma(i, j), k[j], gacc);
      gsum += m.gamma(i, j);
    }
    Vec lg = matvec(L, gacc);
    for (std::size_t z = 0; z < d; ++z)
      rhs[z] += H * lg[z] + H * H * (gsum + m.gamma(i, i)) * dfdt[z];
    if (m.gamma(i, i) != 0.0) {
      Mat sys = Mat::identity(d);
      sys -= L * (H * m.gamma(i, i));
      k[i] = Lu<double>(std::move(sys)).solve(std::move(rhs));
    } else {
      k[i] = std::move(rhs);
    }
  }
  Vec out = y;
  for (std::size_t i = 0; i < s; ++i) axpy(m.b[i], k[i], out);
  return out;
}

// Monolithic GARK-ROS step on an assembled two-partition tableau applied to
// an additive problem: the coupled stage system is solved as one big linear
// system, iterating on the (strictly lower in effect) function arguments.
inline Vec monolithic_gark_step(const AssembledTableau& tab,
                                const AdditiveProblem& ode, double t,
                                const Vec& y, double H) {
  const std::size_t d = ode.dim, da = d + 1, n = tab.stages();
  auto faug = [&](Partition p, const Vec& arg) {
    Vec f = (p == Partition::Fast ? ode.f_fast : ode.f_slow)(
        arg[d], Vec(arg.begin(), arg.begin() + d));
    f.push_back(p == Partition::Fast ? 0.0 : 1.0);
    return f;
  };
  auto jaug = [&](Partition p) {
    Mat j(da, da);
    const Mat inner =
        (p == Partition::Fast ? ode.jac_fast : ode.jac_slow)(t, y);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t c = 0; c < d; ++c) j(i, c) = inner(i, c);
    if (!ode.autonomous) {
      const Vec col =
          (p == Partition::Fast ? ode.dfdt_fast : ode.dfdt_slow)(t, y);
      for (std::size_t i = 0; i < d; ++i) j(i, d) = col[i];
    }
    return j;
  };
  const Mat LF = jaug(Partition::Fast), LS = jaug(Partition::Slow);

  std::vector<Vec> k(n, Vec(da, 0.0));
  for (int it = 0; it < 300; ++it) {
    Mat sys(n * da, n * da);
    Vec rhs(n * da);
    for (std::size_t i = 0; i < n * da; ++i) sys(i, i) = 1.0;
    for (std::size_t r = 0; r < n; ++r) {
      Vec arg = y;
      arg.push_back(t);
      for (std::size_t j = 0; j < n; ++j)
        if (tab.A(r, j) != 0.0) axpy(tab.A(r, j), k[j], arg);
      const Vec f = faug(tab.labels[r].part, arg);
      const Mat& L = tab.labels[r].part == Partition::Fast ? LF : LS;
      for (std::size_t j = 0; j < n; ++j) {
        if (tab.G(r, j) == 0.0) continue;
        for (std::size_t a = 0; a < da; ++a)
          for (std::size_t b2 = 0; b2 < da; ++b2)
            sys(r * da + a, j * da + b2) -= H * tab.G(r, j) * L(a, b2);
      }
      for (std::size_t a = 0; a < da; ++a) rhs[r * da + a] = H * f[a];
    }
    const Vec sol = Lu<double>(std::move(sys)).solve(std::move(rhs));
    double diff = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t a = 0; a < da; ++a) {
        diff = std::max(diff, std::abs(sol[r * da + a] - k[r][a]));
        k[r][a] = sol[r * da + a];
      }
    if (diff < 1e-15) break;
  }
  Vec out = y;
  out.push_back(t);
  for (std::size_t r = 0; r < n; ++r) axpy(tab.b[r], k[r], out);
  return Vec(out.begin(), out.end() - 1);
}

// Monolithic GARK-ROS step for component-partitioned problems: fast stages
// carry dF components, slow stages dS+1 (time augmented), and each row uses
// the Jacobian block of its (row, column) partition pair.
inline Vec monolithic_component_step(const AssembledTableau& tab,
                                     const ComponentProblem& ode, double t,
                                     const Vec& y, double H) {
  const std::size_t dF = ode.dim_fast, dS = ode.dim_slow, n = tab.stages();
  const Vec yF0(y.begin(), y.begin() + dF);
  Vec yS0(y.begin() + dF, y.end());
  yS0.push_back(t);

  const Mat jff = ode.jac_ff(t, yF0, Vec(y.begin() + dF, y.end()));
  const Mat jfs = ode.jac_fs(t, yF0, Vec(y.begin() + dF, y.end()));
  const Mat jsf = ode.jac_sf(t, yF0, Vec(y.begin() + dF, y.end()));
  const Mat jss = ode.jac_ss(t, yF0, Vec(y.begin() + dF, y.end()));
  Mat Lfs(dF, dS + 1), Lsf(dS + 1, dF), Lss(dS + 1, dS + 1);
  for (std::size_t i = 0; i < dF; ++i)
    for (std::size_t j = 0; j < dS; ++j) Lfs(i, j) = jfs(i, j);
  for (std::size_t i = 0; i < dS; ++i)
    for (std::size_t j = 0; j < dF; ++j) Lsf(i, j) = jsf(i, j);
  for (std::size_t i = 0; i < dS; ++i)
    for (std::size_t j = 0; j < dS; ++j) Lss(i, j) = jss(i, j);
  if (!ode.autonomous) {
    const Vec cf = ode.dfdt_fast(t, yF0, Vec(y.begin() + dF, y.end()));
    const Vec cs = ode.dfdt_slow(t, yF0, Vec(y.begin() + dF, y.end()));
    for (std::size_t i = 0; i < dF; ++i) Lfs(i, dS) = cf[i];
    for (std::size_t i = 0; i < dS; ++i) Lss(i, dS) = cs[i];
  }
  auto lblock = [&](Partition r, Partition c) -> const Mat& {
    if (r == Partition::Fast) return c == Partition::Fast ? jff : Lfs;
    return c == Partition::Fast ? Lsf : Lss;
  };

  std::vector<std::size_t> offs(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    offs[i + 1] =
        offs[i] + (tab.labels[i].part == Partition::Fast ? dF : dS + 1);
  const std::size_t N = offs[n];
  Vec k(N, 0.0);
  for (int it = 0; it < 300; ++it) {
    Mat sys(N, N);
    Vec rhs(N);
    for (std::size_t i = 0; i < N; ++i) sys(i, i) = 1.0;
    for (std::size_t r = 0; r < n; ++r) {
      Vec argF = yF0, argS = yS0;
      for (std::size_t j = 0; j < n; ++j) {
        if (tab.A(r, j) == 0.0) continue;
        Vec& dst = tab.labels[j].part == Partition::Fast ? argF : argS;
        for (std::size_t z = 0; z < offs[j + 1] - offs[j]; ++z)
          dst[z] += tab.A(r, j) * k[offs[j] + z];
      }
      const double tau = argS[dS];
      const Vec ySarg(argS.begin(), argS.begin() + dS);
      Vec f;
      if (tab.labels[r].part == Partition::Fast) {
        f = ode.f_fast(tau, argF, ySarg);
      } else {
        f = ode.f_slow(tau, argF, ySarg);
        f.push_back(1.0);
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (tab.G(r, j) == 0.0) continue;
        const Mat& L = lblock(tab.labels[r].part, tab.labels[j].part);
        for (std::size_t a = 0; a < L.rows(); ++a)
          for (std::size_t b2 = 0; b2 < L.cols(); ++b2)
            sys(offs[r] + a, offs[j] + b2) -= H * tab.G(r, j) * L(a, b2);
      }
      for (std::size_t a = 0; a < f.size(); ++a) rhs[offs[r] + a] = H * f[a];
    }
    const Vec sol = Lu<double>(std::move(sys)).solve(std::move(rhs));
    double diff = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      diff = std::max(diff, std::abs(sol[i] - k[i]));
      k[i] = sol[i];
    }
    if (diff < 1e-15) break;
  }
  Vec outF = yF0, outS = yS0;
  for (std::size_t r = 0; r < n; ++r) {
    Vec& dst = tab.labels[r].part == Partition::Fast ? outF : outS;
    for (std::size_t z = 0; z < offs[r + 1] - offs[r]; ++z)
      dst[z] += tab.b[r] * k[offs[r] + z];
  }
  Vec out = outF;
  out.insert(out.end(), outS.begin(), outS.end() - 1);
  return out;
}

// random linear component problem with dense blocks and exact jacobians
inline ProblemSpec random_linear_component(std::mt19937& rng, std::size_t dF,
                                           std::size_t dS) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat ff(dF, dF), fs(dF, dS), sf(dS, dF), ss(dS, dS);
  for (std::size_t i = 0; i < dF; ++i) {
    for (std::size_t j = 0; j < dF; ++j) ff(i, j) = u(rng);
    for (std::size_t j = 0; j < dS; ++j) fs(i, j) = 0.5 * u(rng);
    ff(i, i) -= 2.0;
  }
  for (std::size_t i = 0; i < dS; ++i) {
    for (std::size_t j = 0; j < dF; ++j) sf(i, j) = 0.5 * u(rng);
    for (std::size_t j = 0; j < dS; ++j) ss(i, j) = u(rng);
    ss(i, i) -= 1.0;
  }
  ComponentProblem ode;
  ode.dim_fast = dF;
  ode.dim_slow = dS;
  ode.f_fast = [ff, fs](double, const Vec& yF, const Vec& yS) {
    Vec f = matvec(ff, yF);
    const Vec g = matvec(fs, yS);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += g[i];
    return f;
  };
  ode.f_slow = [sf, ss](double, const Vec& yF, const Vec& yS) {
    Vec f = matvec(ss, yS);
    const Vec g = matvec(sf, yF);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += g[i];
    return f;
  };
  ode.jac_ff = [ff](double, const Vec&, const Vec&) { return ff; };
  ode.jac_fs = [fs](double, const Vec&, const Vec&) { return fs; };
  ode.jac_sf = [sf](double, const Vec&, const Vec&) { return sf; };
  ode.jac_ss = [ss](double, const Vec&, const Vec&) { return ss; };
  ProblemSpec p;
  p.name = "random-linear-component";
  p.ode = std::move(ode);
  p.y0.assign(dF + dS, 0.0);
  for (auto& v : p.y0) v = u(rng);
  p.t0 = 0.0;
  p.t_end = 1.0;
  for (std::size_t i = 0; i < dF; ++i) p.fast_indices.push_back(i);
  for (std::size_t i = 0; i < dS; ++i) p.slow_indices.push_back(dF + i);
  return p;
}

// the stacked system matrix of the linear component problem
inline Mat component_system_matrix(const ProblemSpec& p) {
  const auto& ode = std::get<ComponentProblem>(p.ode);
  const std::size_t dF = ode.dim_fast, dS = ode.dim_slow;
  const Vec zF(dF, 0.0), zS(dS, 0.0);
  Mat m(dF + dS, dF + dS);
  const Mat ff = ode.jac_ff(0, zF, zS), fs = ode.jac_fs(0, zF, zS);
  const Mat sf = ode.jac_sf(0, zF, zS), ss = ode.jac_ss(0, zF, zS);
  for (std::size_t i = 0; i < dF; ++i) {
    for (std::size_t j = 0; j < dF; ++j) m(i, j) = ff(i, j);
    for (std::size_t j = 0; j < dS; ++j) m(i, dF + j) = fs(i, j);
  }
  for (std::size_t i = 0; i < dS; ++i) {
    for (std::size_t j = 0; j < dF; ++j) m(dF + i, j) = sf(i, j);
    for (std::size_t j = 0; j < dS; ++j) m(dF + i, dF + j) = ss(i, j);
  }
  return m;
}

// matrix exponential by scaling and squaring with a Taylor kernel
inline Mat expm(Mat a) {
  int squarings = 0;
  while (a.max_abs() > 0.25) {
    a *= 0.5;
    ++squarings;
  }
  Mat result = Mat::identity(a.rows());
  Mat term = Mat::identity(a.rows());
  for (int k = 1; k <= 24; ++k) {
    term = term * a;
    term *= 1.0 / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

// dimension-valid random coefficients; not internally consistent on purpose
inline MultirateMethod random_multirate(std::mt19937& rng, std::size_t s,
                                        std::size_t M) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rmat = [&](std::size_t r, std::size_t c, bool strict, bool lower) {
    Mat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        if (lower && j > i) continue;
        if (strict && j >= i) continue;
        m(i, j) = u(rng);
      }
    return m;
  };
  auto rbase = [&](const char* nm) {
    Vec b(s);
    for (auto& x : b) x = u(rng);
    return BaseMethod::make(nm, rmat(s, s, true, true), rmat(s, s, false, true),
                            b);
  };
  MultirateMethod mrm;
  mrm.name = "random";
  mrm.slow = rbase("slow");
  mrm.fast = rbase("fast");
  mrm.flavor = Flavor::General;
  mrm.coupling.micro_steps = M;
  for (std::size_t l = 0; l < M; ++l) {
    mrm.coupling.alpha_fs.push_back(rmat(s, s, false, false));
    mrm.coupling.gamma_fs.push_back(rmat(s, s, false, false));
    mrm.coupling.alpha_sf.push_back(rmat(s, s, false, false));
    mrm.coupling.gamma_sf.push_back(rmat(s, s, false, false));
  }
  mrm.micro_fractions.assign(M, 1.0 / static_cast<double>(M));
  return mrm;
}

// random smooth additive problem with polynomial/trigonometric terms and
// exact hand-coded Jacobians
inline ProblemSpec random_smooth_additive(std::mt19937& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat As(d, d), Af(d, d);
  Vec cs(d), cf(d);
  for (std::size_t i = 0; i < d; ++i) {
    cs[i] = u(rng);
    cf[i] = u(rng);
    for (std::size_t j = 0; j < d; ++j) {
      As(i, j) = u(rng);
      Af(i, j) = u(rng);
    }
  }
  AdditiveProblem ode;
  ode.dim = d;
  ode.f_slow = [As, cs](double, const Vec& y) {
    Vec f = matvec(As, y);
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] += 0.1 * std::sin(y[i]) + cs[i];
    return f;
  };
  ode.f_fast = [Af, cf](double, const Vec& y) {
    Vec f = matvec(Af, y);
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] += 0.1 * std::cos(y[(i + 1) % f.size()]) + cf[i];
    return f;
  };
  ode.jac_slow = [As](double, const Vec& y) {
    Mat j = As;
    for (std::size_t i = 0; i < y.size(); ++i)
      j(i, i) += 0.1 * std::cos(y[i]);
    return j;
  };
  ode.jac_fast = [Af](double, const Vec& y) {
    Mat j = Af;
    for (std::size_t i = 0; i < y.size(); ++i)
      j(i, (i + 1) % y.size()) -= 0.1 * std::sin(y[(i + 1) % y.size()]);
    return j;
  };

  ProblemSpec p;
  p.name = "random-smooth";
  p.ode = std::move(ode);
  p.y0.assign(d, 0.0);
  for (auto& v : p.y0) v = 0.5 * u(rng);
  p.t0 = 0.0;
  p.t_end = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    p.fast_indices.push_back(i);
    p.slow_indices.push_back(i);
  }
  return p;
}

}  // namespace oracles

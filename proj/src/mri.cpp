#include "mrgark/mri.hpp"

#include <cmath>

#include "mrgark/methods.hpp"

namespace mrgark {

Vec MriCoupling::delta_c() const {
  Vec dc(slow.stages());
  double prev = 0.0;
  for (std::size_t i = 0; i < slow.stages(); ++i) {
    dc[i] = slow.c[i] - prev;
    prev = slow.c[i];
  }
  return dc;
}

void MriCoupling::validate() const {
  const std::size_t s = slow.stages();
  double prev = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    if (slow.c[i] < prev - 1e-14)
      throw Error("MriCoupling: slow abscissae must be non-decreasing");
    prev = slow.c[i];
  }
  for (const Mat& rk : r_coeff) {
    if (rk.rows() != s || rk.cols() != s)
      throw Error("MriCoupling: r coefficient dimensions");
    for (std::size_t l = 0; l < s; ++l)
      for (std::size_t j = l; j < s; ++j)
        if (rk(l, j) != 0.0)
          throw Error("MriCoupling: r polynomial of interval " +
                      std::to_string(l + 1) +
                      " may only use earlier slow stages");
  }
  if (q.rows() != s || q.cols() != s)
    throw Error("MriCoupling: q dimensions");
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j)
      if (q(i, j) != 0.0)
        throw Error("MriCoupling: q must be lower triangular");
}

namespace {

constexpr double kSqrtEps = 1.4901161193847656e-08;

// slow-stage polynomial value r_{lambda,j}(u) for all j.
Vec r_poly(const MriCoupling& cpl, std::size_t lambda0, double u) {
  const std::size_t s = cpl.stages();
  Vec r(s, 0.0);
  double uk = 1.0;
  for (const Mat& rk : cpl.r_coeff) {
    for (std::size_t j = 0; j < s; ++j) r[j] += rk(lambda0, j) * uk;
    uk *= u;
  }
  return r;
}

// Augmented additive right-hand sides and Jacobians; time is the trailing
// component with slope one on the slow part.
struct AugAdditive {
  const AdditiveProblem& ode;
  std::size_t d;

  Vec fast(const Vec& arg) const {
    Vec f = ode.f_fast(arg[d], Vec(arg.begin(), arg.begin() + d));
    f.push_back(0.0);
    return f;
  }
  Vec slow(const Vec& arg) const {
    Vec f = ode.f_slow(arg[d], Vec(arg.begin(), arg.begin() + d));
    f.push_back(1.0);
    return f;
  }
};

Mat augmented_jacobian(const std::function<Vec(double, const Vec&)>& f,
                       const std::function<Mat(double, const Vec&)>& jac,
                       const std::function<Vec(double, const Vec&)>& dfdt,
                       bool autonomous, bool use_fd, double t, const Vec& y) {
  const std::size_t d = y.size();
  Mat j(d + 1, d + 1);
  Mat inner;
  if (!use_fd && jac) {
    inner = jac(t, y);
  } else {
    inner = Mat(d, d);
    Vec yp = y, ym = y;
    for (std::size_t col = 0; col < d; ++col) {
      const double h = kSqrtEps * (1.0 + std::abs(y[col]));
      yp[col] += h;
      ym[col] -= h;
      const Vec fp = f(t, yp);
      const Vec fm = f(t, ym);
      for (std::size_t row = 0; row < d; ++row)
        inner(row, col) = (fp[row] - fm[row]) / (2.0 * h);
      yp[col] = y[col];
      ym[col] = y[col];
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t c = 0; c < d; ++c) j(i, c) = inner(i, c);
  if (!autonomous) {
    Vec col;
    if (!use_fd && dfdt) {
      col = dfdt(t, y);
    } else {
      const double h = kSqrtEps * (1.0 + std::abs(t));
      const Vec fp = f(t + h, y);
      const Vec fm = f(t - h, y);
      col.resize(d);
      for (std::size_t i = 0; i < d; ++i) col[i] = (fp[i] - fm[i]) / (2.0 * h);
    }
    for (std::size_t i = 0; i < d; ++i) j(i, d) = col[i];
  }
  return j;
}

// explicit RK integration of w' = F(theta, w) over [0, span] in n substeps
template <class Fn>
Vec erk_integrate(const BaseMethod& erk, std::size_t n, double span, Vec w,
                  Fn&& F) {
  const std::size_t s = erk.stages();
  const double h = span / static_cast<double>(n);
  std::vector<Vec> k(s);
  for (std::size_t m = 0; m < n; ++m) {
    const double theta0 = h * static_cast<double>(m);
    for (std::size_t i = 0; i < s; ++i) {
      Vec arg = w;
      for (std::size_t j = 0; j < i; ++j)
        if (erk.alpha(i, j) != 0.0) axpy(h * erk.alpha(i, j), k[j], arg);
      k[i] = F(theta0 + erk.c[i] * h, arg);
    }
    for (std::size_t i = 0; i < s; ++i) axpy(h * erk.b[i], k[i], w);
  }
  return w;
}

}  // namespace

StepResult mri_step(const MriCoupling& coupling, const ProblemSpec& prob,
                    const InnerRk& inner, double t, const Vec& y, double H,
                    const StepOptions& opt) {
  coupling.validate();
  if (prob.is_component())
    throw Error("mri_step: additive problems only");
  if (!inner.erk.explicit_method())
    throw Error("mri_step: inner method must be explicit");
  if (inner.substeps == 0) throw Error("mri_step: substeps must be positive");
  const auto& ode = std::get<AdditiveProblem>(prob.ode);
  const AugAdditive aug{ode, ode.dim};
  const std::size_t s = coupling.stages();
  const BaseMethod& slow = coupling.slow;
  const Vec dc = coupling.delta_c();

  const bool fd = opt.jacobian == JacobianMode::FiniteDifference;
  const Mat LS = augmented_jacobian(ode.f_slow, ode.jac_slow, ode.dfdt_slow,
                                    ode.autonomous, fd, t, y);

  Vec ytilde = y;
  ytilde.push_back(t);
  std::vector<Vec> ks(s), dytilde(s);
  std::optional<Lu<double>> slu;
  double slu_gamma = 0.0;

  for (std::size_t l = 0; l < s; ++l) {
    if (dc[l] < -1e-14)
      throw Error("mri_step: negative slow stage increment");
    Vec ynext = ytilde;
    if (dc[l] > 0.0) {
      ynext = erk_integrate(
          inner.erk, inner.substeps, H, ytilde, [&](double theta, Vec w) {
            const Vec r = r_poly(coupling, l, theta / H);
            for (std::size_t j = 0; j < l; ++j)
              if (r[j] != 0.0) axpy(r[j], ks[j], w);
            Vec f = aug.fast(w);
            for (auto& x : f) x *= dc[l];
            return f;
          });
    }
    dytilde[l] = vsub(ynext, ytilde);
    ytilde = ynext;

    Vec arg = ytilde;
    for (std::size_t j = 0; j < l; ++j)
      if (slow.alpha(l, j) != 0.0) axpy(slow.alpha(l, j), ks[j], arg);
    Vec rhs = aug.slow(arg);
    for (auto& x : rhs) x *= H;
    Vec gacc(ytilde.size(), 0.0);
    for (std::size_t ell = 0; ell <= l; ++ell)
      if (coupling.q(l, ell) != 0.0) axpy(coupling.q(l, ell), dytilde[ell], gacc);
    for (std::size_t j = 0; j < l; ++j)
      if (slow.gamma(l, j) != 0.0) axpy(slow.gamma(l, j), ks[j], gacc);
    {
      const Vec lg = matvec(LS, gacc);
      for (std::size_t z = 0; z < rhs.size(); ++z) rhs[z] += H * lg[z];
    }
    const double gd = slow.gamma(l, l);
    if (gd != 0.0) {
      if (!slu || slu_gamma != gd) {
        Mat m = Mat::identity(LS.rows());
        m -= LS * (H * gd);
        slu.emplace(std::move(m), "slow stage " + std::to_string(l + 1));
        slu_gamma = gd;
      }
      ks[l] = slu->solve(std::move(rhs));
    } else {
      ks[l] = std::move(rhs);
    }
  }

  StepResult res;
  res.stage_k = ks;
  Vec out = ytilde;
  for (std::size_t l = 0; l < s; ++l) axpy(slow.b[l], ks[l], out);
  res.y.assign(out.begin(), out.end() - 1);
  if (slow.b_hat) {
    Vec oe = ytilde;
    for (std::size_t l = 0; l < s; ++l) axpy((*slow.b_hat)[l], ks[l], oe);
    res.y_embedded = Vec(oe.begin(), oe.end() - 1);
  }
  return res;
}

MultirateMethod mri_as_imex(const MriCoupling& coupling,
                            const BaseMethod& inner_erk) {
  coupling.validate();
  if (!inner_erk.explicit_method())
    throw Error("mri_as_imex: inner method must be explicit");
  const std::size_t s = coupling.stages();
  const std::size_t sF = inner_erk.stages();
  const Vec dc = coupling.delta_c();
  if (std::abs(coupling.slow.c[s - 1] - 1.0) > 1e-12)
    throw Error("mri_as_imex: last slow abscissa must equal 1");

  MultirateMethod mrm;
  mrm.name = "mri-" + coupling.slow.name + "-" + inner_erk.name;
  mrm.slow = coupling.slow;
  mrm.fast = inner_erk;
  mrm.flavor = Flavor::Imex;
  mrm.coupling = CouplingSet::zero(s, sF, s);
  mrm.micro_fractions = dc;
  for (std::size_t l = 0; l < s; ++l) {
    for (std::size_t i = 0; i < sF; ++i) {
      const Vec r = r_poly(coupling, l, inner_erk.c[i]);
      for (std::size_t j = 0; j < s; ++j)
        mrm.coupling.alpha_fs[l](i, j) = r[j];
    }
    for (std::size_t i = l; i < s; ++i)
      for (std::size_t j = 0; j < sF; ++j) {
        mrm.coupling.alpha_sf[l](i, j) = inner_erk.b[j];
        mrm.coupling.gamma_sf[l](i, j) = coupling.q(i, l) * inner_erk.b[j];
      }
  }
  mrm.validate();
  return mrm;
}

ConditionReport check_mri_order3(const MriCoupling& coupling,
                                 ConditionMode mode, double tol) {
  coupling.validate();
  if (mode == ConditionMode::TimeLagged)
    throw Error("check_mri_order3: modes are ros and row");
  ConditionReport rep;
  rep.tolerance = tol;
  rep.requested_order = 3;

  const std::size_t s = coupling.stages();
  const BaseMethod& slow = coupling.slow;
  const Vec dc = coupling.delta_c();

  auto push = [&](std::string id, int order, double value, double target,
                  bool info = false) {
    ConditionEntry en;
    en.id = std::move(id);
    en.order = order;
    en.target = target;
    en.value = value;
    en.residual = value - target;
    en.informational = info;
    rep.entries.push_back(std::move(en));
  };

  // internal consistency of the polynomial row sums and the q feedback
  for (std::size_t k = 0; k < coupling.r_coeff.size(); ++k) {
    double resid = 0.0;
    for (std::size_t l = 0; l < s; ++l) {
      double rs = 0.0;
      for (std::size_t j = 0; j < s; ++j) rs += coupling.r_coeff[k](l, j);
      double want = 0.0;
      if (k == 0) want = l == 0 ? 0.0 : slow.c[l - 1];
      if (k == 1) want = dc[l];
      resid = std::max(resid, std::abs(rs - want));
    }
    push("mri.ic.r[" + std::to_string(k) + "]", 1, resid, 0.0, true);
  }
  {
    double resid = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      double sum = 0.0;
      for (std::size_t l = 0; l <= i; ++l) sum += dc[l] * coupling.q(i, l);
      resid = std::max(resid, std::abs(sum - slow.g[i]));
    }
    push("mri.ic.q", 1, resid, 0.0, true);
  }
  rep.preconditions_ok = rep.max_residual(1) <= tol;

  // q-feedback condition shared by both modes
  {
    double v = 0.0;
    double cprev = 0.0;
    for (std::size_t l = 0; l < s; ++l) {
      const double w = slow.c[l] * slow.c[l] - cprev * cprev;
      cprev = slow.c[l];
      double bq = 0.0;
      for (std::size_t i = l; i < s; ++i) bq += slow.b[i] * coupling.q(i, l);
      v += w * bq;
    }
    push("mri3.q", 3, v, 0.0);
  }

  auto rbar_dot = [&](const Vec& target_vec) {
    double v = 0.0;
    for (std::size_t l = 0; l < s; ++l) {
      double acc = 0.0;
      for (std::size_t k = 0; k < coupling.r_coeff.size(); ++k) {
        double rk = 0.0;
        for (std::size_t j = 0; j < s; ++j)
          rk += coupling.r_coeff[k](l, j) * target_vec[j];
        acc += rk / static_cast<double>(k + 1);
      }
      v += dc[l] * acc;
    }
    return v;
  };

  if (mode == ConditionMode::Ros) {
    push("mri3.re", 3, rbar_dot(slow.e), 1.0 / 6.0);
  } else {
    push("mri3.rc", 3, rbar_dot(slow.c), 1.0 / 6.0);
    push("mri3.rg", 3, rbar_dot(slow.g), 0.0);
  }
  rep.finalize();
  return rep;
}

MriCoupling mri_ros3_coupling(double mu, double delta) {
  MriCoupling cpl;
  cpl.slow = kutta3_explicit_first(mu, delta);
  const Vec dc{0.0, 0.5, 0.5};
  const double e2 = cpl.slow.e[1];
  const double w = 1.0 - 4.0 / (9.0 * e2);

  Mat r0(3, 3), r1(3, 3);
  r1(1, 0) = dc[1];
  r0(2, 0) = cpl.slow.c[1] * w;
  r0(2, 1) = cpl.slow.c[1] * (1.0 - w);
  r1(2, 0) = dc[2] * w;
  r1(2, 1) = dc[2] * (1.0 - w);
  cpl.r_coeff = {r0, r1};

  cpl.q = Mat(3, 3);
  cpl.q(1, 1) = 2.0 * delta;
  cpl.q(2, 1) = -8.0 * delta;
  cpl.validate();
  return cpl;
}

BaseMethod compose_substeps(const BaseMethod& erk, std::size_t n) {
  if (!erk.explicit_method())
    throw Error("compose_substeps: explicit methods only");
  if (n == 0) throw Error("compose_substeps: n must be positive");
  const std::size_t s = erk.stages();
  const double inv = 1.0 / static_cast<double>(n);
  Mat a(n * s, n * s), g(n * s, n * s);
  Vec b(n * s);
  for (std::size_t blk = 0; blk < n; ++blk) {
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t pre = 0; pre < blk; ++pre)
        for (std::size_t j = 0; j < s; ++j)
          a(blk * s + i, pre * s + j) = inv * erk.b[j];
      for (std::size_t j = 0; j < i; ++j)
        a(blk * s + i, blk * s + j) = inv * erk.alpha(i, j);
      b[blk * s + i] = inv * erk.b[i];
    }
  }
  return BaseMethod::make(erk.name + "^" + std::to_string(n), std::move(a),
                          std::move(g), std::move(b));
}

namespace {

Vec mu_poly(const std::vector<Vec>& mu, std::size_t s, double u) {
  Vec r(s, 0.0);
  double uk = 1.0;
  for (const Vec& mk : mu) {
    for (std::size_t j = 0; j < s; ++j) r[j] += mk[j] * uk;
    uk *= u;
  }
  return r;
}

// predictor of the step-predictor-corrector path: slow stage increments of
// the compound step (augmented).
std::vector<Vec> spc_predictor_slow_stages(const BaseMethod& base,
                                           const ProblemSpec& prob, double t,
                                           const Vec& y, double H,
                                           const StepOptions& opt) {
  SpcCoupling sc;
  sc.v1 = base.b;
  MultirateMethod helper = spc_telescopic(base, 1, sc);
  Stepper stepper(helper);
  const StepResult r = stepper.step(prob, t, y, H, opt);
  const std::size_t s = base.stages();
  std::vector<Vec> ks(s);
  for (std::size_t i = 0; i < s; ++i) ks[i] = r.stage_k[2 * s + i];
  return ks;
}

}  // namespace

StepResult spc_mri_step(const SpcMriCoupling& coupling,
                        const ProblemSpec& prob, const InnerRk& inner,
                        double t, const Vec& y, double H,
                        const StepOptions& opt) {
  if (!inner.erk.explicit_method())
    throw Error("spc_mri_step: inner method must be explicit");
  const std::size_t s = coupling.slow.stages();
  for (const Vec& mk : coupling.mu)
    if (mk.size() != s) throw Error("spc_mri_step: mu dimension mismatch");
  const std::vector<Vec> ks =
      spc_predictor_slow_stages(coupling.slow, prob, t, y, H, opt);

  const bool has_nu = !coupling.nu.empty();
  StepResult res;
  res.stage_k = ks;

  if (!prob.is_component()) {
    const auto& ode = std::get<AdditiveProblem>(prob.ode);
    const AugAdditive aug{ode, ode.dim};
    Mat LF;
    if (has_nu)
      LF = augmented_jacobian(ode.f_fast, ode.jac_fast, ode.dfdt_fast,
                              ode.autonomous,
                              opt.jacobian == JacobianMode::FiniteDifference,
                              t, y);
    Vec v = y;
    v.push_back(t);
    v = erk_integrate(inner.erk, inner.substeps, H, std::move(v),
                      [&](double theta, Vec w) {
                        const Vec m = mu_poly(coupling.mu, s, theta / H);
                        for (std::size_t j = 0; j < s; ++j)
                          if (m[j] != 0.0) axpy(m[j], ks[j], w);
                        Vec f = aug.fast(w);
                        if (has_nu) {
                          const Vec nv = mu_poly(coupling.nu, s, theta / H);
                          Vec acc(w.size(), 0.0);
                          for (std::size_t j = 0; j < s; ++j)
                            if (nv[j] != 0.0) axpy(nv[j], ks[j], acc);
                          const Vec lg = matvec(LF, acc);
                          for (std::size_t z = 0; z < f.size(); ++z)
                            f[z] += lg[z];
                        }
                        return f;
                      });
    Vec out = v, oe = v;
    for (std::size_t j = 0; j < s; ++j) axpy(coupling.slow.b[j], ks[j], out);
    res.y.assign(out.begin(), out.end() - 1);
    if (coupling.slow.b_hat) {
      for (std::size_t j = 0; j < s; ++j)
        axpy((*coupling.slow.b_hat)[j], ks[j], oe);
      res.y_embedded = Vec(oe.begin(), oe.end() - 1);
    }
    return res;
  }

  if (has_nu)
    throw Error("spc_mri_step: Jacobian-coupled nu terms are only available "
                "for additive problems");
  const auto& ode = std::get<ComponentProblem>(prob.ode);
  const std::size_t dF = ode.dim_fast, dS = ode.dim_slow;
  const Vec yS0(y.begin() + dF, y.end());
  Vec v(y.begin(), y.begin() + dF);
  v = erk_integrate(inner.erk, inner.substeps, H, std::move(v),
                    [&](double theta, Vec w) {
                      const Vec m = mu_poly(coupling.mu, s, theta / H);
                      Vec argS = yS0;
                      argS.push_back(t);
                      for (std::size_t j = 0; j < s; ++j)
                        if (m[j] != 0.0) axpy(m[j], ks[j], argS);
                      const double tau = argS[dS];
                      return ode.f_fast(tau, w,
                                        Vec(argS.begin(), argS.begin() + dS));
                    });
  res.y = v;
  Vec outS = yS0, oeS = yS0;
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t z = 0; z < dS; ++z)
      outS[z] += coupling.slow.b[j] * ks[j][z];
  res.y.insert(res.y.end(), outS.begin(), outS.end());
  if (coupling.slow.b_hat) {
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t z = 0; z < dS; ++z)
        oeS[z] += (*coupling.slow.b_hat)[j] * ks[j][z];
    Vec ye = v;
    ye.insert(ye.end(), oeS.begin(), oeS.end());
    res.y_embedded = std::move(ye);
  }
  return res;
}

MultirateMethod spc_mri_as_discrete(const SpcMriCoupling& coupling,
                                    const BaseMethod& inner_erk) {
  if (!inner_erk.explicit_method())
    throw Error("spc_mri_as_discrete: inner method must be explicit");
  const std::size_t s = coupling.slow.stages();
  const std::size_t sF = inner_erk.stages();
  MultirateMethod mrm;
  mrm.name = "spcmri-" + coupling.slow.name + "-" + inner_erk.name;
  mrm.slow = coupling.slow;
  mrm.fast = inner_erk;
  mrm.flavor = Flavor::Spc;
  mrm.coupling = CouplingSet::zero(1, sF, s);
  mrm.micro_fractions = {1.0};
  for (std::size_t i = 0; i < sF; ++i) {
    const Vec m = mu_poly(coupling.mu, s, inner_erk.c[i]);
    for (std::size_t j = 0; j < s; ++j) mrm.coupling.alpha_fs[0](i, j) = m[j];
    if (!coupling.nu.empty()) {
      const Vec nv = mu_poly(coupling.nu, s, inner_erk.c[i]);
      for (std::size_t j = 0; j < s; ++j)
        mrm.coupling.gamma_fs[0](i, j) = nv[j];
    }
  }
  mrm.validate();
  return mrm;
}

ConditionReport check_spc_mri(const SpcMriCoupling& coupling, int order,
                              ConditionMode mode, double tol) {
  if (order < 3 || order > 4)
    throw Error("check_spc_mri: order must be 3 or 4");
  ConditionReport rep;
  rep.tolerance = tol;
  rep.requested_order = order;
  const std::size_t s = coupling.slow.stages();
  const BaseMethod& slow = coupling.slow;

  auto push = [&](std::string id, int ord, double value, double target,
                  bool info = false) {
    ConditionEntry en;
    en.id = std::move(id);
    en.order = ord;
    en.target = target;
    en.value = value;
    en.residual = value - target;
    en.informational = info;
    rep.entries.push_back(std::move(en));
  };

  auto mu_dot = [&](std::size_t k, const Vec& v) {
    return k < coupling.mu.size() ? dot(coupling.mu[k], v) : 0.0;
  };
  auto mubar_dot = [&](const Vec& v) {
    double acc = 0.0;
    for (std::size_t k = 0; k < coupling.mu.size(); ++k)
      acc += mu_dot(k, v) / static_cast<double>(k + 1);
    return acc;
  };

  const Vec one = ones(s);
  for (std::size_t k = 0; k < coupling.mu.size(); ++k)
    push("spcmri.ic.mu[" + std::to_string(k) + "]", 1, mu_dot(k, one),
         k == 1 ? 1.0 : 0.0, true);
  rep.preconditions_ok = rep.max_residual(1) <= tol;

  if (mode == ConditionMode::Row) {
    push("spcmri3.row.c", 3, mubar_dot(slow.c), 1.0 / 6.0);
    push("spcmri3.row.g", 3, mubar_dot(slow.g), 0.0);
  } else {
    push("spcmri3.ros", 3, mubar_dot(slow.e), 1.0 / 6.0);
  }
  if (order >= 4 && mode == ConditionMode::Ros) {
    double a = 0.0, c4 = 0.0;
    for (std::size_t k = 0; k < coupling.mu.size(); ++k) {
      a += mu_dot(k, slow.e) / static_cast<double>(k + 2);
      c4 += mu_dot(k, slow.e) / static_cast<double>((k + 1) * (k + 2));
    }
    push("spcmri4.a", 4, a, 1.0 / 8.0);
    push("spcmri4.b", 4, mubar_dot(elemwise(slow.c, slow.c)), 1.0 / 12.0);
    push("spcmri4.c", 4, c4, 1.0 / 24.0);
    push("spcmri4.d", 4, mubar_dot(matvec(slow.beta, slow.e)), 1.0 / 24.0);
  }
  rep.finalize();
  return rep;
}

SpcMriCoupling ros34pw2_spc_mri(double theta) {
  SpcMriCoupling cpl;
  cpl.slow = ros34pw2();
  Vec mu1{theta, -4.307016638790922 + 8.289196835086212 * theta,
          4.541816529634874 - 7.686572272599903 * theta,
          0.7652001091560487 - 1.602624562486310 * theta};
  cpl.mu = {Vec(4, 0.0), std::move(mu1)};
  return cpl;
}

SpcMriCoupling rodas_spc_mri(double theta1, double theta2, double theta3,
                             double theta4, const BaseMethod& rodas_base) {
  if (rodas_base.stages() != 6)
    throw Error("rodas_spc_mri: base must have six stages");
  SpcMriCoupling cpl;
  cpl.slow = rodas_base;
  Vec mu0{theta1,
          theta2,
          -1.923968128204745 * theta1 + 2.446324727549974e-01 * theta2 +
              4.509689603795104e-02,
          1.405229246707428 * theta1 - 2.181782847233643 * theta2 +
              1.289372580090594e-01,
          -4.812611185026834e-01 * theta1 + 9.371503744786454e-01 * theta2 -
              1.740341540470105e-01 - theta3,
          theta3};
  Vec mu1{-2.0 * theta1 + 4.061438468864431e-01,
          -2.0 * theta2 + 5.932358823451654e-01,
          3.847936256409489 * theta1 - 4.892649455099948e-01 * theta2 -
              3.657016798231872e-01,
          -2.810458493414855 * theta1 + 4.363565694467286 * theta2 +
              5.003688760525202e-02,
          9.625222370053667e-01 * theta1 - 1.874300748957291 * theta2 +
              3.162850629863266e-01 - theta4,
          theta4};
  cpl.mu = {std::move(mu0), std::move(mu1)};
  return cpl;
}

}  // namespace mrgark

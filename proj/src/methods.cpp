#include "mrgark/methods.hpp"

#include <cmath>

#include "mrgark/conditions.hpp"
#include "mrgark/mri.hpp"
#include "mrgark/tableau_io.hpp"

namespace mrgark {

namespace {

Mat row_shift_matrix(double ahat, std::size_t s) {
  // every row [ahat, 1-ahat, 0, ...]
  Mat f(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    f(i, 0) = ahat;
    f(i, 1) = 1.0 - ahat;
  }
  return f;
}

Mat bhat_correction(double beta_hat, std::size_t s) {
  Mat m(s, s);
  m(s - 1, 0) = -beta_hat;
  m(s - 1, 1) = beta_hat;
  return m;
}

MultirateMethod order23_family(double gamma, double beta21, std::size_t M,
                               bool explicit_tail) {
  if (beta21 == 0.0) throw Error("order-(2)3 family: beta21 must be nonzero");
  if (gamma == 0.0) throw Error("order-(2)3 family: gamma must be nonzero");
  if (M == 0) throw Error("order-(2)3 family: M must be positive");
  const BaseMethod base = kutta3_ros(gamma, beta21);
  const std::size_t s = base.stages();
  const double Md = static_cast<double>(M);

  const double beta_hat = (Md - 1.0) / beta21;
  const Mat bh = bhat_correction(beta_hat, s);
  const double ahat =
      explicit_tail
          ? (3.0 * (Md + 1.0) * (beta21 + gamma) - beta21 - Md) /
                (3.0 * Md * beta21)
          : (beta21 + gamma) / beta21;
  const Mat shift = row_shift_matrix(ahat, s);

  MultirateMethod mrm;
  mrm.name = explicit_tail ? "imex23" : "imim23";
  mrm.slow = base;
  mrm.fast = base;
  if (explicit_tail && M > 1)
    mrm.fast_tail = BaseMethod::make("kutta3-erk", base.alpha, Mat(s, s),
                                     base.b, base.b_hat);
  mrm.flavor = Flavor::CompoundFirstStep;
  mrm.coupling = CouplingSet::zero(M, s, s);
  mrm.micro_fractions.assign(M, 1.0 / Md);

  const Mat gamma_hat = base.gamma + bh;  // gamma + bhat correction
  for (std::size_t l = 0; l < M; ++l) {
    const Mat F = shift * static_cast<double>(l);
    mrm.coupling.alpha_fs[l] = (base.alpha + F) * (1.0 / Md);
    if (explicit_tail && l > 0)
      mrm.coupling.gamma_fs[l] = Mat(s, s);  // fully explicit micro-step
    else
      mrm.coupling.gamma_fs[l] = gamma_hat * (1.0 / Md);
  }
  mrm.coupling.alpha_sf[0] = base.alpha * Md;
  mrm.coupling.gamma_sf[0] = gamma_hat * Md;
  mrm.validate();
  return mrm;
}

}  // namespace

MultirateMethod imim_order23(double gamma, double beta21, std::size_t M) {
  return order23_family(gamma, beta21, M, false);
}

MultirateMethod imex_order23(double gamma, double beta21, std::size_t M) {
  return order23_family(gamma, beta21, M, true);
}

std::vector<Mat> rank_one_shift(const Vec& v, std::size_t stages,
                                std::size_t M) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error("rank_one_shift: weights must sum to 1");
  std::vector<Mat> F(M, Mat(stages, v.size()));
  for (std::size_t l = 0; l < M; ++l)
    for (std::size_t i = 0; i < stages; ++i)
      for (std::size_t j = 0; j < v.size(); ++j)
        F[l](i, j) = static_cast<double>(l) * v[j];
  return F;
}

MultirateMethod compound_first_step(const BaseMethod& base, std::size_t M,
                                    const CfsExtras& extras) {
  const std::size_t s = base.stages();
  const double Md = static_cast<double>(M);
  std::vector<Mat> F = extras.F;
  if (F.empty()) F.assign(M, Mat(s, s));
  if (F.size() != M)
    throw Error("compound_first_step: need one F matrix per micro-step");
  for (std::size_t l = 0; l < M; ++l) {
    const Vec rs = matvec(F[l], ones(s));
    for (double r : rs)
      if (std::abs(r - static_cast<double>(l)) > 1e-12)
        throw Error("compound_first_step: F(" + std::to_string(l + 1) +
                    ") row sums must equal " + std::to_string(l));
  }
  auto check_tilde = [&](const Mat& m, const char* what) {
    const Vec rs = matvec(m, ones(s));
    for (double r : rs)
      if (std::abs(r) > 1e-12)
        throw Error(std::string("compound_first_step: ") + what +
                    " must have zero row sums");
  };

  MultirateMethod mrm;
  mrm.name = "cfs-" + base.name;
  mrm.slow = base;
  mrm.fast = base;
  mrm.flavor = Flavor::CompoundFirstStep;
  mrm.coupling = CouplingSet::zero(M, s, s);
  mrm.micro_fractions.assign(M, 1.0 / Md);

  for (std::size_t l = 0; l < M; ++l) {
    Mat afs = base.alpha + F[l];
    Mat gfs = base.gamma;
    if (!extras.alpha_fs_tilde.empty()) {
      check_tilde(extras.alpha_fs_tilde[l], "alphaFS tilde");
      afs += extras.alpha_fs_tilde[l];
    }
    if (!extras.gamma_fs_tilde.empty()) {
      check_tilde(extras.gamma_fs_tilde[l], "gammaFS tilde");
      gfs += extras.gamma_fs_tilde[l];
    }
    mrm.coupling.alpha_fs[l] = afs * (1.0 / Md);
    mrm.coupling.gamma_fs[l] = gfs * (1.0 / Md);
  }
  Mat asf = base.alpha;
  Mat gsf = base.gamma;
  if (extras.alpha_sf_tilde) {
    check_tilde(*extras.alpha_sf_tilde, "alphaSF tilde");
    asf += *extras.alpha_sf_tilde;
  }
  if (extras.gamma_sf_tilde) {
    check_tilde(*extras.gamma_sf_tilde, "gammaSF tilde");
    gsf += *extras.gamma_sf_tilde;
  }
  mrm.coupling.alpha_sf[0] = asf * Md;
  mrm.coupling.gamma_sf[0] = gsf * Md;

  const ConditionReport ic = check_internal_consistency(mrm, 1e-10);
  if (!ic.preconditions_ok)
    throw Error("compound_first_step: extras violate internal consistency");
  mrm.validate();
  return mrm;
}

Vec spc_rank_one_weights(const BaseMethod& base) {
  return scaled(vecmat(base.b, base.beta), 2.0);
}

MultirateMethod spc_telescopic(const BaseMethod& base, std::size_t M,
                               const SpcCoupling& coupling) {
  const std::size_t s = base.stages();
  const double Md = static_cast<double>(M);
  std::vector<Mat> F;
  if (coupling.v1) {
    F = rank_one_shift(*coupling.v1, s, M);
  } else if (coupling.D1 && coupling.D2) {
    const Vec d1 = matvec(*coupling.D1, ones(s));
    const Vec d2 = matvec(*coupling.D2, ones(s));
    for (std::size_t i = 0; i < s; ++i) {
      if (std::abs(d1[i] - 1.0) > 1e-12)
        throw Error("spc_telescopic: D1 row sums must equal 1");
      if (std::abs(d2[i]) > 1e-12)
        throw Error("spc_telescopic: D2 row sums must vanish");
    }
    F.assign(M, Mat(s, s));
    for (std::size_t l = 0; l < M; ++l) {
      const double w = static_cast<double>(l);
      F[l] = *coupling.D1 * w + *coupling.D2 * (w * w);
    }
  } else {
    throw Error("spc_telescopic: specify either v1 or the D1/D2 pair");
  }

  MultirateMethod mrm;
  mrm.name = "spc-" + base.name;
  mrm.slow = base;
  mrm.fast = base;
  mrm.flavor = Flavor::Spc;
  mrm.coupling = CouplingSet::zero(M, s, s);
  mrm.micro_fractions.assign(M, 1.0 / Md);
  for (std::size_t l = 0; l < M; ++l) {
    mrm.coupling.alpha_fs[l] = (base.alpha + F[l]) * (1.0 / Md);
    mrm.coupling.gamma_fs[l] = base.gamma * (1.0 / Md);
  }
  mrm.validate();
  return mrm;
}

SpcCoupling spc_polynomial_solve(const BaseMethod& base) {
  if (check_base_ros(base, 4, ConditionMode::Ros).achieved_order < 4)
    throw Error("spc_polynomial_solve: base method must have order 4");
  const std::size_t s = base.stages();
  const Vec& b = base.b;
  const Vec& c = base.c;
  const Vec& e = base.e;
  const Vec cc = elemwise(c, c);
  const Vec be = matvec(base.beta, e);

  // D_i = 1 x_i^T + c y_i^T + e z_i^T. The shifted coupling conditions fix
  // the e-moments of (x, y, z) through a 3x3 system; the M-independence of
  // the two conditions acting on c^2 and beta e additionally pins the
  // moments of each dyad row against those vectors (for bases whose alpha
  // carries the matching quadrature weights these are satisfied anyway).
  Mat A(3, 3);
  A(0, 0) = 1.0;
  A(0, 1) = dot(b, c);
  A(0, 2) = dot(b, e);
  A(1, 0) = dot(b, c);
  A(1, 1) = dot(b, elemwise(c, c));
  A(1, 2) = dot(b, elemwise(e, c));
  A(2, 0) = dot(b, e);
  A(2, 1) = dot(b, matvec(base.beta, c));
  A(2, 2) = dot(b, matvec(base.beta, e));
  const Lu<double> lu(A, "spc polynomial coupling");

  const double bae = dot(b, matvec(base.alpha, e));
  const Vec m1 = lu.solve(Vec{1.0 / 3.0, 3.0 / 8.0 - bae, 1.0 / 8.0});
  const Vec m2 = lu.solve(Vec{0.0, 1.0 / 24.0, -1.0 / 24.0});

  // Realize row vectors with prescribed moments against {1, e, c^2, beta e}.
  const std::vector<const Vec*> basis{nullptr, &e, &cc, &be};
  Mat gram(4, 4);
  const Vec one = ones(s);
  auto bvec = [&](std::size_t k) -> const Vec& {
    return k == 0 ? one : *basis[k];
  };
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) gram(i, j) = dot(bvec(i), bvec(j));
  const Lu<double> glu(gram, "spc polynomial moment basis");
  auto realize = [&](double w1, double we, double wcc, double wbe) {
    const Vec coef = glu.solve(Vec{w1, we, wcc, wbe});
    Vec v(s, 0.0);
    for (std::size_t k = 0; k < 4; ++k) axpy(coef[k], bvec(k), v);
    return v;
  };

  auto build = [&](double one_sum, const Vec& m, double xcc, double xbe) {
    const Vec x = realize(one_sum, m[0], xcc, xbe);
    const Vec y = realize(0.0, m[1], 0.0, 0.0);
    const Vec z = realize(0.0, m[2], 0.0, 0.0);
    Mat d(s, s);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j)
        d(i, j) = x[j] + c[i] * y[j] + e[i] * z[j];
    return d;
  };

  SpcCoupling out;
  out.D1 = build(1.0, m1, 1.0 / 6.0, 1.0 / 12.0);
  out.D2 = build(0.0, m2, 0.0, 0.0);
  return out;
}

MultirateMethod first_stage_only_coupling(const BaseMethod& base,
                                          std::size_t M, double theta,
                                          double phi) {
  if (base.stages() != 2)
    throw Error("first_stage_only_coupling: needs a two-stage base");
  const double Md = static_cast<double>(M);
  const double c2 = base.c[1];
  const double g1 = base.g[0];
  const double g2 = base.g[1];

  MultirateMethod mrm;
  mrm.name = "fso-" + base.name;
  mrm.slow = base;
  mrm.fast = base;
  mrm.flavor = Flavor::CompoundFirstStep;
  mrm.coupling = CouplingSet::zero(M, 2, 2);
  mrm.micro_fractions.assign(M, 1.0 / Md);
  for (std::size_t l = 0; l < M; ++l) {
    Mat& afs = mrm.coupling.alpha_fs[l];
    Mat& gfs = mrm.coupling.gamma_fs[l];
    const double ld = static_cast<double>(l);
    gfs(0, 0) = g1 / Md;
    if (l == 0) {
      afs(1, 0) = c2 / Md;
      gfs(1, 0) = g2 / Md;
    } else {
      afs(0, 0) = ld / Md;
      afs(1, 1) = theta;
      afs(1, 0) = (ld + c2) / Md - theta;
      gfs(1, 1) = phi;
      gfs(1, 0) = g2 / Md - phi;
    }
  }
  mrm.coupling.alpha_sf[0](1, 0) = Md * c2;
  mrm.coupling.gamma_sf[0](0, 0) = Md * g1;
  mrm.coupling.gamma_sf[0](1, 0) = Md * g2;
  mrm.validate();

  const Mat S = structure_matrix(mrm);
  for (std::size_t r = 0; r < S.rows(); ++r)
    for (std::size_t col = 0; col < S.cols(); ++col)
      if (S(r, col) != 0.0 && !(r == 0 && col == 0))
        throw Error("first_stage_only_coupling: sparsity pattern violated");
  return mrm;
}

MultirateMethod single_rate_compound(const BaseMethod& base) {
  MultirateMethod mrm;
  mrm.name = "single-" + base.name;
  mrm.slow = base;
  mrm.fast = base;
  mrm.flavor = Flavor::CompoundFirstStep;
  mrm.coupling.micro_steps = 1;
  mrm.coupling.alpha_fs = {base.alpha};
  mrm.coupling.gamma_fs = {base.gamma};
  mrm.coupling.alpha_sf = {base.alpha};
  mrm.coupling.gamma_sf = {base.gamma};
  mrm.micro_fractions = {1.0};
  mrm.validate();
  return mrm;
}

BaseMethod base_by_name(const std::string& name, const MethodParams& p) {
  if (name == "kutta3") return kutta3_ros(p.gamma, p.beta21);
  if (name == "kutta3-xf") return kutta3_explicit_first(p.mu);
  if (name == "ros34pw2") return ros34pw2();
  if (name == "ros2") return ros2();
  if (name == "ros2-xf") return ros2_explicit_first();
  if (name == "rodas4") {
    const std::string path =
        p.base_file.empty() ? "data/rodas4.tableau" : p.base_file;
    BaseMethod b = load_base_tableau_file(path);
    b.name = "rodas4";
    return b;
  }
  throw Error("unknown base method '" + name + "'");
}

const std::vector<MethodInfo>& method_registry() {
  static const std::vector<MethodInfo> registry = {
      {"imim23",
       "embedded order (2)3, implicit compound first step, implicit fast "
       "micro-steps (gamma, beta21, M)",
       [](const MethodParams& p) {
         return imim_order23(p.gamma, p.beta21, p.M);
       }},
      {"imex23",
       "embedded order (2)3, implicit compound first step, explicit fast "
       "micro-steps (gamma, beta21, M)",
       [](const MethodParams& p) {
         return imex_order23(p.gamma, p.beta21, p.M);
       }},
      {"cfs",
       "telescopic compound-first-step coupling on --base, rank-one shift "
       "(second-order coupling)",
       [](const MethodParams& p) {
         const BaseMethod base = base_by_name(p.base, p);
         CfsExtras ex;
         ex.F = rank_one_shift(spc_rank_one_weights(base), base.stages(), p.M);
         return compound_first_step(base, p.M, ex);
       }},
      {"cfs-sa",
       "stiffly accurate compound-first-step coupling (rank-one shift with "
       "the weight vector) on --base",
       [](const MethodParams& p) {
         const BaseMethod base = base_by_name(p.base, p);
         CfsExtras ex;
         ex.F = rank_one_shift(base.b, base.stages(), p.M);
         MultirateMethod m = compound_first_step(base, p.M, ex);
         m.name = "cfs-sa-" + base.name;
         return m;
       }},
      {"fso",
       "two-stage coupling joining only the first fast and first slow stage",
       [](const MethodParams& p) {
         return first_stage_only_coupling(base_by_name(
             p.base == "ros34pw2" ? "ros2" : p.base, p), p.M);
       }},
      {"spc-r1",
       "telescopic step-predictor-corrector, rank-one coupling v1 = 2 b^T "
       "beta on --base",
       [](const MethodParams& p) {
         const BaseMethod base = base_by_name(p.base, p);
         SpcCoupling sc;
         sc.v1 = spc_rank_one_weights(base);
         return spc_telescopic(base, p.M, sc);
       }},
      {"spc-poly",
       "telescopic step-predictor-corrector, quadratic matrix-polynomial "
       "coupling solved for order 4 (needs an order-4 --base, e.g. rodas4)",
       [](const MethodParams& p) {
         const BaseMethod base = base_by_name(
             p.base == "ros34pw2" ? "rodas4" : p.base, p);
         return spc_telescopic(base, p.M, spc_polynomial_solve(base));
       }},
      {"mri3",
       "order-3 infinitesimal-step coupling rewritten as a multirate method "
       "with an explicit Runge-Kutta fast base",
       [](const MethodParams& p) {
         return mri_as_imex(mri_ros3_coupling(p.mu, 0.0), kutta3_erk());
       }},
  };
  return registry;
}

MultirateMethod make_method(const std::string& name, const MethodParams& p) {
  for (const auto& info : method_registry())
    if (info.name == name) return info.build(p);
  throw Error("unknown method '" + name + "'");
}

}  // namespace mrgark

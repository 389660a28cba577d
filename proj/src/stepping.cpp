#include "mrgark/stepping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrgark/methods.hpp"

namespace mrgark {

std::string to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Decoupled: return "decoupled";
    case ScheduleKind::CompoundPairs: return "compound_pairs";
    case ScheduleKind::Monolithic: return "monolithic";
    case ScheduleKind::Spc: return "spc";
  }
  return "decoupled";
}

namespace {

constexpr double kSqrtEps = 1.4901161193847656e-08;

Mat fd_jacobian(const std::function<Vec(double, const Vec&)>& f, double t,
                const Vec& y) {
  const std::size_t d = y.size();
  Mat j(d, d);
  Vec yp = y, ym = y;
  for (std::size_t col = 0; col < d; ++col) {
    const double h = kSqrtEps * (1.0 + std::abs(y[col]));
    yp[col] = y[col] + h;
    ym[col] = y[col] - h;
    const Vec fp = f(t, yp);
    const Vec fm = f(t, ym);
    for (std::size_t row = 0; row < d; ++row)
      j(row, col) = (fp[row] - fm[row]) / (2.0 * h);
    yp[col] = y[col];
    ym[col] = y[col];
  }
  return j;
}

Vec fd_dfdt(const std::function<Vec(double, const Vec&)>& f, double t,
            const Vec& y) {
  const double h = kSqrtEps * (1.0 + std::abs(t));
  const Vec fp = f(t + h, y);
  const Vec fm = f(t - h, y);
  Vec r(y.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (fp[i] - fm[i]) / (2.0 * h);
  return r;
}

// Augmented Jacobian blocks; time is an extra slow component of unit slope.
struct Linearization {
  bool component = false;
  Mat add_fast, add_slow;  // (d+1)^2, additive problems
  Mat ff, fs, sf, ss;      // component problems, slow blocks augmented

  const Mat& block(Partition row, Partition col) const {
    if (!component) return row == Partition::Fast ? add_fast : add_slow;
    if (row == Partition::Fast)
      return col == Partition::Fast ? ff : fs;
    return col == Partition::Fast ? sf : ss;
  }
};

Linearization linearize(const ProblemSpec& prob, JacobianMode mode, double t,
                        const Vec& y) {
  Linearization lin;
  if (!prob.is_component()) {
    const auto& ode = std::get<AdditiveProblem>(prob.ode);
    const std::size_t d = ode.dim;
    const bool fd = mode == JacobianMode::FiniteDifference;
    const Mat jf = (!fd && ode.jac_fast) ? ode.jac_fast(t, y)
                                         : fd_jacobian(ode.f_fast, t, y);
    const Mat js = (!fd && ode.jac_slow) ? ode.jac_slow(t, y)
                                         : fd_jacobian(ode.f_slow, t, y);
    auto augment = [&](const Mat& j,
                       const std::function<Vec(double, const Vec&)>& f,
                       const std::function<Vec(double, const Vec&)>& dfdt) {
      Mat a(d + 1, d + 1);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t jj = 0; jj < d; ++jj) a(i, jj) = j(i, jj);
      if (!ode.autonomous) {
        const Vec col = (!fd && dfdt) ? dfdt(t, y) : fd_dfdt(f, t, y);
        for (std::size_t i = 0; i < d; ++i) a(i, d) = col[i];
      }
      return a;
    };
    lin.add_fast = augment(jf, ode.f_fast, ode.dfdt_fast);
    lin.add_slow = augment(js, ode.f_slow, ode.dfdt_slow);
    return lin;
  }

  const auto& ode = std::get<ComponentProblem>(prob.ode);
  lin.component = true;
  const std::size_t dF = ode.dim_fast, dS = ode.dim_slow;
  const Vec yF(y.begin(), y.begin() + dF);
  const Vec yS(y.begin() + dF, y.begin() + dF + dS);
  const bool fd = mode == JacobianMode::FiniteDifference;

  auto block_fd = [&](const std::function<Vec(double, const Vec&, const Vec&)>& f,
                      bool wrt_fast, std::size_t rows) {
    const Vec& base = wrt_fast ? yF : yS;
    Mat j(rows, base.size());
    Vec bp = base, bm = base;
    for (std::size_t col = 0; col < base.size(); ++col) {
      const double h = kSqrtEps * (1.0 + std::abs(base[col]));
      bp[col] = base[col] + h;
      bm[col] = base[col] - h;
      const Vec fp = wrt_fast ? f(t, bp, yS) : f(t, yF, bp);
      const Vec fm = wrt_fast ? f(t, bm, yS) : f(t, yF, bm);
      for (std::size_t row = 0; row < rows; ++row)
        j(row, col) = (fp[row] - fm[row]) / (2.0 * h);
      bp[col] = base[col];
      bm[col] = base[col];
    }
    return j;
  };
  auto pick = [&](const std::function<Mat(double, const Vec&, const Vec&)>& p,
                  const std::function<Vec(double, const Vec&, const Vec&)>& f,
                  bool wrt_fast, std::size_t rows) {
    return (!fd && p) ? p(t, yF, yS) : block_fd(f, wrt_fast, rows);
  };

  const Mat jff = pick(ode.jac_ff, ode.f_fast, true, dF);
  const Mat jfs = pick(ode.jac_fs, ode.f_fast, false, dF);
  const Mat jsf = pick(ode.jac_sf, ode.f_slow, true, dS);
  const Mat jss = pick(ode.jac_ss, ode.f_slow, false, dS);

  auto dfdt_col = [&](const std::function<Vec(double, const Vec&, const Vec&)>& p,
                      const std::function<Vec(double, const Vec&, const Vec&)>& f,
                      std::size_t rows) {
    if (ode.autonomous) return Vec(rows, 0.0);
    if (!fd && p) return p(t, yF, yS);
    const double h = kSqrtEps * (1.0 + std::abs(t));
    const Vec fp = f(t + h, yF, yS);
    const Vec fm = f(t - h, yF, yS);
    Vec r(rows);
    for (std::size_t i = 0; i < rows; ++i) r[i] = (fp[i] - fm[i]) / (2.0 * h);
    return r;
  };

  lin.ff = jff;
  lin.fs = Mat(dF, dS + 1);
  for (std::size_t i = 0; i < dF; ++i)
    for (std::size_t j = 0; j < dS; ++j) lin.fs(i, j) = jfs(i, j);
  const Vec dft = dfdt_col(ode.dfdt_fast, ode.f_fast, dF);
  for (std::size_t i = 0; i < dF; ++i) lin.fs(i, dS) = dft[i];
  lin.sf = Mat(dS + 1, dF);
  for (std::size_t i = 0; i < dS; ++i)
    for (std::size_t j = 0; j < dF; ++j) lin.sf(i, j) = jsf(i, j);
  lin.ss = Mat(dS + 1, dS + 1);
  for (std::size_t i = 0; i < dS; ++i)
    for (std::size_t j = 0; j < dS; ++j) lin.ss(i, j) = jss(i, j);
  const Vec dst = dfdt_col(ode.dfdt_slow, ode.f_slow, dS);
  for (std::size_t i = 0; i < dS; ++i) lin.ss(i, dS) = dst[i];
  return lin;
}

// Tarjan strongly connected components on edges dependent -> dependency;
// components are produced dependencies-first.
class SccBuilder {
 public:
  explicit SccBuilder(const std::vector<std::vector<std::size_t>>& adj)
      : adj_(adj),
        index_(adj.size(), kNone),
        low_(adj.size(), 0),
        on_stack_(adj.size(), false) {
    for (std::size_t v = 0; v < adj.size(); ++v)
      if (index_[v] == kNone) strongconnect(v);
  }
  std::vector<std::vector<std::size_t>> take() { return std::move(comps_); }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  void strongconnect(std::size_t v) {
    index_[v] = low_[v] = next_++;
    stack_.push_back(v);
    on_stack_[v] = true;
    for (std::size_t w : adj_[v]) {
      if (index_[w] == kNone) {
        strongconnect(w);
        low_[v] = std::min(low_[v], low_[w]);
      } else if (on_stack_[w]) {
        low_[v] = std::min(low_[v], index_[w]);
      }
    }
    if (low_[v] == index_[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack_.back();
        stack_.pop_back();
        on_stack_[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      comps_.push_back(std::move(comp));
    }
  }

  const std::vector<std::vector<std::size_t>>& adj_;
  std::vector<std::size_t> index_, low_;
  std::vector<bool> on_stack_;
  std::vector<std::size_t> stack_;
  std::vector<std::vector<std::size_t>> comps_;
  std::size_t next_ = 0;
};

}  // namespace

Stepper::Stepper(MultirateMethod mrm)
    : mrm_(std::move(mrm)), tab_(assemble_gark(mrm_)) {
  if (mrm_.flavor == Flavor::Spc) {
    schedule_ = ScheduleKind::Spc;
    return;
  }
  const std::size_t n = tab_.stages();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && (tab_.A(i, j) != 0.0 || tab_.G(i, j) != 0.0))
        adj[i].push_back(j);
  groups_.clear();
  for (auto& comp : SccBuilder(adj).take()) groups_.push_back({std::move(comp)});

  std::size_t max_group = 1;
  bool pairs_ok = true;
  for (const auto& g : groups_) {
    max_group = std::max(max_group, g.stages.size());
    if (g.stages.size() == 2) {
      const auto& l0 = tab_.labels[g.stages[0]];
      const auto& l1 = tab_.labels[g.stages[1]];
      if (l0.part == l1.part) pairs_ok = false;
    }
    // joint groups must not use each other's stage values as f arguments
    for (std::size_t a : g.stages)
      for (std::size_t b : g.stages)
        if (a != b && tab_.A(a, b) != 0.0)
          throw Error(
              "method '" + mrm_.name +
              "': coupling structure is not computable, stages " +
              std::to_string(a) + " and " + std::to_string(b) +
              " feed each other's function arguments inside a joint group");
  }
  if (max_group == 1)
    schedule_ = ScheduleKind::Decoupled;
  else if (max_group == 2 && pairs_ok)
    schedule_ = ScheduleKind::CompoundPairs;
  else
    schedule_ = ScheduleKind::Monolithic;
}

namespace {

struct StateView {
  bool component = false;
  std::size_t dF = 0, dS = 0;  // augmented stage dimensions per partition
  Vec baseF, baseS;            // stage argument offsets (baseF==baseS additive)

  std::size_t stage_dim(Partition p) const {
    return p == Partition::Fast ? dF : dS;
  }
};

StateView make_view(const ProblemSpec& prob, double t, const Vec& y) {
  StateView v;
  if (!prob.is_component()) {
    const auto& ode = std::get<AdditiveProblem>(prob.ode);
    v.dF = v.dS = ode.dim + 1;
    v.baseF = y;
    v.baseF.push_back(t);
    v.baseS = v.baseF;
  } else {
    const auto& ode = std::get<ComponentProblem>(prob.ode);
    v.component = true;
    v.dF = ode.dim_fast;
    v.dS = ode.dim_slow + 1;
    v.baseF.assign(y.begin(), y.begin() + ode.dim_fast);
    v.baseS.assign(y.begin() + ode.dim_fast, y.end());
    v.baseS.push_back(t);
  }
  return v;
}

// f evaluation for one stage row given its accumulated arguments.
Vec eval_f(const ProblemSpec& prob, const StateView& view, Partition p,
           const Vec& argF, const Vec& argS) {
  if (!view.component) {
    const auto& ode = std::get<AdditiveProblem>(prob.ode);
    const std::size_t d = ode.dim;
    const double tau = argF[d];
    const Vec yy(argF.begin(), argF.begin() + d);
    Vec f = p == Partition::Fast ? ode.f_fast(tau, yy) : ode.f_slow(tau, yy);
    f.push_back(p == Partition::Fast ? 0.0 : 1.0);
    return f;
  }
  const auto& ode = std::get<ComponentProblem>(prob.ode);
  const double tau = argS[ode.dim_slow];
  const Vec yS(argS.begin(), argS.begin() + ode.dim_slow);
  if (p == Partition::Fast) return ode.f_fast(tau, argF, yS);
  Vec f = ode.f_slow(tau, argF, yS);
  f.push_back(1.0);
  return f;
}

using LuCache = std::map<std::vector<double>, Lu<double>>;

}  // namespace

StepResult Stepper::step(const ProblemSpec& prob, double t, const Vec& y,
                         double H, const StepOptions& opt,
                         const Vec* lag_state, double lag_t) const {
  if (!(H > 0.0)) throw Error("step: H must be positive");
  if (y.size() != prob.dim()) throw Error("step: state dimension mismatch");
  if (schedule_ == ScheduleKind::Spc)
    return step_spc(prob, t, y, H, opt, lag_state, lag_t);
  return step_scheduled(prob, t, y, H, opt, lag_state, lag_t);
}

StepResult Stepper::step_scheduled(const ProblemSpec& prob, double t,
                                   const Vec& y, double H,
                                   const StepOptions& opt,
                                   const Vec* lag_state, double lag_t) const {
  const StateView view = make_view(prob, t, y);
  const Linearization lin =
      linearize(prob, opt.jacobian, lag_state ? lag_t : t,
                lag_state ? *lag_state : y);

  const std::size_t n = tab_.stages();
  std::vector<Vec> k(n);
  LuCache cache;

  auto arg_of = [&](std::size_t v, Vec& argF, Vec& argS) {
    argF = view.baseF;
    argS = view.baseS;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = tab_.A(v, j);
      if (a == 0.0 || k[j].empty()) continue;
      if (!view.component) {
        axpy(a, k[j], argF);
      } else if (tab_.labels[j].part == Partition::Fast) {
        axpy(a, k[j], argF);
      } else {
        axpy(a, k[j], argS);
      }
    }
    if (!view.component) argS = argF;
  };

  // H * L[p][pj] * sum of G-coupled known increments
  auto coupled_rhs = [&](std::size_t v, const std::vector<std::size_t>& skip) {
    const Partition p = tab_.labels[v].part;
    Vec accF(view.component ? std::get<ComponentProblem>(prob.ode).dim_fast
                            : view.dF,
             0.0);
    Vec accS(view.component ? view.dS : view.dF, 0.0);
    bool anyF = false, anyS = false;
    for (std::size_t j = 0; j < n; ++j) {
      const double gcoef = tab_.G(v, j);
      if (gcoef == 0.0 || k[j].empty()) continue;
      if (std::find(skip.begin(), skip.end(), j) != skip.end()) continue;
      if (!view.component || tab_.labels[j].part == Partition::Fast) {
        axpy(gcoef, k[j], accF);
        anyF = true;
      } else {
        axpy(gcoef, k[j], accS);
        anyS = true;
      }
    }
    Vec r(view.stage_dim(p), 0.0);
    if (!view.component) {
      if (anyF) r = matvec(lin.block(p, Partition::Fast), accF);
    } else {
      if (anyF) r = matvec(lin.block(p, Partition::Fast), accF);
      if (anyS) {
        const Vec rs = matvec(lin.block(p, Partition::Slow), accS);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += rs[i];
      }
    }
    for (auto& x : r) x *= H;
    return r;
  };

  Vec argF, argS;
  for (const Group& grp : groups_) {
    if (grp.stages.size() == 1) {
      const std::size_t v = grp.stages[0];
      const Partition p = tab_.labels[v].part;
      arg_of(v, argF, argS);
      Vec rhs = eval_f(prob, view, p, argF, argS);
      for (auto& x : rhs) x *= H;
      const Vec lterm = coupled_rhs(v, {});
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += lterm[i];
      const double gd = tab_.G(v, v);
      if (gd != 0.0) {
        std::vector<double> key{static_cast<double>(p == Partition::Fast),
                                H * gd};
        auto it = cache.find(key);
        if (it == cache.end()) {
          const Mat& L = lin.block(p, p);
          Mat m = Mat::identity(L.rows());
          m -= L * (H * gd);
          it = cache
                   .emplace(std::move(key),
                            Lu<double>(std::move(m),
                                       "stage " + std::to_string(v) +
                                           ", gamma = " + std::to_string(gd)))
                   .first;
        }
        k[v] = it->second.solve(std::move(rhs));
      } else {
        k[v] = std::move(rhs);
      }
      continue;
    }

    // joint group: one linear system over the stacked stage increments
    const auto& vs = grp.stages;
    std::vector<std::size_t> offs(vs.size() + 1, 0);
    for (std::size_t r = 0; r < vs.size(); ++r)
      offs[r + 1] = offs[r] + view.stage_dim(tab_.labels[vs[r]].part);
    const std::size_t nn = offs.back();

    Vec rhs(nn, 0.0);
    for (std::size_t r = 0; r < vs.size(); ++r) {
      const std::size_t v = vs[r];
      const Partition p = tab_.labels[v].part;
      arg_of(v, argF, argS);
      Vec fr = eval_f(prob, view, p, argF, argS);
      for (auto& x : fr) x *= H;
      const Vec lterm = coupled_rhs(v, vs);
      for (std::size_t i = 0; i < fr.size(); ++i)
        rhs[offs[r] + i] = fr[i] + lterm[i];
    }

    std::vector<double> key;
    key.reserve(vs.size() * vs.size() + vs.size());
    for (std::size_t r = 0; r < vs.size(); ++r)
      key.push_back(static_cast<double>(tab_.labels[vs[r]].part ==
                                        Partition::Fast));
    for (std::size_t r = 0; r < vs.size(); ++r)
      for (std::size_t s = 0; s < vs.size(); ++s)
        key.push_back(H * tab_.G(vs[r], vs[s]));
    auto it = cache.find(key);
    if (it == cache.end()) {
      Mat m(nn, nn);
      for (std::size_t i = 0; i < nn; ++i) m(i, i) = 1.0;
      for (std::size_t r = 0; r < vs.size(); ++r)
        for (std::size_t s = 0; s < vs.size(); ++s) {
          const double gc = tab_.G(vs[r], vs[s]);
          if (gc == 0.0) continue;
          const Mat& L =
              lin.block(tab_.labels[vs[r]].part, tab_.labels[vs[s]].part);
          for (std::size_t i = 0; i < L.rows(); ++i)
            for (std::size_t j = 0; j < L.cols(); ++j)
              m(offs[r] + i, offs[s] + j) -= H * gc * L(i, j);
        }
      std::string ctx = "joint stages";
      for (std::size_t v : vs) ctx += " " + std::to_string(v);
      ctx += ", gamma diag " + std::to_string(tab_.G(vs[0], vs[0]));
      it = cache.emplace(std::move(key), Lu<double>(std::move(m), ctx)).first;
    }
    const Vec sol = it->second.solve(std::move(rhs));
    for (std::size_t r = 0; r < vs.size(); ++r)
      k[vs[r]] = Vec(sol.begin() + offs[r], sol.begin() + offs[r + 1]);
  }

  StepResult res;
  res.stage_k = k;
  auto combine = [&](const Vec& weights) {
    Vec outF = view.baseF, outS = view.baseS;
    for (std::size_t v = 0; v < n; ++v) {
      if (weights[v] == 0.0) continue;
      if (!view.component || tab_.labels[v].part == Partition::Fast)
        axpy(weights[v], k[v], outF);
      else
        axpy(weights[v], k[v], outS);
    }
    Vec out;
    if (!view.component) {
      out.assign(outF.begin(), outF.end() - 1);
    } else {
      out = outF;
      out.insert(out.end(), outS.begin(), outS.end() - 1);
    }
    return out;
  };
  res.y = combine(tab_.b);
  if (tab_.b_hat) res.y_embedded = combine(*tab_.b_hat);
  return res;
}

StepResult Stepper::step_spc(const ProblemSpec& prob, double t, const Vec& y,
                             double H, const StepOptions& opt,
                             const Vec* lag_state, double lag_t) const {
  const StateView view = make_view(prob, t, y);
  const Linearization lin =
      linearize(prob, opt.jacobian, lag_state ? lag_t : t,
                lag_state ? *lag_state : y);
  const std::size_t sS = mrm_.slow_stages();
  const std::size_t sF = mrm_.fast_stages();
  const std::size_t M = mrm_.micro_steps();
  const BaseMethod& slow = mrm_.slow;

  // stacked predictor dimension and block layout
  const std::size_t dFr = view.component
                              ? std::get<ComponentProblem>(prob.ode).dim_fast
                              : 0;
  const std::size_t nfull = view.component ? dFr + view.dS : view.dF;

  // full-system linearization for the compound predictor
  Mat lsum(nfull, nfull);
  if (!view.component) {
    lsum = lin.add_fast + lin.add_slow;
  } else {
    for (std::size_t i = 0; i < dFr; ++i) {
      for (std::size_t j = 0; j < dFr; ++j) lsum(i, j) = lin.ff(i, j);
      for (std::size_t j = 0; j < view.dS; ++j)
        lsum(i, dFr + j) = lin.fs(i, j);
    }
    for (std::size_t i = 0; i < view.dS; ++i) {
      for (std::size_t j = 0; j < dFr; ++j) lsum(dFr + i, j) = lin.sf(i, j);
      for (std::size_t j = 0; j < view.dS; ++j)
        lsum(dFr + i, dFr + j) = lin.ss(i, j);
    }
  }

  std::vector<Vec> kfull(sS), ks(sS);
  LuCache cache;
  for (std::size_t i = 0; i < sS; ++i) {
    Vec argF = view.baseF, argS = view.baseS;
    for (std::size_t j = 0; j < i; ++j) {
      const double a = slow.alpha(i, j);
      if (a == 0.0) continue;
      if (!view.component) {
        axpy(a, kfull[j], argF);
      } else {
        for (std::size_t z = 0; z < dFr; ++z) argF[z] += a * kfull[j][z];
        for (std::size_t z = 0; z < view.dS; ++z)
          argS[z] += a * kfull[j][dFr + z];
      }
    }
    if (!view.component) argS = argF;

    Vec ffast = eval_f(prob, view, Partition::Fast, argF, argS);
    Vec fslow = eval_f(prob, view, Partition::Slow, argF, argS);
    Vec rhs(nfull, 0.0);
    if (!view.component) {
      for (std::size_t z = 0; z < nfull; ++z)
        rhs[z] = H * (ffast[z] + fslow[z]);
    } else {
      for (std::size_t z = 0; z < dFr; ++z) rhs[z] = H * ffast[z];
      for (std::size_t z = 0; z < view.dS; ++z) rhs[dFr + z] = H * fslow[z];
    }
    Vec gacc(nfull, 0.0);
    for (std::size_t j = 0; j < i; ++j)
      if (slow.gamma(i, j) != 0.0) axpy(slow.gamma(i, j), kfull[j], gacc);
    {
      const Vec lg = matvec(lsum, gacc);
      for (std::size_t z = 0; z < nfull; ++z) rhs[z] += H * lg[z];
    }
    const double gd = slow.gamma(i, i);
    std::vector<double> key{-1.0, H * gd};
    auto it = cache.find(key);
    if (it == cache.end()) {
      Mat m = Mat::identity(nfull);
      m -= lsum * (H * gd);
      it = cache
               .emplace(std::move(key),
                        Lu<double>(std::move(m), "predictor stage " +
                                                     std::to_string(i)))
               .first;
    }
    kfull[i] = it->second.solve(std::move(rhs));

    // extract the slow stage increment with the same arguments
    Vec gall(nfull, 0.0);
    for (std::size_t j = 0; j <= i; ++j)
      if (slow.gamma(i, j) != 0.0) axpy(slow.gamma(i, j), kfull[j], gall);
    if (!view.component) {
      ks[i] = fslow;
      const Vec lg = matvec(lin.add_slow, gall);
      for (std::size_t z = 0; z < view.dS; ++z)
        ks[i][z] = H * ks[i][z] + H * lg[z];
    } else {
      Vec gF(gall.begin(), gall.begin() + dFr);
      Vec gS(gall.begin() + dFr, gall.end());
      Vec lg = matvec(lin.sf, gF);
      const Vec lg2 = matvec(lin.ss, gS);
      ks[i] = fslow;
      for (std::size_t z = 0; z < view.dS; ++z)
        ks[i][z] = H * ks[i][z] + H * (lg[z] + lg2[z]);
    }
  }

  // corrector micro-steps on the fast part
  std::vector<std::vector<Vec>> kf(M, std::vector<Vec>(sF));
  Vec ytF = view.baseF;  // fast running solution (additive: full aug state)
  const std::size_t fdim = view.component ? dFr : view.dF;
  for (std::size_t l = 0; l < M; ++l) {
    const BaseMethod& fl = mrm_.fast_step(l + 1);
    const double rho = mrm_.micro_fractions[l];
    for (std::size_t i = 0; i < sF; ++i) {
      Vec argF = ytF;
      for (std::size_t j = 0; j < i; ++j)
        if (fl.alpha(i, j) != 0.0) axpy(rho * fl.alpha(i, j), kf[l][j], argF);
      Vec argS = view.baseS;
      Vec sacc(view.dS, 0.0);
      for (std::size_t j = 0; j < sS; ++j) {
        const double a = mrm_.coupling.alpha_fs[l](i, j);
        const double g = mrm_.coupling.gamma_fs[l](i, j);
        if (!view.component) {
          if (a != 0.0) axpy(a, ks[j], argF);
        } else {
          if (a != 0.0)
            for (std::size_t z = 0; z < view.dS; ++z)
              argS[z] += a * ks[j][z];
        }
        if (g != 0.0) axpy(g, ks[j], sacc);
      }
      if (!view.component) argS = argF;
      Vec rhs = eval_f(prob, view, Partition::Fast, argF, argS);
      for (auto& x : rhs) x *= H;
      Vec gacc(fdim, 0.0);
      for (std::size_t j = 0; j < i; ++j)
        if (fl.gamma(i, j) != 0.0)
          axpy(rho * fl.gamma(i, j), kf[l][j], gacc);
      {
        const Mat& LF = lin.block(Partition::Fast, Partition::Fast);
        const Vec lg = matvec(LF, gacc);
        for (std::size_t z = 0; z < rhs.size(); ++z) rhs[z] += H * lg[z];
        const Mat& LS = lin.block(Partition::Fast, Partition::Slow);
        Vec saccv = sacc;
        if (!view.component) {
          const Vec lg2 = matvec(LS, saccv);
          for (std::size_t z = 0; z < rhs.size(); ++z) rhs[z] += H * lg2[z];
        } else {
          const Vec lg2 = matvec(lin.fs, saccv);
          for (std::size_t z = 0; z < rhs.size(); ++z) rhs[z] += H * lg2[z];
        }
      }
      const double gd = rho * fl.gamma(i, i);
      if (gd != 0.0) {
        std::vector<double> key{1.0, H * gd};
        auto it = cache.find(key);
        if (it == cache.end()) {
          const Mat& LF = lin.block(Partition::Fast, Partition::Fast);
          Mat m = Mat::identity(fdim);
          m -= LF * (H * gd);
          it = cache
                   .emplace(std::move(key),
                            Lu<double>(std::move(m), "corrector stage"))
                   .first;
        }
        kf[l][i] = it->second.solve(std::move(rhs));
      } else {
        kf[l][i] = std::move(rhs);
      }
    }
    for (std::size_t i = 0; i < sF; ++i)
      axpy(rho * fl.b[i], kf[l][i], ytF);
  }

  // assembled stage ordering: predictor block, fast blocks, slow block
  StepResult res;
  res.stage_k.resize(tab_.stages());
  for (std::size_t i = 0; i < sS; ++i) {
    if (!view.component) {
      res.stage_k[i] = vsub(kfull[i], ks[i]);
    } else {
      res.stage_k[i] = Vec(kfull[i].begin(), kfull[i].begin() + dFr);
    }
    res.stage_k[sS + M * sF + i] = ks[i];
  }
  for (std::size_t l = 0; l < M; ++l)
    for (std::size_t i = 0; i < sF; ++i)
      res.stage_k[sS + l * sF + i] = kf[l][i];

  auto combine = [&](const Vec& weights) {
    Vec outF = view.baseF, outS = view.baseS;
    for (std::size_t v = 0; v < tab_.stages(); ++v) {
      if (weights[v] == 0.0) continue;
      if (!view.component || tab_.labels[v].part == Partition::Fast)
        axpy(weights[v], res.stage_k[v], outF);
      else
        axpy(weights[v], res.stage_k[v], outS);
    }
    Vec out;
    if (!view.component) {
      out.assign(outF.begin(), outF.end() - 1);
    } else {
      out = outF;
      out.insert(out.end(), outS.begin(), outS.end() - 1);
    }
    return out;
  };
  res.y = combine(tab_.b);
  if (tab_.b_hat) res.y_embedded = combine(*tab_.b_hat);
  return res;
}

Trajectory integrate(const MultirateMethod& mrm, const ProblemSpec& prob,
                     double t0, double t_end, double H,
                     const IntegrateOptions& opt) {
  if (!(H > 0.0)) throw Error("integrate: H must be positive");
  const double x = (t_end - t0) / H;
  const auto n = static_cast<std::size_t>(std::llround(x));
  if (n == 0 || std::abs(x - static_cast<double>(n)) >
                    64.0 * std::numeric_limits<double>::epsilon() * x)
    throw Error("integrate: (t_end - t0)/H is not an integer");
  if (opt.embedded_weights && !mrm.has_embedded())
    throw Error("integrate: method '" + mrm.name + "' has no embedded weights");

  Stepper stepper(mrm);
  Trajectory traj;
  if (opt.store_trajectory) {
    traj.t.reserve(n + 1);
    traj.y.reserve(n + 1);
  }
  traj.t.push_back(t0);
  traj.y.push_back(prob.y0);

  // The embedded solution accumulates the embedded updates along the main
  // trajectory: y_hat_n = y_hat_{n-1} + (embedded increment at y_{n-1}).
  Vec y = prob.y0;
  Vec yhat = prob.y0;
  Vec lag_y = prob.y0;
  double lag_t = t0;
  StepOptions sopt;
  sopt.jacobian = opt.jacobian == JacobianMode::TimeLagged
                      ? JacobianMode::Exact
                      : opt.jacobian;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * H;
    StepResult r;
    try {
      if (opt.jacobian == JacobianMode::TimeLagged)
        r = stepper.step(prob, t, y, H, sopt, &lag_y, lag_t);
      else
        r = stepper.step(prob, t, y, H, sopt);
    } catch (const Error& e) {
      throw Error("integrate: step " + std::to_string(i + 1) + " failed: " +
                  e.what());
    }
    lag_y = y;
    lag_t = t;
    if (opt.embedded_weights) {
      const Vec incr = vsub(*r.y_embedded, y);
      yhat = vadd(yhat, incr);
    }
    y = r.y;
    const Vec& out = opt.embedded_weights ? yhat : y;
    if (opt.store_trajectory || i + 1 == n) {
      traj.t.push_back(t + H);
      traj.y.push_back(out);
    }
  }
  return traj;
}

Vec reference_solve(const ProblemSpec& prob, double t0, double t_end,
                    double tol, const BaseMethod& base) {
  if (tol < 1e-13) throw Error("reference_solve: tol must be >= 1e-13");
  const MultirateMethod single = single_rate_compound(base);
  IntegrateOptions opt;
  opt.store_trajectory = false;
  std::size_t n = 64;
  Vec prev =
      integrate(single, prob, t0, t_end, (t_end - t0) / static_cast<double>(n),
                opt).final_state();
  for (int it = 0; it < 20; ++it) {
    n *= 2;
    Vec cur = integrate(single, prob, t0, t_end,
                        (t_end - t0) / static_cast<double>(n), opt)
                  .final_state();
    if (norm2(vsub(cur, prev)) <= tol) return cur;
    prev = std::move(cur);
  }
  throw Error("reference_solve: halving did not converge to tolerance " +
              std::to_string(tol));
}

std::vector<ConvergenceRow> convergence_study(const MultirateMethod& mrm,
                                              const ProblemSpec& prob,
                                              double H0, std::size_t halvings,
                                              const ConvergenceOptions& opt) {
  if (opt.norm == ErrorNorm::TrajectoryMax && !prob.exact)
    throw Error("convergence_study: trajectory-max norm needs an exact "
                "solution");
  Vec ref;
  if (opt.norm == ErrorNorm::FinalTime) {
    if (prob.exact)
      ref = prob.exact(prob.t_end);
    else
      ref = reference_solve(prob, prob.t0, prob.t_end, opt.reference_tol);
  }

  auto group_err = [](const Vec& y, const Vec& want,
                      const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (std::size_t i : idx) {
      const double d = y[i] - want[i];
      s += d * d;
    }
    return std::sqrt(s);
  };

  std::vector<ConvergenceRow> rows;
  IntegrateOptions iopt;
  iopt.jacobian = opt.jacobian;
  iopt.embedded_weights = opt.embedded_weights;
  iopt.store_trajectory = opt.norm == ErrorNorm::TrajectoryMax;
  double H = H0;
  for (std::size_t i = 0; i <= halvings; ++i, H *= 0.5) {
    ConvergenceRow row;
    row.H = H;
    try {
      const Trajectory traj =
          integrate(mrm, prob, prob.t0, prob.t_end, H, iopt);
      if (opt.norm == ErrorNorm::FinalTime) {
        row.err_slow = group_err(traj.final_state(), ref, prob.slow_indices);
        row.err_fast = group_err(traj.final_state(), ref, prob.fast_indices);
      } else {
        for (std::size_t k = 0; k < traj.t.size(); ++k) {
          const Vec want = prob.exact(traj.t[k]);
          row.err_slow =
              std::max(row.err_slow, group_err(traj.y[k], want, prob.slow_indices));
          row.err_fast =
              std::max(row.err_fast, group_err(traj.y[k], want, prob.fast_indices));
        }
      }
    } catch (const Error&) {
      row.err_slow = row.err_fast = std::numeric_limits<double>::quiet_NaN();
    }
    if (!rows.empty()) {
      row.order_slow = std::log2(rows.back().err_slow / row.err_slow);
      row.order_fast = std::log2(rows.back().err_fast / row.err_fast);
    } else {
      row.order_slow = row.order_fast =
          std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

double fitted_order(const std::vector<double>& H,
                    const std::vector<double>& err) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < H.size(); ++i) {
    if (!(err[i] > 0.0) || !std::isfinite(err[i])) continue;
    const double x = std::log(H[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double nd = static_cast<double>(n);
  return (nd * sxy - sx * sy) / (nd * sxx - sx * sx);
}

}  // namespace mrgark

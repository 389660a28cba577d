#include "mrgark/conditions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace mrgark {

std::string to_string(ConditionMode m) {
  switch (m) {
    case ConditionMode::Ros: return "ros";
    case ConditionMode::Row: return "row";
    case ConditionMode::TimeLagged: return "time_lagged";
  }
  return "ros";
}

ConditionMode condition_mode_from_string(const std::string& s) {
  if (s == "ros") return ConditionMode::Ros;
  if (s == "row") return ConditionMode::Row;
  if (s == "time_lagged" || s == "lagged") return ConditionMode::TimeLagged;
  throw Error("unknown condition mode '" + s + "'");
}

void ConditionReport::finalize() {
  achieved_order = 0;
  for (int p = 1; p <= requested_order; ++p) {
    bool ok = true;
    for (const auto& en : entries)
      if (!en.informational && en.order <= p && !en.pass(tolerance)) ok = false;
    if (!ok) break;
    achieved_order = p;
  }
}

double ConditionReport::max_residual(int up_to_order) const {
  double m = 0.0;
  for (const auto& en : entries)
    if (en.applicable && en.order <= up_to_order)
      m = std::max(m, std::abs(en.residual));
  return m;
}

const ConditionEntry* ConditionReport::find(const std::string& id) const {
  for (const auto& en : entries)
    if (en.id == id) return &en;
  return nullptr;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string ConditionReport::render_text() const {
  std::ostringstream os;
  os << "id                              target        value         residual      pass\n";
  for (const auto& en : entries) {
    char line[192];
    std::snprintf(line, sizeof line, "%-30s  %-12.5g  %-12.5g  %-12.5g  %s\n",
                  en.id.c_str(), en.target, en.value, en.residual,
                  !en.applicable ? "n/a" : (en.pass(tolerance) ? "yes" : "NO"));
    os << line;
  }
  os << "achieved order: " << achieved_order << " (requested " << requested_order
     << ", tolerance " << tolerance << ")\n";
  if (!note.empty()) os << note << "\n";
  return os.str();
}

std::string ConditionReport::render_csv() const {
  std::ostringstream os;
  os << "id,target,value,residual,pass\n";
  for (const auto& en : entries)
    os << en.id << ',' << fmt(en.target) << ',' << fmt(en.value) << ','
       << fmt(en.residual) << ','
       << (!en.applicable ? "na" : (en.pass(tolerance) ? "1" : "0")) << "\n";
  return os.str();
}

namespace {

// Block-matrix view shared by the generic (assembled) and the specialized
// (per-micro-step) engines.
class CondOps {
 public:
  virtual ~CondOps() = default;
  virtual std::size_t nparts() const = 0;
  virtual std::size_t len(std::size_t m) const = 0;
  // which in {'A','G','B'}: returns block(m,n) * v.
  virtual Vec apply(char which, std::size_t m, std::size_t n,
                    const Vec& v) const = 0;
  virtual double dotb(std::size_t m, const Vec& v) const = 0;
  virtual const char* part_name(std::size_t m) const = 0;
};

class GenericOps final : public CondOps {
 public:
  GenericOps(const Mat& A, const Mat& G, const Vec& b,
             std::vector<std::vector<std::size_t>> parts,
             std::vector<std::string> names)
      : parts_(std::move(parts)), names_(std::move(names)) {
    const std::size_t N = parts_.size();
    a_.resize(N * N);
    g_.resize(N * N);
    b_.resize(N);
    for (std::size_t m = 0; m < N; ++m) {
      b_[m].resize(parts_[m].size());
      for (std::size_t i = 0; i < parts_[m].size(); ++i)
        b_[m][i] = b[parts_[m][i]];
      for (std::size_t n = 0; n < N; ++n) {
        Mat am(parts_[m].size(), parts_[n].size());
        Mat gm(parts_[m].size(), parts_[n].size());
        for (std::size_t i = 0; i < parts_[m].size(); ++i)
          for (std::size_t j = 0; j < parts_[n].size(); ++j) {
            am(i, j) = A(parts_[m][i], parts_[n][j]);
            gm(i, j) = G(parts_[m][i], parts_[n][j]);
          }
        a_[m * N + n] = std::move(am);
        g_[m * N + n] = std::move(gm);
      }
    }
  }

  std::size_t nparts() const override { return parts_.size(); }
  std::size_t len(std::size_t m) const override { return parts_[m].size(); }

  Vec apply(char which, std::size_t m, std::size_t n,
            const Vec& v) const override {
    const std::size_t N = parts_.size();
    if (which == 'A') return matvec(a_[m * N + n], v);
    if (which == 'G') return matvec(g_[m * N + n], v);
    Vec r = matvec(a_[m * N + n], v);
    Vec r2 = matvec(g_[m * N + n], v);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += r2[i];
    return r;
  }

  double dotb(std::size_t m, const Vec& v) const override {
    return dot(b_[m], v);
  }

  const char* part_name(std::size_t m) const override {
    return names_[m].c_str();
  }

 private:
  std::vector<std::vector<std::size_t>> parts_;
  std::vector<std::string> names_;
  std::vector<Mat> a_, g_;
  std::vector<Vec> b_;
};

// Per-micro-step view of the standard (non-SPC) multirate tableau. Partition
// 0 is fast (M blocks of sF), partition 1 is slow.
class MultirateOps final : public CondOps {
 public:
  explicit MultirateOps(const MultirateMethod& mrm) : mrm_(mrm) {}

  std::size_t nparts() const override { return 2; }
  std::size_t len(std::size_t m) const override {
    return m == 0 ? mrm_.micro_steps() * mrm_.fast_stages()
                  : mrm_.slow_stages();
  }

  Vec apply(char which, std::size_t m, std::size_t n,
            const Vec& v) const override {
    if (which == 'B') {
      Vec r = apply('A', m, n, v);
      Vec r2 = apply('G', m, n, v);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += r2[i];
      return r;
    }
    const std::size_t M = mrm_.micro_steps();
    const std::size_t sF = mrm_.fast_stages();
    const Vec& rho = mrm_.micro_fractions;
    const bool alpha = which == 'A';
    if (m == 0 && n == 0) {
      Vec r(len(0), 0.0);
      double acc = 0.0;  // sum over completed micro-steps of rho_m b^T v_m
      for (std::size_t l = 0; l < M; ++l) {
        const BaseMethod& fl = mrm_.fast_step(l + 1);
        const Mat& blk = alpha ? fl.alpha : fl.gamma;
        for (std::size_t i = 0; i < sF; ++i) {
          double s = alpha ? acc : 0.0;
          for (std::size_t j = 0; j < sF; ++j)
            s += rho[l] * blk(i, j) * v[l * sF + j];
          r[l * sF + i] = s;
        }
        if (alpha) {
          double bv = 0.0;
          for (std::size_t j = 0; j < sF; ++j) bv += fl.b[j] * v[l * sF + j];
          acc += rho[l] * bv;
        }
      }
      return r;
    }
    if (m == 0 && n == 1) {
      const auto& blocks = alpha ? mrm_.coupling.alpha_fs : mrm_.coupling.gamma_fs;
      Vec r(len(0), 0.0);
      for (std::size_t l = 0; l < M; ++l) {
        Vec blk = matvec(blocks[l], v);
        for (std::size_t i = 0; i < sF; ++i) r[l * sF + i] = blk[i];
      }
      return r;
    }
    if (m == 1 && n == 0) {
      const auto& blocks = alpha ? mrm_.coupling.alpha_sf : mrm_.coupling.gamma_sf;
      Vec r(len(1), 0.0);
      for (std::size_t l = 0; l < M; ++l) {
        Vec vl(v.begin() + l * sF, v.begin() + (l + 1) * sF);
        Vec blk = matvec(blocks[l], vl);
        axpy(rho[l], blk, r);
      }
      return r;
    }
    return matvec(alpha ? mrm_.slow.alpha : mrm_.slow.gamma, v);
  }

  double dotb(std::size_t m, const Vec& v) const override {
    if (m == 1) return dot(mrm_.slow.b, v);
    const std::size_t sF = mrm_.fast_stages();
    double s = 0.0;
    for (std::size_t l = 0; l < mrm_.micro_steps(); ++l) {
      const Vec& bf = mrm_.fast_step(l + 1).b;
      for (std::size_t i = 0; i < sF; ++i)
        s += mrm_.micro_fractions[l] * bf[i] * v[l * sF + i];
    }
    return s;
  }

  const char* part_name(std::size_t m) const override {
    return m == 0 ? "F" : "S";
  }

 private:
  const MultirateMethod& mrm_;
};

// Shared condition catalogue walking all partition index tuples.
class Catalogue {
 public:
  Catalogue(const CondOps& ops, ConditionReport& rep) : ops_(ops), rep_(rep) {}

  void run(int order, ConditionMode mode) {
    const std::size_t N = ops_.nparts();
    for (std::size_t m = 0; m < N; ++m)
      emit(std::string("ord1.b") + tuple({m}), 1, ops_.dotb(m, one(m)), 1.0);
    if (order < 2) return;

    const bool row = mode == ConditionMode::Row;
    for (std::size_t m = 0; m < N; ++m)
      for (std::size_t n = 0; n < N; ++n) {
        if (row) {
          emit2("row2.c", 2, m, n, ops_.dotb(m, c(m, n)), 0.5);
          emit2("row2.g", 2, m, n, ops_.dotb(m, g(m, n)), 0.0);
        } else {
          emit2("ros2.e", 2, m, n, ops_.dotb(m, e(m, n)), 0.5);
        }
      }
    if (order < 3) return;

    for (std::size_t m = 0; m < N; ++m)
      for (std::size_t n = 0; n < N; ++n) {
        if (mode == ConditionMode::TimeLagged)
          emit2("tl3.c", 3, m, n, ops_.dotb(m, c(m, n)), 0.5);
        for (std::size_t p = 0; p < N; ++p) {
          if (row) {
            emit3("row3.cc", 3, m, n, p,
                  ops_.dotb(m, elemwise(c(m, n), c(m, p))), 1.0 / 3.0);
            emit3("row3.ac", 3, m, n, p,
                  ops_.dotb(m, ops_.apply('A', m, n, c(n, p))), 1.0 / 6.0);
            emit3("row3.gc", 3, m, n, p,
                  ops_.dotb(m, ops_.apply('G', m, n, c(n, p))), 0.0);
            emit3("row3.ag", 3, m, n, p,
                  ops_.dotb(m, ops_.apply('A', m, n, g(n, p))), 0.0);
            emit3("row3.gg", 3, m, n, p,
                  ops_.dotb(m, ops_.apply('G', m, n, g(n, p))), 0.0);
          } else {
            emit3("ros3.cc", 3, m, n, p,
                  ops_.dotb(m, elemwise(c(m, n), c(m, p))), 1.0 / 3.0);
            emit3("ros3.be", 3, m, n, p,
                  ops_.dotb(m, ops_.apply('B', m, n, e(n, p))), 1.0 / 6.0);
          }
        }
      }
    if (order < 4 || mode == ConditionMode::TimeLagged) return;

    for (std::size_t m = 0; m < N; ++m)
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t p = 0; p < N; ++p)
          for (std::size_t q = 0; q < N; ++q) {
            if (row) {
              emit4("row4.ccc", m, n, p, q,
                    ops_.dotb(m, elemwise(elemwise(c(m, n), c(m, p)), c(m, q))),
                    0.25);
              emit4("row4.ac_c", m, n, p, q,
                    ops_.dotb(m, elemwise(ops_.apply('A', m, n, c(n, p)), c(m, q))),
                    0.125);
              emit4("row4.a_cc", m, n, p, q,
                    ops_.dotb(m, ops_.apply('A', m, n, elemwise(c(n, p), c(n, q)))),
                    1.0 / 12.0);
              emit4("row4.aac", m, n, p, q,
                    ops_.dotb(m, ops_.apply('A', m, n, ops_.apply('A', n, p, c(p, q)))),
                    1.0 / 24.0);
              emit4("row4.ag_c", m, n, p, q,
                    ops_.dotb(m, elemwise(ops_.apply('A', m, n, g(n, p)), c(m, q))),
                    0.0);
              emit4("row4.g_cc", m, n, p, q,
                    ops_.dotb(m, ops_.apply('G', m, n, elemwise(c(n, p), c(n, q)))),
                    0.0);
              emit4("row4.gac", m, n, p, q,
                    ops_.dotb(m, ops_.apply('G', m, n, ops_.apply('A', n, p, c(p, q)))),
                    0.0);
              emit4("row4.agc", m, n, p, q,
                    ops_.dotb(m, ops_.apply('A', m, n, ops_.apply('G', n, p, c(p, q)))),
                    0.0);
              emit4("row4.aag", m, n, p, q,
                    ops_.dotb(m, ops_.apply('A', m, n, ops_.apply('A', n, p, g(p, q)))),
                    0.0);
              emit4("row4.gag", m, n, p, q,
                    ops_.dotb(m, ops_.apply('G', m, n, ops_.apply('A', n, p, g(p, q)))),
                    0.0);
              emit4("row4.agg", m, n, p, q,
                    ops_.dotb(m, ops_.apply('A', m, n, ops_.apply('G', n, p, g(p, q)))),
                    0.0);
              emit4("row4.ggc", m, n, p, q,
                    ops_.dotb(m, ops_.apply('G', m, n, ops_.apply('G', n, p, c(p, q)))),
                    0.0);
              emit4("row4.ggg", m, n, p, q,
                    ops_.dotb(m, ops_.apply('G', m, n, ops_.apply('G', n, p, g(p, q)))),
                    0.0);
            } else {
              emit4("ros4.ccc", m, n, p, q,
                    ops_.dotb(m, elemwise(elemwise(c(m, n), c(m, p)), c(m, q))),
                    0.25);
              emit4("ros4.ae_c", m, n, p, q,
                    ops_.dotb(m, elemwise(ops_.apply('A', m, n, e(n, p)), c(m, q))),
                    0.125);
              emit4("ros4.b_cc", m, n, p, q,
                    ops_.dotb(m, ops_.apply('B', m, n, elemwise(c(n, p), c(n, q)))),
                    1.0 / 12.0);
              emit4("ros4.bbe", m, n, p, q,
                    ops_.dotb(m, ops_.apply('B', m, n, ops_.apply('B', n, p, e(p, q)))),
                    1.0 / 24.0);
            }
          }
  }

 private:
  Vec one(std::size_t n) const { return Vec(ops_.len(n), 1.0); }

  const Vec& c(std::size_t m, std::size_t n) {
    return cached(c_, 'A', m, n);
  }
  const Vec& g(std::size_t m, std::size_t n) {
    return cached(g_, 'G', m, n);
  }
  const Vec& e(std::size_t m, std::size_t n) {
    return cached(e_, 'B', m, n);
  }

  const Vec& cached(std::map<std::size_t, Vec>& store, char which,
                    std::size_t m, std::size_t n) {
    const std::size_t key = m * ops_.nparts() + n;
    auto it = store.find(key);
    if (it == store.end())
      it = store.emplace(key, ops_.apply(which, m, n, one(n))).first;
    return it->second;
  }

  std::string tuple(std::initializer_list<std::size_t> parts) const {
    if (ops_.nparts() == 1) return "";
    std::string s = "[";
    bool first = true;
    for (std::size_t p : parts) {
      if (!first) s += ',';
      s += ops_.part_name(p);
      first = false;
    }
    return s + "]";
  }

  void emit(std::string id, int order, double value, double target) {
    ConditionEntry en;
    en.id = std::move(id);
    en.order = order;
    en.target = target;
    en.value = value;
    en.residual = value - target;
    rep_.entries.push_back(std::move(en));
  }
  void emit2(const char* base, int order, std::size_t m, std::size_t n,
             double v, double t) {
    emit(std::string(base) + tuple({m, n}), order, v, t);
  }
  void emit3(const char* base, int order, std::size_t m, std::size_t n,
             std::size_t p, double v, double t) {
    emit(std::string(base) + tuple({m, n, p}), order, v, t);
  }
  void emit4(const char* base, std::size_t m, std::size_t n, std::size_t p,
             std::size_t q, double v, double t) {
    emit(std::string(base) + tuple({m, n, p, q}), 4, v, t);
  }

  const CondOps& ops_;
  ConditionReport& rep_;
  std::map<std::size_t, Vec> c_, g_, e_;
};

}  // namespace

ConditionReport check_base_ros(const BaseMethod& base, int order,
                               ConditionMode mode, double tol) {
  if (order < 1 || order > 4) throw Error("check_base_ros: order must be 1..4");
  if (mode == ConditionMode::TimeLagged && order > 3)
    order = 3;  // lagged-Jacobian conditions are stated through order 3
  ConditionReport rep;
  rep.tolerance = tol;
  rep.requested_order = order;
  std::vector<std::vector<std::size_t>> parts(1);
  for (std::size_t i = 0; i < base.stages(); ++i) parts[0].push_back(i);
  GenericOps ops(base.alpha, base.gamma, base.b, std::move(parts), {""});
  Catalogue(ops, rep).run(order, mode);
  rep.finalize();
  return rep;
}

ConditionReport check_internal_consistency(const MultirateMethod& mrm,
                                           double tol) {
  mrm.validate();
  ConditionReport rep;
  rep.tolerance = tol;
  rep.requested_order = 1;
  const std::size_t M = mrm.micro_steps();
  const Vec& rho = mrm.micro_fractions;

  auto push = [&](std::string id, double residual) {
    ConditionEntry en;
    en.id = std::move(id);
    en.order = 1;
    en.target = 0.0;
    en.value = residual;
    en.residual = residual;
    rep.entries.push_back(std::move(en));
  };

  // Fast rows: row sums of the fast/slow coupling must match the micro-step
  // abscissae offsets and gamma row sums.
  double offset = 0.0;
  for (std::size_t l = 0; l < M; ++l) {
    const BaseMethod& fl = mrm.fast_step(l + 1);
    const Vec cfs = matvec(mrm.coupling.alpha_fs[l], ones(mrm.slow_stages()));
    const Vec gfs = matvec(mrm.coupling.gamma_fs[l], ones(mrm.slow_stages()));
    double rc = 0.0, rg = 0.0;
    for (std::size_t i = 0; i < mrm.fast_stages(); ++i) {
      rc = std::max(rc, std::abs(cfs[i] - (offset + rho[l] * fl.c[i])));
      rg = std::max(rg, std::abs(gfs[i] - rho[l] * fl.g[i]));
    }
    push("ic.cfs[" + std::to_string(l + 1) + "]", rc);
    push("ic.gfs[" + std::to_string(l + 1) + "]", rg);
    offset += rho[l];
  }

  if (mrm.flavor != Flavor::Spc) {
    Vec csf(mrm.slow_stages(), 0.0), gsf(mrm.slow_stages(), 0.0);
    for (std::size_t l = 0; l < M; ++l) {
      axpy(rho[l], matvec(mrm.coupling.alpha_sf[l], ones(mrm.fast_stages())), csf);
      axpy(rho[l], matvec(mrm.coupling.gamma_sf[l], ones(mrm.fast_stages())), gsf);
    }
    push("ic.csf", norm_inf(vsub(csf, mrm.slow.c)));
    push("ic.gsf", norm_inf(vsub(gsf, mrm.slow.g)));
  }

  rep.finalize();
  rep.achieved_order = 0;
  rep.preconditions_ok = rep.max_residual(1) <= tol;
  return rep;
}

namespace {

// Reduced micro-step-scaled coupling conditions, reported when internal
// consistency holds. Residuals are divided by the scale so they stay in
// single-rate units.
void add_named_mr_conditions(const MultirateMethod& mrm, ConditionMode mode,
                             int order, bool applicable, ConditionReport& rep) {
  const double M = static_cast<double>(mrm.micro_steps());
  const BaseMethod& S = mrm.slow;
  const BaseMethod& F = mrm.fast;

  auto sigma = [&](CouplingBlock w, std::size_t k) {
    return averaged_coupling(mrm, w, k);
  };
  auto named = [&](std::string id, int ord, double value, double target,
                   double scale) {
    ConditionEntry en;
    en.id = std::move(id);
    en.order = ord;
    en.target = target;
    en.value = value;
    en.residual = (value - target) / scale;
    en.applicable = applicable;
    en.informational = true;
    rep.entries.push_back(std::move(en));
  };

  const Vec onef = ones(F.stages());
  const Vec ones_s = ones(S.stages());

  if (mode == ConditionMode::TimeLagged || mode == ConditionMode::Ros) {
    if (order >= 3) {
      const Mat bsf0 = sigma(CouplingBlock::AlphaSF, 0) + sigma(CouplingBlock::GammaSF, 0);
      const Mat bsf1 = sigma(CouplingBlock::AlphaSF, 1) + sigma(CouplingBlock::GammaSF, 1);
      const Mat bfs0 = sigma(CouplingBlock::AlphaFS, 0) + sigma(CouplingBlock::GammaFS, 0);
      named("mr3.ros.a", 3,
            dot(S.b, vadd(matvec(bsf1, onef), matvec(bsf0, F.e))), M * M / 6.0,
            M * M);
      named("mr3.ros.b", 3, dot(F.b, matvec(bfs0, S.e)), M / 6.0, M);
    }
    if (mode == ConditionMode::TimeLagged && order >= 3) {
      named("tl3.slow", 3, dot(S.b, S.c), 0.5, 1.0);
      named("tl3.fast", 3, dot(F.b, F.c), 0.5, 1.0);
    }
    if (mode == ConditionMode::Ros && order >= 4 && !mrm.fast_tail) {
      const Mat asf0 = sigma(CouplingBlock::AlphaSF, 0);
      const Mat asf1 = sigma(CouplingBlock::AlphaSF, 1);
      const Mat afs0 = sigma(CouplingBlock::AlphaFS, 0);
      const Mat afs1 = sigma(CouplingBlock::AlphaFS, 1);
      const Mat bsf0 = asf0 + sigma(CouplingBlock::GammaSF, 0);
      const Mat bsf1 = asf1 + sigma(CouplingBlock::GammaSF, 1);
      const Mat bsf2 = sigma(CouplingBlock::AlphaSF, 2) + sigma(CouplingBlock::GammaSF, 2);
      const Mat bfs0 = afs0 + sigma(CouplingBlock::GammaFS, 0);
      named("mr4.ros.a", 4,
            dot(S.b, elemwise(vadd(matvec(asf1, onef), matvec(asf0, F.e)), S.c)),
            M * M / 8.0, M * M);
      named("mr4.ros.b", 4,
            dot(F.b, vadd(matvec(afs1, S.e), elemwise(matvec(afs0, S.e), F.c))),
            M * M / 8.0, M * M);
      named("mr4.ros.c", 4,
            dot(S.b, vadd(vadd(matvec(bsf2, onef), scaled(matvec(bsf1, F.c), 2.0)),
                          matvec(bsf0, elemwise(F.c, F.c)))),
            M * M * M / 12.0, M * M * M);
      named("mr4.ros.d", 4, dot(F.b, matvec(bfs0, elemwise(S.c, S.c))),
            M / 12.0, M);
      named("mr4.ros.e", 4,
            dot(S.b, matvec(S.beta, vadd(matvec(bsf1, onef), matvec(bsf0, F.e)))),
            M * M / 24.0, M * M);
      named("mr4.ros.f", 4,
            dot(S.b, vadd(matvec(bsf1, F.e), matvec(bsf0, matvec(F.beta, F.e)))),
            M * M * M / 24.0, M * M * M);
      {
        Mat acc(S.stages(), S.stages());
        for (std::size_t l = 0; l < mrm.micro_steps(); ++l)
          acc += (mrm.coupling.alpha_sf[l] + mrm.coupling.gamma_sf[l]) *
                 (mrm.coupling.alpha_fs[l] + mrm.coupling.gamma_fs[l]);
        named("mr4.ros.g", 4, dot(S.b, matvec(acc, S.e)), M / 24.0, M);
      }
      named("mr4.ros.h", 4, dot(F.b, matvec(F.beta, matvec(bfs0, S.e))),
            M * M / 24.0, M * M);
      named("mr4.ros.i", 4, dot(F.b, matvec(bfs0, matvec(S.beta, S.e))),
            M / 24.0, M);
      {
        Vec acc(F.stages(), 0.0);
        for (std::size_t l = 0; l < mrm.micro_steps(); ++l) {
          Vec inner = F.e;
          for (auto& v : inner) v += static_cast<double>(l);
          acc = vadd(acc, matvec(mrm.coupling.alpha_fs[l] + mrm.coupling.gamma_fs[l],
                                 matvec(mrm.coupling.alpha_sf[l] + mrm.coupling.gamma_sf[l],
                                        inner)));
        }
        named("mr4.ros.j", 4, dot(F.b, acc), M * M * M / 24.0, M * M * M);
      }
    }
  }

  if (mode == ConditionMode::Row && order >= 3) {
    const Mat asf0 = sigma(CouplingBlock::AlphaSF, 0);
    const Mat asf1 = sigma(CouplingBlock::AlphaSF, 1);
    const Mat gsf0 = sigma(CouplingBlock::GammaSF, 0);
    const Mat gsf1 = sigma(CouplingBlock::GammaSF, 1);
    const Mat afs0 = sigma(CouplingBlock::AlphaFS, 0);
    const Mat gfs0 = sigma(CouplingBlock::GammaFS, 0);
    named("mr3.row.a", 3,
          dot(S.b, vadd(matvec(asf1, onef), matvec(asf0, F.c))), M * M / 6.0,
          M * M);
    named("mr3.row.b", 3, dot(F.b, matvec(afs0, S.c)), M / 6.0, M);
    named("mr3.row.c", 3,
          dot(S.b, vadd(matvec(gsf1, onef), matvec(gsf0, F.c))), 0.0, M * M);
    named("mr3.row.d", 3, dot(F.b, matvec(gfs0, S.c)), 0.0, M);
    named("mr3.row.e", 3, dot(S.b, matvec(asf0, F.g)), 0.0, M * M);
    named("mr3.row.f", 3, dot(F.b, matvec(afs0, S.g)), 0.0, M);
    named("mr3.row.g", 3, dot(S.b, matvec(gsf0, F.g)), 0.0, M * M);
    named("mr3.row.h", 3, dot(F.b, matvec(gfs0, S.g)), 0.0, M);
  }
}

}  // namespace

ConditionReport check_mr_order(const MultirateMethod& mrm, int order,
                               ConditionMode mode, double tol) {
  mrm.validate();
  if (mrm.flavor == Flavor::Spc)
    throw Error("check_mr_order: method '" + mrm.name +
                "' has the step-predictor-corrector flavor; use check_spc");
  if (order < 1 || order > 4) throw Error("check_mr_order: order must be 1..4");
  if (mode == ConditionMode::TimeLagged && order > 3) order = 3;

  ConditionReport rep;
  rep.tolerance = tol;
  rep.requested_order = order;

  const ConditionReport ic = check_internal_consistency(mrm, tol);
  const bool ic_ok = ic.preconditions_ok;
  rep.preconditions_ok = ic_ok;
  if (!ic_ok)
    rep.note = "internal consistency violated; reduced coupling conditions "
               "are not applicable";
  for (const auto& en : ic.entries) {
    ConditionEntry copy = en;
    copy.informational = true;
    rep.entries.push_back(std::move(copy));
  }

  MultirateOps ops(mrm);
  Catalogue(ops, rep).run(order, mode);
  add_named_mr_conditions(mrm, mode, order, ic_ok, rep);
  rep.finalize();
  return rep;
}

ConditionReport check_generic_gark(const AssembledTableau& tab, int order,
                                   ConditionMode mode, double tol) {
  if (order < 1 || order > 4)
    throw Error("check_generic_gark: order must be 1..4");
  if (mode == ConditionMode::TimeLagged && order > 3) order = 3;
  ConditionReport rep;
  rep.tolerance = tol;
  rep.requested_order = order;
  // single-partition embeddings reduce to the plain method conditions
  std::vector<std::vector<std::size_t>> parts;
  std::vector<std::string> names;
  for (auto [p, name] : {std::pair{Partition::Fast, "F"},
                         std::pair{Partition::Slow, "S"}}) {
    auto rows = tab.partition_rows(p);
    if (!rows.empty()) {
      parts.push_back(std::move(rows));
      names.emplace_back(name);
    }
  }
  if (parts.size() == 1) names = {""};
  GenericOps ops(tab.A, tab.G, tab.b, std::move(parts), std::move(names));
  Catalogue(ops, rep).run(order, mode);
  rep.finalize();
  return rep;
}

ConditionReport check_spc(const MultirateMethod& mrm, int order,
                          ConditionMode mode, double tol) {
  mrm.validate();
  if (mrm.flavor != Flavor::Spc)
    throw Error("check_spc: method '" + mrm.name +
                "' does not have the step-predictor-corrector flavor");
  if (order < 1 || order > 4) throw Error("check_spc: order must be 1..4");
  if (mode != ConditionMode::Ros && order > 3) {
    order = 3;  // only the exact-Jacobian order-4 coupling set is available
  }

  ConditionReport rep;
  rep.tolerance = tol;
  rep.requested_order = order;

  const ConditionReport ic = check_internal_consistency(mrm, tol);
  rep.preconditions_ok = ic.preconditions_ok;
  if (!ic.preconditions_ok)
    rep.note = "internal consistency violated; coupling conditions assume it";
  for (const auto& en : ic.entries) {
    ConditionEntry copy = en;
    copy.informational = true;
    rep.entries.push_back(std::move(copy));
  }

  auto absorb = [&](const ConditionReport& sub, const std::string& prefix) {
    for (const auto& en : sub.entries) {
      ConditionEntry copy = en;
      copy.id = prefix + copy.id;
      rep.entries.push_back(std::move(copy));
    }
  };
  absorb(check_base_ros(mrm.slow, order, mode, tol), "slow:");
  absorb(check_base_ros(mrm.fast, order, mode, tol), "fast:");

  const double M = static_cast<double>(mrm.micro_steps());
  const BaseMethod& S = mrm.slow;
  const BaseMethod& F = mrm.fast;
  auto named = [&](std::string id, int ord, double value, double target,
                   double scale) {
    ConditionEntry en;
    en.id = std::move(id);
    en.order = ord;
    en.target = target;
    en.value = value;
    en.residual = (value - target) / scale;
    en.applicable = ic.preconditions_ok;
    rep.entries.push_back(std::move(en));
  };

  const Mat afs0 = averaged_coupling(mrm, CouplingBlock::AlphaFS, 0);
  const Mat afs1 = averaged_coupling(mrm, CouplingBlock::AlphaFS, 1);
  const Mat gfs0 = averaged_coupling(mrm, CouplingBlock::GammaFS, 0);
  const Mat bfs0 = afs0 + gfs0;

  if (order >= 3) {
    if (mode == ConditionMode::Row) {
      named("spc3.row.ac", 3, dot(F.b, matvec(afs0, S.c)), M / 6.0, M);
      named("spc3.row.gc", 3, dot(F.b, matvec(gfs0, S.c)), 0.0, M);
      named("spc3.row.ag", 3, dot(F.b, matvec(afs0, S.g)), 0.0, M);
      named("spc3.row.gg", 3, dot(F.b, matvec(gfs0, S.g)), 0.0, M);
    } else {
      named("spc3.ros", 3, dot(F.b, matvec(bfs0, S.e)), M / 6.0, M);
      if (mode == ConditionMode::TimeLagged) {
        named("tl3.slow", 3, dot(S.b, S.c), 0.5, 1.0);
        named("tl3.fast", 3, dot(F.b, F.c), 0.5, 1.0);
      }
    }
  }
  if (order >= 4 && mode == ConditionMode::Ros) {
    named("spc4.ros.a", 4,
          dot(F.b, vadd(matvec(afs1, S.e), elemwise(matvec(afs0, S.e), F.c))),
          M * M / 8.0, M * M);
    named("spc4.ros.b", 4, dot(F.b, matvec(bfs0, elemwise(S.c, S.c))),
          M / 12.0, M);
    {
      // sum over micro-steps of all earlier couplings plus beta^FF * Sigma0.
      Mat acc(F.stages(), S.stages());
      for (std::size_t l = 0; l < mrm.micro_steps(); ++l) {
        const double w = static_cast<double>(mrm.micro_steps() - 1 - l);
        acc += (mrm.coupling.alpha_fs[l] + mrm.coupling.gamma_fs[l]) * w;
      }
      acc += F.beta * bfs0;
      named("spc4.ros.c", 4, dot(F.b, matvec(acc, S.e)), M * M / 24.0, M * M);
    }
    named("spc4.ros.d", 4, dot(F.b, matvec(bfs0, matvec(S.beta, S.e))),
          M / 24.0, M);
  }

  rep.finalize();
  return rep;
}

StiffAccuracyResult check_stiff_accuracy(const MultirateMethod& mrm,
                                         double tol) {
  mrm.validate();
  const std::size_t M = mrm.micro_steps();
  const std::size_t sF = mrm.fast_stages();
  const Mat beta_fs_last =
      mrm.coupling.alpha_fs[M - 1] + mrm.coupling.gamma_fs[M - 1];
  const BaseMethod& flast = mrm.fast_step(M);

  StiffAccuracyResult r;
  for (std::size_t j = 0; j < mrm.slow_stages(); ++j)
    r.residual_slow = std::max(
        r.residual_slow, std::abs(mrm.slow.b[j] - beta_fs_last(sF - 1, j)));
  for (std::size_t j = 0; j < sF; ++j)
    r.residual_fast = std::max(
        r.residual_fast, std::abs(flast.b[j] - flast.beta(sF - 1, j)));
  r.stiffly_accurate =
      std::max(r.residual_slow, r.residual_fast) <= tol;
  return r;
}

}  // namespace mrgark

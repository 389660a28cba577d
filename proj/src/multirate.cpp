#include "mrgark/multirate.hpp"

#include <cmath>

namespace mrgark {

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::General: return "general";
    case Flavor::Imex: return "imex";
    case Flavor::CompoundFirstStep: return "compound_first_step";
    case Flavor::Spc: return "spc";
    case Flavor::Decoupled: return "decoupled";
  }
  return "general";
}

Flavor flavor_from_string(const std::string& s) {
  if (s == "general") return Flavor::General;
  if (s == "imex") return Flavor::Imex;
  if (s == "compound_first_step") return Flavor::CompoundFirstStep;
  if (s == "spc") return Flavor::Spc;
  if (s == "decoupled") return Flavor::Decoupled;
  throw Error("unknown flavor '" + s + "'");
}

CouplingSet CouplingSet::zero(std::size_t M, std::size_t sF, std::size_t sS) {
  CouplingSet cs;
  cs.micro_steps = M;
  cs.alpha_fs.assign(M, Mat(sF, sS));
  cs.gamma_fs.assign(M, Mat(sF, sS));
  cs.alpha_sf.assign(M, Mat(sS, sF));
  cs.gamma_sf.assign(M, Mat(sS, sF));
  return cs;
}

namespace {

void require_dims(const std::vector<Mat>& ms, std::size_t r, std::size_t c,
                  std::size_t M, const char* what) {
  if (ms.size() != M)
    throw Error(std::string("coupling block ") + what + ": expected " +
                std::to_string(M) + " micro-step matrices, got " +
                std::to_string(ms.size()));
  for (const Mat& m : ms)
    if (m.rows() != r || m.cols() != c)
      throw Error(std::string("coupling block ") + what +
                  ": dimension mismatch (want " + std::to_string(r) + "x" +
                  std::to_string(c) + ", got " + std::to_string(m.rows()) +
                  "x" + std::to_string(m.cols()) + ")");
}

}  // namespace

void MultirateMethod::validate() const {
  const std::size_t M = micro_steps();
  const std::size_t sF = fast_stages();
  const std::size_t sS = slow_stages();
  if (M == 0) throw Error("method '" + name + "': micro step count is zero");
  if (fast_tail && fast_tail->stages() != sF)
    throw Error("method '" + name + "': fast tail stage count differs");
  require_dims(coupling.alpha_fs, sF, sS, M, "alphaFS");
  require_dims(coupling.gamma_fs, sF, sS, M, "gammaFS");
  require_dims(coupling.alpha_sf, sS, sF, M, "alphaSF");
  require_dims(coupling.gamma_sf, sS, sF, M, "gammaSF");
  if (micro_fractions.size() != M)
    throw Error("method '" + name + "': micro fraction count mismatch");
  double sum = 0.0;
  for (double r : micro_fractions) {
    if (r < 0.0) throw Error("method '" + name + "': negative micro fraction");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error("method '" + name + "': micro fractions do not sum to 1");

  if (flavor == Flavor::Spc) return;  // structure matrix does not apply

  const Mat S = structure_matrix(*this);
  const auto nonzero = [&](std::size_t r, std::size_t c) {
    return S(r, c) != 0.0;
  };
  bool any = false, off_pairs = false;
  for (std::size_t r = 0; r < S.rows(); ++r)
    for (std::size_t c = 0; c < S.cols(); ++c)
      if (nonzero(r, c)) {
        any = true;
        if (!(r < sF && r == c)) off_pairs = true;
      }
  switch (flavor) {
    case Flavor::Imex:
      for (std::size_t l = 0; l < M; ++l) {
        if (!fast_step(l + 1).explicit_method())
          throw Error("method '" + name +
                      "': imex flavor needs an explicit fast base");
        if (coupling.gamma_fs[l].max_abs() != 0.0)
          throw Error("method '" + name +
                      "': imex flavor needs gammaFS = 0");
      }
      if (any)
        throw Error("method '" + name +
                    "': imex flavor requires a zero structure matrix");
      break;
    case Flavor::Decoupled:
      if (any)
        throw Error("method '" + name +
                    "': decoupled flavor requires a zero structure matrix");
      break;
    case Flavor::CompoundFirstStep:
      if (off_pairs)
        throw Error("method '" + name +
                    "': compound_first_step flavor couples stages outside the "
                    "first micro-step diagonal pairs");
      break;
    default:
      break;
  }
}

std::vector<std::size_t> AssembledTableau::partition_rows(Partition p) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i].part == p) idx.push_back(i);
  return idx;
}

namespace {

void put_block(Mat& dst, std::size_t r0, std::size_t c0, const Mat& blk,
               double scale = 1.0) {
  for (std::size_t i = 0; i < blk.rows(); ++i)
    for (std::size_t j = 0; j < blk.cols(); ++j)
      dst(r0 + i, c0 + j) = scale * blk(i, j);
}

AssembledTableau assemble_standard(const MultirateMethod& mrm) {
  const std::size_t M = mrm.micro_steps();
  const std::size_t sF = mrm.fast_stages();
  const std::size_t sS = mrm.slow_stages();
  const std::size_t n = M * sF + sS;
  const Vec& rho = mrm.micro_fractions;

  AssembledTableau t;
  t.A = Mat(n, n);
  t.G = Mat(n, n);
  t.b.assign(n, 0.0);
  t.labels.resize(n);

  for (std::size_t l = 0; l < M; ++l) {
    const BaseMethod& fl = mrm.fast_step(l + 1);
    const std::size_t r0 = l * sF;
    // completed micro-steps enter through their weights
    for (std::size_t m = 0; m < l; ++m) {
      Mat onebT(sF, sF);
      for (std::size_t i = 0; i < sF; ++i)
        for (std::size_t j = 0; j < sF; ++j)
          onebT(i, j) = mrm.fast_step(m + 1).b[j];
      put_block(t.A, r0, m * sF, onebT, rho[m]);
    }
    put_block(t.A, r0, r0, fl.alpha, rho[l]);
    put_block(t.G, r0, r0, fl.gamma, rho[l]);
    put_block(t.A, r0, M * sF, mrm.coupling.alpha_fs[l]);
    put_block(t.G, r0, M * sF, mrm.coupling.gamma_fs[l]);
    put_block(t.A, M * sF, r0, mrm.coupling.alpha_sf[l], rho[l]);
    put_block(t.G, M * sF, r0, mrm.coupling.gamma_sf[l], rho[l]);
    for (std::size_t i = 0; i < sF; ++i) {
      t.b[r0 + i] = rho[l] * fl.b[i];
      t.labels[r0 + i] = StageLabel{Partition::Fast, l + 1, i, false};
    }
  }
  put_block(t.A, M * sF, M * sF, mrm.slow.alpha);
  put_block(t.G, M * sF, M * sF, mrm.slow.gamma);
  for (std::size_t i = 0; i < sS; ++i) {
    t.b[M * sF + i] = mrm.slow.b[i];
    t.labels[M * sF + i] = StageLabel{Partition::Slow, 0, i, false};
  }

  if (mrm.has_embedded()) {
    Vec bh(n, 0.0);
    for (std::size_t l = 0; l < M; ++l)
      for (std::size_t i = 0; i < sF; ++i)
        bh[l * sF + i] = rho[l] * (*mrm.fast_step(l + 1).b_hat)[i];
    for (std::size_t i = 0; i < sS; ++i) bh[M * sF + i] = (*mrm.slow.b_hat)[i];
    t.b_hat = std::move(bh);
  }
  return t;
}

// SPC layout: [predictor block (sS, fast partition) | M fast micro blocks |
// slow block]. Predictor and slow rows carry identical coefficient rows; the
// predictor rows evaluate the fast function, the slow rows the slow one.
AssembledTableau assemble_spc(const MultirateMethod& mrm) {
  const std::size_t M = mrm.micro_steps();
  const std::size_t sF = mrm.fast_stages();
  const std::size_t sS = mrm.slow_stages();
  const std::size_t n = sS + M * sF + sS;
  const std::size_t slow0 = sS + M * sF;
  const Vec& rho = mrm.micro_fractions;

  AssembledTableau t;
  t.A = Mat(n, n);
  t.G = Mat(n, n);
  t.b.assign(n, 0.0);
  t.labels.resize(n);

  for (std::size_t r0 : {std::size_t{0}, slow0}) {
    put_block(t.A, r0, 0, mrm.slow.alpha);
    put_block(t.G, r0, 0, mrm.slow.gamma);
    put_block(t.A, r0, slow0, mrm.slow.alpha);
    put_block(t.G, r0, slow0, mrm.slow.gamma);
  }
  for (std::size_t i = 0; i < sS; ++i) {
    t.labels[i] = StageLabel{Partition::Fast, 0, i, true};
    t.labels[slow0 + i] = StageLabel{Partition::Slow, 0, i, false};
    t.b[slow0 + i] = mrm.slow.b[i];
  }

  for (std::size_t l = 0; l < M; ++l) {
    const BaseMethod& fl = mrm.fast_step(l + 1);
    const std::size_t r0 = sS + l * sF;
    for (std::size_t m = 0; m < l; ++m) {
      Mat onebT(sF, sF);
      for (std::size_t i = 0; i < sF; ++i)
        for (std::size_t j = 0; j < sF; ++j)
          onebT(i, j) = mrm.fast_step(m + 1).b[j];
      put_block(t.A, r0, sS + m * sF, onebT, rho[m]);
    }
    put_block(t.A, r0, r0, fl.alpha, rho[l]);
    put_block(t.G, r0, r0, fl.gamma, rho[l]);
    put_block(t.A, r0, slow0, mrm.coupling.alpha_fs[l]);
    put_block(t.G, r0, slow0, mrm.coupling.gamma_fs[l]);
    for (std::size_t i = 0; i < sF; ++i) {
      t.b[r0 + i] = rho[l] * fl.b[i];
      t.labels[r0 + i] = StageLabel{Partition::Fast, l + 1, i, false};
    }
  }

  if (mrm.has_embedded()) {
    Vec bh(n, 0.0);
    for (std::size_t l = 0; l < M; ++l)
      for (std::size_t i = 0; i < sF; ++i)
        bh[sS + l * sF + i] = rho[l] * (*mrm.fast_step(l + 1).b_hat)[i];
    for (std::size_t i = 0; i < sS; ++i) bh[slow0 + i] = (*mrm.slow.b_hat)[i];
    t.b_hat = std::move(bh);
  }
  return t;
}

}  // namespace

AssembledTableau assemble_gark(const MultirateMethod& mrm) {
  mrm.validate();
  return mrm.flavor == Flavor::Spc ? assemble_spc(mrm) : assemble_standard(mrm);
}

Mat structure_matrix(const MultirateMethod& mrm) {
  const std::size_t M = mrm.micro_steps();
  const std::size_t sF = mrm.fast_stages();
  const std::size_t sS = mrm.slow_stages();
  Mat S(M * sF, sS);
  for (std::size_t l = 0; l < M; ++l) {
    const double rho = mrm.micro_fractions[l];
    for (std::size_t i = 0; i < sF; ++i)
      for (std::size_t j = 0; j < sS; ++j) {
        const double sf = rho * (std::abs(mrm.coupling.alpha_sf[l](j, i)) +
                                 std::abs(mrm.coupling.gamma_sf[l](j, i)));
        const double fs = std::abs(mrm.coupling.alpha_fs[l](i, j)) +
                          std::abs(mrm.coupling.gamma_fs[l](i, j));
        S(l * sF + i, j) = sf * fs;
      }
  }
  return S;
}

Mat averaged_coupling(const MultirateMethod& mrm, CouplingBlock which,
                      std::size_t k) {
  if (k > 3) throw Error("averaged_coupling: moment index k must be <= 3");
  const std::vector<Mat>* blocks = nullptr;
  switch (which) {
    case CouplingBlock::AlphaFS: blocks = &mrm.coupling.alpha_fs; break;
    case CouplingBlock::GammaFS: blocks = &mrm.coupling.gamma_fs; break;
    case CouplingBlock::AlphaSF: blocks = &mrm.coupling.alpha_sf; break;
    case CouplingBlock::GammaSF: blocks = &mrm.coupling.gamma_sf; break;
  }
  Mat sum((*blocks)[0].rows(), (*blocks)[0].cols());
  for (std::size_t l = 0; l < mrm.micro_steps(); ++l) {
    double w = 1.0;
    for (std::size_t p = 0; p < k; ++p) w *= static_cast<double>(l);
    sum += (*blocks)[l] * w;
  }
  return sum;
}

std::vector<Vec> intermediate_solution_weights(const MultirateMethod& mrm,
                                               std::size_t lambda) {
  if (lambda > mrm.micro_steps())
    throw Error("intermediate_solution_weights: micro-step index " +
                std::to_string(lambda) + " out of range");
  std::vector<Vec> w;
  w.reserve(lambda);
  for (std::size_t l = 1; l <= lambda; ++l) w.push_back(mrm.fast_step(l).b);
  return w;
}

}  // namespace mrgark

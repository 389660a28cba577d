#include "mrgark/tableau_io.hpp"

#include <fstream>
#include <sstream>

namespace mrgark {

namespace {

void write_matrix(std::ostream& os, const Mat& m) {
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      os << (j ? " " : "") << buf;
    }
    os << '\n';
  }
}

void write_vec(std::ostream& os, const Vec& v) {
  char buf[32];
  for (std::size_t j = 0; j < v.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", v[j]);
    os << (j ? " " : "") << buf;
  }
  os << '\n';
}

Mat read_matrix(std::istream& is, std::size_t r, std::size_t c,
                const char* what) {
  Mat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      if (!(is >> m(i, j)))
        throw Error(std::string("tableau file: truncated ") + what);
  return m;
}

Vec read_vec(std::istream& is, std::size_t n, const char* what) {
  Vec v(n);
  for (std::size_t j = 0; j < n; ++j)
    if (!(is >> v[j]))
      throw Error(std::string("tableau file: truncated ") + what);
  return v;
}

void write_base_block(std::ostream& os, const BaseMethod& b) {
  write_matrix(os, b.alpha);
  write_matrix(os, b.gamma);
  write_vec(os, b.b);
  os << "bhat " << (b.b_hat ? 1 : 0) << '\n';
  if (b.b_hat) write_vec(os, *b.b_hat);
}

BaseMethod read_base_block(std::istream& is, std::size_t s,
                           const std::string& name) {
  Mat alpha = read_matrix(is, s, s, "alpha");
  Mat gamma = read_matrix(is, s, s, "gamma");
  Vec b = read_vec(is, s, "b");
  std::string tag;
  int flag = 0;
  if (!(is >> tag >> flag) || tag != "bhat")
    throw Error("tableau file: expected 'bhat 0|1' line");
  std::optional<Vec> bh;
  if (flag) bh = read_vec(is, s, "bhat");
  return BaseMethod::make(name, std::move(alpha), std::move(gamma),
                          std::move(b), std::move(bh));
}

}  // namespace

void save_tableau(std::ostream& os, const BaseMethod& base) {
  os << base.stages() << " 0 0 0 base\n";
  write_base_block(os, base);
}

void save_tableau(std::ostream& os, const MultirateMethod& mrm) {
  mrm.validate();
  const std::size_t M = mrm.micro_steps();
  os << M * mrm.fast_stages() + mrm.slow_stages() << ' ' << M << ' '
     << mrm.fast_stages() << ' ' << mrm.slow_stages() << ' '
     << to_string(mrm.flavor) << '\n';
  write_base_block(os, mrm.slow);
  write_base_block(os, mrm.fast);
  os << "fast_tail " << (mrm.fast_tail ? 1 : 0) << '\n';
  if (mrm.fast_tail) write_base_block(os, *mrm.fast_tail);
  os << "fractions\n";
  write_vec(os, mrm.micro_fractions);
  for (std::size_t l = 0; l < M; ++l) {
    write_matrix(os, mrm.coupling.alpha_fs[l]);
    write_matrix(os, mrm.coupling.gamma_fs[l]);
    write_matrix(os, mrm.coupling.alpha_sf[l]);
    write_matrix(os, mrm.coupling.gamma_sf[l]);
  }
}

void save_tableau_file(const std::string& path, const BaseMethod& base) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write tableau file '" + path + "'");
  save_tableau(os, base);
}

void save_tableau_file(const std::string& path, const MultirateMethod& mrm) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write tableau file '" + path + "'");
  save_tableau(os, mrm);
}

BaseMethod load_base_tableau(std::istream& is, const std::string& name) {
  std::size_t s, M, sF, sS;
  std::string flavor;
  if (!(is >> s >> M >> sF >> sS >> flavor))
    throw Error("tableau file: bad header");
  if (flavor != "base")
    throw Error("tableau file: expected flavor 'base', got '" + flavor + "'");
  return read_base_block(is, s, name);
}

BaseMethod load_base_tableau_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open tableau file '" + path + "'");
  return load_base_tableau(is, path);
}

MultirateMethod load_multirate_tableau(std::istream& is,
                                       const std::string& name) {
  std::size_t s, M, sF, sS;
  std::string flavor;
  if (!(is >> s >> M >> sF >> sS >> flavor))
    throw Error("tableau file: bad header");
  if (flavor == "base")
    throw Error("tableau file: holds a base method, not a multirate method");
  if (s != M * sF + sS)
    throw Error("tableau file: header stage count inconsistent");
  MultirateMethod mrm;
  mrm.name = name;
  mrm.flavor = flavor_from_string(flavor);
  mrm.slow = read_base_block(is, sS, name + ":slow");
  mrm.fast = read_base_block(is, sF, name + ":fast");
  {
    std::string tag;
    int flag = 0;
    if (!(is >> tag >> flag) || tag != "fast_tail")
      throw Error("tableau file: expected 'fast_tail 0|1' line");
    if (flag) mrm.fast_tail = read_base_block(is, sF, name + ":fast_tail");
    if (!(is >> tag) || tag != "fractions")
      throw Error("tableau file: expected 'fractions' line");
    mrm.micro_fractions = read_vec(is, M, "fractions");
  }
  mrm.coupling = CouplingSet::zero(M, sF, sS);
  for (std::size_t l = 0; l < M; ++l) {
    mrm.coupling.alpha_fs[l] = read_matrix(is, sF, sS, "alphaFS");
    mrm.coupling.gamma_fs[l] = read_matrix(is, sF, sS, "gammaFS");
    mrm.coupling.alpha_sf[l] = read_matrix(is, sS, sF, "alphaSF");
    mrm.coupling.gamma_sf[l] = read_matrix(is, sS, sF, "gammaSF");
  }
  mrm.validate();
  return mrm;
}

MultirateMethod load_multirate_tableau_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open tableau file '" + path + "'");
  return load_multirate_tableau(is, path);
}

}  // namespace mrgark

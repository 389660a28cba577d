#include "mrgark/base_method.hpp"

namespace mrgark {

bool BaseMethod::single_lu() const {
  const std::size_t s = stages();
  for (std::size_t i = 1; i < s; ++i)
    if (gamma(i, i) != gamma(0, 0)) return false;
  return true;
}

BaseMethod BaseMethod::make(std::string name, Mat alpha, Mat gamma, Vec b,
                            std::optional<Vec> b_hat) {
  const std::size_t s = b.size();
  if (alpha.rows() != s || alpha.cols() != s || gamma.rows() != s ||
      gamma.cols() != s)
    throw Error("BaseMethod '" + name + "': coefficient dimensions disagree");
  if (b_hat && b_hat->size() != s)
    throw Error("BaseMethod '" + name + "': embedded weight length mismatch");
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i; j < s; ++j)
      if (alpha(i, j) != 0.0)
        throw Error("BaseMethod '" + name + "': alpha(" + std::to_string(i) +
                    "," + std::to_string(j) + ") must be zero");
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j)
      if (gamma(i, j) != 0.0)
        throw Error("BaseMethod '" + name + "': gamma(" + std::to_string(i) +
                    "," + std::to_string(j) + ") must be zero");

  BaseMethod m;
  m.name = std::move(name);
  m.alpha = std::move(alpha);
  m.gamma = std::move(gamma);
  m.b = std::move(b);
  m.b_hat = std::move(b_hat);
  m.beta = m.alpha + m.gamma;
  m.c = matvec(m.alpha, ones(s));
  m.g = matvec(m.gamma, ones(s));
  m.e = matvec(m.beta, ones(s));
  return m;
}

BaseMethod kutta3_ros(double gamma, double beta21) {
  if (beta21 == 0.0) throw Error("kutta3_ros: beta21 must be nonzero");
  if (gamma == 0.0) throw Error("kutta3_ros: gamma must be nonzero");
  Mat a(3, 3), g(3, 3);
  a(1, 0) = 0.5;
  a(2, 0) = -1.0;
  a(2, 1) = 2.0;
  const double beta32 = (6.0 * (gamma * gamma - gamma) + 1.0) / beta21;
  const double beta31 = 3.0 - 6.0 * gamma - 4.0 * beta21 - beta32;
  g(0, 0) = gamma;
  g(1, 0) = beta21 - a(1, 0);
  g(1, 1) = gamma;
  g(2, 0) = beta31 - a(2, 0);
  g(2, 1) = beta32 - a(2, 1);
  g(2, 2) = gamma;
  Vec b{1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
  const double q = (1.0 - 2.0 * gamma) / (2.0 * beta21);
  Vec bh{1.0 - q, q, 0.0};
  return BaseMethod::make("kutta3-ros", a, g, b, bh);
}

BaseMethod kutta3_explicit_first(double mu, double delta) {
  if (mu == 0.0) throw Error("kutta3_explicit_first: mu must be nonzero");
  Mat a(3, 3), g(3, 3);
  a(1, 0) = 0.5;
  a(2, 0) = -1.0;
  a(2, 1) = 2.0;
  // Row sums g = [0, delta, -4 delta] keep b^T g = 0; the third-order
  // condition b^T beta e = 1/6 fixes gamma32 given the diagonal mu.
  g(1, 1) = mu;
  g(1, 0) = delta - mu;
  g(2, 2) = mu;
  const Vec b{1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
  const Vec e{0.0, 0.5 + delta, 1.0 - 4.0 * delta};
  // b^T beta e with beta32 = 2 + g32 unknown:
  //   b2*(beta21*e1 + mu*e2) + b3*(beta31*e1 + (2+g32)*e2 + mu*e3) = 1/6.
  const double beta21 = a(1, 0) + g(1, 0);
  const double lhs_wo =
      b[1] * (beta21 * e[0] + mu * e[1]) + b[2] * (2.0 * e[1] + mu * e[2]);
  const double g32 = (1.0 / 6.0 - lhs_wo) / (b[2] * e[1]);
  g(2, 1) = g32;
  g(2, 0) = -4.0 * delta - g32 - mu;
  return BaseMethod::make("kutta3-xf", a, g, b);
}

BaseMethod kutta3_erk() {
  Mat a(3, 3), g(3, 3);
  a(1, 0) = 0.5;
  a(2, 0) = -1.0;
  a(2, 1) = 2.0;
  return BaseMethod::make("kutta3-erk", a, g, Vec{1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0});
}

BaseMethod rk4_erk() {
  Mat a(4, 4), g(4, 4);
  a(1, 0) = 0.5;
  a(2, 1) = 0.5;
  a(3, 2) = 1.0;
  return BaseMethod::make(
      "rk4", a, g, Vec{1.0 / 6.0, 2.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0});
}

BaseMethod ros34pw2() {
  const double gd = 4.358665215084597e-01;
  Mat a(4, 4), g(4, 4);
  a(1, 0) = 8.7173304301691801e-01;
  a(2, 0) = 8.4457060015369423e-01;
  a(2, 1) = -1.1299064236484185e-01;
  a(3, 0) = 0.0;
  a(3, 1) = 0.0;
  a(3, 2) = 1.0;
  g(0, 0) = gd;
  g(1, 0) = -8.7173304301691801e-01;
  g(1, 1) = gd;
  g(2, 0) = -9.0338057013044082e-01;
  g(2, 1) = 5.4180672388095326e-02;
  g(2, 2) = gd;
  g(3, 0) = 2.4212380706095346e-01;
  g(3, 1) = -1.2232505839045147e+00;
  g(3, 2) = 5.4526025533510214e-01;
  g(3, 3) = gd;
  Vec b{2.4212380706095346e-01, -1.2232505839045147e+00,
        1.5452602553351020e+00, 4.3586652150845900e-01};
  Vec bh{3.7810903145819369e-01, -9.6042292212423178e-02, 0.5,
         2.1793326075422950e-01};
  return BaseMethod::make("ros34pw2", a, g, b, bh);
}

BaseMethod implicit_euler_ros(double g) {
  Mat a(1, 1), gm(1, 1);
  gm(0, 0) = g;
  return BaseMethod::make("lie", a, gm, Vec{1.0});
}

BaseMethod ros2(double gd) {
  Mat a(2, 2), g(2, 2);
  a(1, 0) = 2.0 / 3.0;
  g(0, 0) = gd;
  g(1, 0) = -4.0 / 3.0 * gd;  // keeps b^T g = 0
  g(1, 1) = gd;
  return BaseMethod::make("ros2", a, g, Vec{0.25, 0.75});
}

BaseMethod ros2_explicit_first(double gd) {
  Mat a(2, 2), g(2, 2);
  a(1, 0) = 2.0 / 3.0;
  g(1, 0) = -gd;
  g(1, 1) = gd;
  return BaseMethod::make("ros2-xf", a, g, Vec{0.25, 0.75});
}

}  // namespace mrgark

#include "halfline/fixtures.hpp"

#include <initializer_list>

#include "halfline/linalg.hpp"

namespace halfline {
namespace {

using G = GaussianRational;

G re(const Rational& x) { return G(x); }
G im(const Rational& x) { return G(Rational(0), x); }

ExactMatrix mat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<G> entries) {
  ExactMatrix m(rows, cols);
  auto it = entries.begin();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

ExactMatrix identity(Eigen::Index n) { return ExactMatrix::Identity(n, n); }

Rational exact_param(double v, const char* name) {
  G g;
  if (!G::rationalize(v, 1000000, 1e-12, g))
    throw ValidationError(std::string("fixture parameter ") + name + " must be a rational with small denominator");
  return g.real();
}

ExampleFixture delta_prime(const FixtureParams& p) {
  const Rational a = exact_param(p.a, "a");
  ExampleFixture f;
  f.id = "7.1";
  f.title = "delta-prime boundary condition";
  f.params = p;
  f.a = mat(3, 3, {1, 0, re(-a), -1, 1, 0, 0, -1, 0});
  f.b = mat(3, 3, {0, 0, -1, 0, 0, -1, 0, 0, -1});
  f.j0 = f.b;
  f.j1 = mat(3, 3, {im(-1), 0, im(a), im(1), im(-1), 0, 0, im(1), 0});
  f.s_printed = [a](const G& k) {
    const G den = im(3) + re(a) * k;
    const G diag = (im(1) + re(a) * k) / den;
    const G off = im(-2) / den;
    return mat(3, 3, {diag, off, off, off, diag, off, off, off, diag});
  };
  const G third = re(Rational(1, 3));
  const G m2third = re(Rational(-2, 3));
  f.s0_printed = mat(3, 3, {third, m2third, m2third, m2third, third, m2third, m2third, m2third, third});
  f.mu = 2;
  f.nu = 2;
  f.p1 = identity(3);
  f.p2 = identity(3);
  f.smat = mat(3, 3, {1, 0, 1, 0, 1, 1, 0, 0, 1});
  f.a1 = mat(2, 2, {im(-1), im(-1), im(1), im(-2)});
  f.b1 = mat(2, 1, {im(a - 2), im(-1)});
  f.c1 = mat(1, 2, {0, im(1)});
  f.d0 = mat(1, 1, {-1});
  return f;
}

ExampleFixture kirchhoff() {
  ExampleFixture f;
  f.id = "7.2";
  f.title = "Kirchhoff boundary condition";
  f.a = mat(3, 3, {0, 0, 1, 0, 0, 1, 0, 0, 1});
  f.b = mat(3, 3, {-1, 0, 0, 1, -1, 0, 0, 1, 0});
  f.j0 = f.b;
  f.j1 = mat(3, 3, {0, 0, im(-1), 0, 0, im(-1), 0, 0, im(-1)});
  const G t1 = re(Rational(1, 3));
  const G t2 = re(Rational(2, 3));
  // Printed as S(k) = S(0); the last row is not consistent with the printed J(k).
  f.s0_printed = mat(3, 3, {-t1, t2, t2, t2, -t1, t2, t2, -t2, t1});
  f.s_printed = [s = f.s0_printed](const G&) { return s; };
  f.s0_printed_suspect = true;
  f.mu = 1;
  f.nu = 1;
  f.p1 = identity(3);
  f.p2 = identity(3);
  return f;
}

ExampleFixture xor_gate(const FixtureParams& p) {
  const Rational a = exact_param(p.a, "a");
  if (a == 0) throw ValidationError("fixture parameter a must be nonzero");
  ExampleFixture f;
  f.id = "7.3";
  f.title = "XOR gate boundary condition";
  f.params = p;
  const G ia = im(1 / a);
  const G ia2 = im(1 / (2 * a));
  const G h = re(Rational(1, 2));
  f.a = mat(4, 4, {ia, 0, 0, 0, 0, ia, 0, ia2, 0, 0, ia2, ia2, 0, 0, ia2, ia2});
  f.b = mat(4, 4, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -h, h, 0, 0, h, -h});
  // Printed J(k): entries k/a, k/(2a), (k + a)/(2a), (k - a)/(2a).
  const G ka = re(1 / a);
  const G k2a = re(1 / (2 * a));
  f.j0 = mat(4, 4, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, h, h, 0, 0, h, -h});
  f.j1 = mat(4, 4, {ka, 0, 0, 0, 0, ka, 0, k2a, 0, 0, k2a, k2a, 0, 0, k2a, k2a});
  const ExactMatrix swap = mat(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
  f.s_printed = [swap](const G&) { return swap; };
  f.s0_printed = swap;
  f.mu = 3;
  f.nu = 3;
  f.p1 = identity(4);
  f.p2 = identity(4);
  f.smat = mat(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 1, 1});
  f.a1 = mat(3, 3, {ka, 0, 0, 0, ka, k2a, 0, 0, ka});
  f.b1 = mat(3, 1, {0, k2a, 0});
  f.c1 = mat(1, 3, {0, 0, 0});
  f.d0 = mat(1, 1, {-1});
  return f;
}

ExampleFixture example_74(const FixtureParams& p) {
  const Rational a = exact_param(p.a, "a");
  const Rational b = exact_param(p.b, "b");
  const Rational c = exact_param(p.c, "c");
  if (b == 0) throw ValidationError("fixture parameter b must be nonzero (A must be invertible)");
  ExampleFixture f;
  f.id = "7.4";
  f.title = "two zero Jordan chains of different length";
  f.params = p;
  f.a = mat(3, 3, {2, 1, re(a), 0, 0, re(b), 1, 1, re(c)});
  f.b = mat(3, 3, {0, 0, 0, 0, 0, 1, 0, 0, 0});
  f.j0 = f.b;
  f.j1 = mat(3, 3, {im(-2), im(-1), im(-a), 0, 0, im(-b), im(-1), im(-1), im(-c)});
  f.s_printed = [b](const G& k) {
    const G mid = (im(-1) + re(b) * k) / (im(1) + re(b) * k);
    return mat(3, 3, {1, 0, 0, 0, mid, 0, 0, 0, 1});
  };
  f.s0_printed = mat(3, 3, {1, 0, 0, 0, -1, 0, 0, 0, 1});
  f.mu = 2;
  f.nu = 3;
  f.p1 = identity(3);
  f.p2 = mat(3, 3, {1, 0, 0, 0, 0, 1, 0, 1, 0});
  f.smat = identity(3);
  f.a1 = mat(2, 2, {im(-2), im(-1), im(-1), im(-1)});
  f.b1 = mat(2, 1, {im(-a), im(-c)});
  f.c1 = mat(1, 2, {0, 0});
  f.d0 = mat(1, 1, {1});
  return f;
}

}  // namespace

FixtureParams default_fixture_params(const std::string& id) {
  if (id == "7.1") return {2.0, 1.0, 1.0};
  return {1.0, 1.0, 1.0};
}

std::vector<std::string> example_ids() { return {"7.1", "7.2", "7.3", "7.4"}; }

ExampleFixture example_fixture(const std::string& id, const FixtureParams& params) {
  if (id == "7.1") return delta_prime(params);
  if (id == "7.2") return kirchhoff();
  if (id == "7.3") return xor_gate(params);
  if (id == "7.4") return example_74(params);
  throw ValidationError("unknown example id '" + id + "' (expected 7.1, 7.2, 7.3 or 7.4)");
}

ExactMatrix exact_free_jost(const ExactMatrix& a, const ExactMatrix& b, const GaussianRational& k) {
  return b - (kImagUnit * k) * a;
}

std::optional<ExactMatrix> exact_free_smatrix(const ExactMatrix& a, const ExactMatrix& b, const GaussianRational& k) {
  auto inv = linalg::try_inverse<GaussianRational>(exact_free_jost(a, b, k));
  if (!inv) return std::nullopt;
  return ExactMatrix(-exact_free_jost(a, b, -k) * *inv);
}

Matrix limit_oracle(const ExactMatrix& j0, const ExactMatrix& j1, const Rational& h) {
  auto s_at = [&](const Rational& k) {
    const G kk(k);
    auto inv = linalg::try_inverse<GaussianRational>(ExactMatrix(j0 + kk * j1));
    if (!inv) throw NumericalError("J(k) is singular at the oracle step");
    return ExactMatrix(-(j0 - kk * j1) * *inv);
  };
  const ExactMatrix s = G(2) * s_at(h) - s_at(2 * h);
  return to_numeric(s);
}

}  // namespace halfline

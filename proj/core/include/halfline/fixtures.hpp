#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "halfline/types.hpp"

namespace halfline {

/// Free parameters of the worked examples. Example 7.1 uses only a;
/// Examples 7.3 and 7.4 use a (and b, c for 7.4).
struct FixtureParams {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
};

FixtureParams default_fixture_params(const std::string& id);

/// Printed data of one worked example, stored exactly. All of them have V = 0.
struct ExampleFixture {
  std::string id;
  std::string title;
  FixtureParams params;
  ExactMatrix a, b;            // boundary pair
  ExactMatrix j0, j1;          // printed J(k) = j0 + k j1
  std::function<ExactMatrix(const GaussianRational&)> s_printed;  // printed S(k)
  ExactMatrix s0_printed;
  int mu = 0;
  int nu = 0;
  ExactMatrix p1, p2;
  // Printed basis and blocks, when they are rational.
  std::optional<ExactMatrix> smat, a1, b1, c1, d0;
  /// True when the printed S(0) is known to disagree with the limit of the
  /// printed S(k) (Example 7.2).
  bool s0_printed_suspect = false;
};

std::vector<std::string> example_ids();

/// Throws ValidationError for an unknown id or non-rational parameters.
ExampleFixture example_fixture(const std::string& id, const FixtureParams& params);
inline ExampleFixture example_fixture(const std::string& id) {
  return example_fixture(id, default_fixture_params(id));
}

/// J(k) = B - ikA for V = 0, exactly.
ExactMatrix exact_free_jost(const ExactMatrix& a, const ExactMatrix& b, const GaussianRational& k);

/// -J(-k) J(k)^{-1} exactly; nullopt when J(k) is singular.
std::optional<ExactMatrix> exact_free_smatrix(const ExactMatrix& a, const ExactMatrix& b, const GaussianRational& k);

/// lim S(k) as k -> 0 from a linear J(k) = j0 + k j1, by exact evaluation at
/// k = h and 2h followed by one Richardson step. Independent of the Jordan
/// pipeline; error O(h^2).
Matrix limit_oracle(const ExactMatrix& j0, const ExactMatrix& j1, const Rational& h = Rational(1, 1000000));

}  // namespace halfline

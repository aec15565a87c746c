#include <cmath>
#include <string>

#include "doctest.h"
#include "kanfis/error.hpp"
#include "kanfis/gradcheck.hpp"
#include "kanfis/matrix.hpp"
#include "kanfis/network.hpp"
#include "kanfis/random.hpp"
#include "kanfis/tape.hpp"
#include "reference.hpp"

using namespace kanfis;

namespace {

Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

}  // namespace

TEST_CASE("matmul: identity and hand-summed product") {
  const Matrix a{{1.5, -2.0, 0.25}, {3.0, 4.0, -1.0}};
  CHECK(matmul(Matrix::identity(2), a) == a);
  const Matrix p = matmul(Matrix{{1, 2}, {3, 4}}, Matrix{{1}, {1}});
  CHECK(p == Matrix{{3}, {7}});
}

TEST_CASE("matmul agrees with a triple-loop oracle on random shapes up to 16x16") {
  Rng rng(7);
  {
    const Matrix a = testing::random_matrix(rng, 3, 4);
    const Matrix b = testing::random_matrix(rng, 4, 2);
    CHECK(max_abs_diff(matmul(a, b), naive_product(a, b)) < 1e-12);
  }
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 1 + rng.below(16), k = 1 + rng.below(16), c = 1 + rng.below(16);
    const Matrix a = testing::random_matrix(rng, r, k, -5, 5);
    const Matrix b = testing::random_matrix(rng, k, c, -5, 5);
    REQUIRE(max_abs_diff(matmul(a, b), naive_product(a, b)) < 1e-12);
  }
}

TEST_CASE("matmul shape error names both shapes") {
  try {
    (void)matmul(Matrix(2, 3), Matrix(2, 3));
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2x3 * 2x3") != std::string::npos);
  }
}

TEST_CASE("taped matmul adjoints match central differences") {
  Rng rng(11);
  ParamSet theta{{"A", testing::random_matrix(rng, 3, 4)}, {"B", testing::random_matrix(rng, 4, 2)}};
  const Matrix weights = testing::random_matrix(rng, 3, 2);
  ScalarObjective f = [&](Tape& t, const std::vector<Var>& p) {
    return sum(mul(matmul(p[0], p[1]), t.constant(weights)));
  };
  CHECK(grad_check(f, theta).max_relative_error < 1e-9);
}

TEST_CASE("grad_check on theta^2 at 3") {
  ParamSet theta{{"theta", Matrix(1, 1, 3.0)}};
  ScalarObjective f = [](Tape&, const std::vector<Var>& p) { return sum(mul(p[0], p[0])); };
  const auto r = grad_check(f, theta, 1e-5);
  CHECK(r.worst_analytic == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(r.max_relative_error < 1e-9);
}

TEST_CASE("grad_check on a single gaussian membership with respect to its center") {
  // One edge, one basis, saturated mask and unit amplitude: output is
  // exp(-(x-mu)^2/(2 sigma^2)) up to the mask factor.
  const double x = 0.7, sigma = 0.5;
  FuzzyLayer structure(1, 1, 1, MfFamily::Gaussian, false);
  ParamSet theta{{"mu", Matrix(1, 1, 0.2)}};
  ScalarObjective f = [&](Tape& t, const std::vector<Var>& p) {
    std::vector<Var> groups = {p[0], t.constant(Matrix(1, 1, softplus_inverse(sigma - kWidthFloor))),
                               t.constant(Matrix(1, 1, softplus_inverse(1.0))),
                               t.constant(Matrix(1, 1, 40.0))};
    return sum(layer_forward(structure, groups, t.constant(Matrix(1, 1, x))));
  };
  const auto r = grad_check(f, theta, 1e-5);
  CHECK(r.max_relative_error < 1e-6);
  const auto gp = t1_gaussian_partials(x, 0.2, sigma);
  CHECK(r.worst_analytic == doctest::Approx(gp.d_center * logistic(40.0)).epsilon(1e-12));
}

TEST_CASE("grad_check reports non-finite objectives") {
  ParamSet theta{{"theta", Matrix(1, 1, 1.0)}};
  ScalarObjective f = [](Tape& t, const std::vector<Var>& p) {
    return sum(mul(p[0], t.constant(Matrix(1, 1, std::nan("")))));
  };
  CHECK_THROWS_AS(grad_check(f, theta), EvaluationError);
  CHECK_THROWS_AS(grad_check(f, theta, 0.0), DomainError);
}

TEST_CASE("tape: unused parameters get exactly zero gradient") {
  Tape t;
  Var used = t.parameter("used", Matrix{{1.0, 2.0}});
  Var unused = t.parameter("unused", Matrix{{5.0}});
  Var out = sum(scale(used, 3.0));
  t.backward(out);
  CHECK(t.parameter_grad("used") == Matrix{{3.0, 3.0}});
  CHECK(t.parameter_grad("unused") == Matrix{{0.0}});
  (void)unused;
}

TEST_CASE("tape: every recorded op is visited exactly once") {
  Tape t;
  Var a = t.parameter("a", Matrix{{1.0, 2.0}, {3.0, 4.0}});
  Var c = t.constant(Matrix{{0.5, -1.0}, {2.0, 1.0}});
  Var m = matmul(a, c);          // 1
  Var s = add(m, transpose(a));  // 2, 3
  Var out = sum(mul(s, s));      // 4, 5
  t.backward(out);
  CHECK(t.backward_visits() == 5);
  t.backward(out);
  CHECK(t.backward_visits() == 5);
}

TEST_CASE("tape: backward of a sum of outputs equals the sum of backwards") {
  Rng rng(3);
  const Matrix a0 = testing::random_matrix(rng, 3, 3);
  const Matrix b0 = testing::random_matrix(rng, 3, 2);
  auto grads = [&](int which) {
    Tape t;
    Var a = t.parameter("a", a0);
    Var b = t.parameter("b", b0);
    Var y1 = sum(mul(matmul(a, b), matmul(a, b)));
    Var y2 = sum(matmul(transpose(b), a));
    Var out = which == 0 ? y1 : which == 1 ? y2 : add(y1, y2);
    t.backward(out);
    return std::pair{t.parameter_grad("a"), t.parameter_grad("b")};
  };
  const auto g1 = grads(0), g2 = grads(1), g12 = grads(2);
  for (std::size_t i = 0; i < a0.size(); ++i) {
    CHECK(g12.first.values()[i] ==
          doctest::Approx(g1.first.values()[i] + g2.first.values()[i]).epsilon(1e-13));
  }
  for (std::size_t i = 0; i < b0.size(); ++i) {
    CHECK(g12.second.values()[i] ==
          doctest::Approx(g1.second.values()[i] + g2.second.values()[i]).epsilon(1e-13));
  }
}

TEST_CASE("tape: backward needs a scalar output") {
  Tape t;
  Var a = t.parameter("a", Matrix(2, 2, 1.0));
  CHECK_THROWS_AS(t.backward(a), ShapeError);
  CHECK_THROWS_AS(t.parameter("a", Matrix(1, 1)), ConfigError);
}

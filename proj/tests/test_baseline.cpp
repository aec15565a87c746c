#include <cmath>
#include <sstream>

#include "doctest.h"
#include "kanfis/baseline.hpp"
#include "kanfis/error.hpp"
#include "kanfis/network.hpp"
#include "reference.hpp"

using namespace kanfis;

namespace {

// Enumerates every rule index as digits, multiplies memberships directly.
double brute_force(const ProductFuzzySystem& sys, const std::vector<double>& x) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < sys.consequents.size(); ++j) {
    std::size_t rest = j;
    std::vector<std::size_t> digit(sys.inputs);
    for (std::size_t i = sys.inputs; i-- > 0;) {
      digit[i] = rest % sys.mfs;
      rest /= sys.mfs;
    }
    double tau = 1.0;
    for (std::size_t i = 0; i < sys.inputs; ++i) {
      const double d = x[i] - sys.centers(i, digit[i]);
      const double s = sys.sigmas(i, digit[i]);
      tau *= std::exp(-d * d / (2.0 * s * s));
    }
    num += tau * sys.consequents[j];
    den += tau;
  }
  return num / den;
}

ProductFuzzySystem random_system(Rng& rng, std::size_t n, std::size_t m) {
  ProductFuzzySystem sys = ProductFuzzySystem::grid(n, m);
  for (double& c : sys.centers.values()) c = rng.uniform(-2, 2);
  for (double& s : sys.sigmas.values()) s = rng.uniform(0.3, 1.5);
  for (double& c : sys.consequents) c = rng.uniform(-3, 3);
  return sys;
}

}  // namespace

TEST_CASE("pfs_forward examples") {
  ProductFuzzySystem sys = ProductFuzzySystem::grid(3, 3);
  for (double& c : sys.consequents) c = 4.25;
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const std::vector<double> x{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    CHECK(pfs_forward(sys, x) == doctest::Approx(4.25).epsilon(1e-14));
  }

  // N=1, M=2: two-rule interpolation. Far-apart MFs make tau_2 negligible at mu_1.
  ProductFuzzySystem two = ProductFuzzySystem::grid(1, 2);
  two.centers = Matrix{{-2.0, 2.0}};
  two.sigmas = Matrix{{0.3, 0.3}};
  two.consequents = {1.5, -7.0};
  const double at_mu1 = pfs_forward(two, std::vector<double>{-2.0});
  CHECK(at_mu1 == doctest::Approx(1.5).epsilon(1e-12));
  const double w2 = std::exp(-16.0 / (2 * 0.09));
  CHECK(at_mu1 == doctest::Approx((1.5 - 7.0 * w2) / (1.0 + w2)).epsilon(1e-15));
}

TEST_CASE("pfs_forward matches exhaustive rule enumeration") {
  Rng rng(2);
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{2, 2}, {1, 5}, {3, 3}, {4, 2}, {5, 3}}) {
    const ProductFuzzySystem sys = random_system(rng, n, m);
    for (int p = 0; p < 16; ++p) {
      std::vector<double> x(n);
      for (double& v : x) v = rng.uniform(-2.5, 2.5);
      CHECK(std::abs(pfs_forward(sys, x) - brute_force(sys, x)) < 1e-12);
      const auto tau = pfs_normalized_firing(sys, x);
      double s = 0.0, f = 0.0;
      for (std::size_t j = 0; j < tau.size(); ++j) {
        s += tau[j];
        f += tau[j] * sys.consequents[j];
      }
      CHECK(std::abs(s - 1.0) < 1e-9);
      CHECK(std::abs(f - pfs_forward(sys, x)) < 1e-12);
    }
  }
}

TEST_CASE("capacity guard") {
  CHECK_NOTHROW(ProductFuzzySystem::grid(12, 3));
  CHECK_THROWS_AS(ProductFuzzySystem::grid(13, 2), CapacityError);
  try {
    ProductFuzzySystem::grid(13, 3);
    FAIL("expected a capacity error");
  } catch (const CapacityError& e) {
    CHECK(std::string(e.what()).find("1594323") != std::string::npos);
  }
  CHECK_THROWS_AS(ProductFuzzySystem::grid(7, 8), CapacityError);  // 2097152 rules
}

TEST_CASE("least-squares consequents reproduce a representable target") {
  Rng rng(3);
  ProductFuzzySystem truth = random_system(rng, 2, 3);
  Matrix x = testing::random_matrix(rng, 200, 2, -2.5, 2.5);
  const std::vector<double> y = pfs_forward(truth, x);
  ProductFuzzySystem fit = truth;
  std::fill(fit.consequents.begin(), fit.consequents.end(), 0.0);
  fit_consequents(fit, x, y, 1e-12);
  const std::vector<double> back = pfs_forward(fit, x);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(back[i] - y[i]) < 1e-6);
}

TEST_CASE("parameter and rule counts") {
  CHECK(pfs_rule_count(2, 3) == 8);
  CHECK(pfs_rule_count(3, 10) == 59049);
  CHECK(pfs_param_count(3, 10) == 59049 + 60);
  CHECK(pfs_rule_count(10, 40).str() == "1" + std::string(40, '0'));
  CHECK(afs_param_count(4, {8}, 3, 3, 1) == 329);

  const KanfisModel m = KanfisModel::create(6, {{5, 4}, 2, MfFamily::Bell, false}, Task::classification(3), {});
  CHECK(afs_param_count(6, {5, 4}, 2, 4, 3) == m.parameter_count());
  const KanfisModel it2 = KanfisModel::create(3, {{16}, 3, MfFamily::Gaussian, true}, Task::regression(), {});
  CHECK(afs_param_count(3, {16}, 3, 4, 1) == it2.parameter_count());
}

TEST_CASE("complexity table: exponential rule growth, constant AFS increment") {
  const auto rows = complexity_table(2, 10, 3, 16, 3, 3);
  REQUIRE(rows.size() == 9);
  BigCount power = 9;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    CHECK(rows[r].pfs_rules == power);
    power *= 3;
    if (r > 0) {
      CHECK(rows[r].pfs_rules == 3 * rows[r - 1].pfs_rules);
      CHECK(rows[r].afs_params - rows[r - 1].afs_params == 16 * (3 * 3 + 1));
    }
  }
  CHECK(rows.back().pfs_rules == 59049);

  std::ostringstream csv;
  write_complexity_csv(csv, complexity_table(3, 3, 2, 16, 3, 3));
  CHECK(csv.str() == "N,pfs_rules,pfs_params,afs_params\n3,8,20,497\n");
  CHECK_THROWS_AS(complexity_table(5, 4, 3, 16, 3, 3), ConfigError);
}

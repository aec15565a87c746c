#include <cmath>
#include <vector>

#include "doctest.h"
#include "kanfis/kernels.hpp"
#include "kanfis/random.hpp"

using namespace kanfis;
namespace kt = kanfis::kernels;

namespace {

bool close(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

std::vector<double> random_column(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

struct Case {
  std::vector<double> x, g, acc;
  double center, w1, w2, scale;
};

Case make_case(Rng& rng, std::size_t n) {
  return {random_column(rng, n, -4, 4), random_column(rng, n, -1, 1), random_column(rng, n, 0, 2),
          rng.uniform(-2, 2),           rng.uniform(0.05, 2.0),         rng.uniform(0.3, 3.0),
          rng.uniform(0.0, 2.0)};
}

void compare_tables(const kt::Table& ref, const kt::Table& simd) {
  Rng rng(321);
  for (std::size_t n = 0; n <= 41; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const Case c = make_case(rng, n);
      for (int family = 0; family < 3; ++family) {
        std::vector<double> acc_ref = c.acc, acc_simd = c.acc;
        std::vector<double> dx_ref(n, 0.25), dx_simd(n, 0.25);
        double s_ref[4] = {}, s_simd[4] = {};
        std::size_t nsums = 3;
        switch (family) {
          case 0:
            ref.gaussian_forward(c.x, c.center, c.w1, c.scale, acc_ref);
            simd.gaussian_forward(c.x, c.center, c.w1, c.scale, acc_simd);
            ref.gaussian_backward(c.x, c.center, c.w1, c.scale, c.g, dx_ref, s_ref);
            simd.gaussian_backward(c.x, c.center, c.w1, c.scale, c.g, dx_simd, s_simd);
            break;
          case 1: {
            const double slope = (rep % 2 ? -1.0 : 1.0) * 4.0 * c.w1;
            ref.sigmoid_forward(c.x, c.center, slope, c.scale, acc_ref);
            simd.sigmoid_forward(c.x, c.center, slope, c.scale, acc_simd);
            ref.sigmoid_backward(c.x, c.center, slope, c.scale, c.g, dx_ref, s_ref);
            simd.sigmoid_backward(c.x, c.center, slope, c.scale, c.g, dx_simd, s_simd);
            break;
          }
          default:
            ref.bell_forward(c.x, c.center, c.w1, c.w2, c.scale, acc_ref);
            simd.bell_forward(c.x, c.center, c.w1, c.w2, c.scale, acc_simd);
            ref.bell_backward(c.x, c.center, c.w1, c.w2, c.scale, c.g, dx_ref, s_ref);
            simd.bell_backward(c.x, c.center, c.w1, c.w2, c.scale, c.g, dx_simd, s_simd);
            nsums = 4;
        }
        for (std::size_t b = 0; b < n; ++b) {
          REQUIRE(close(acc_simd[b], acc_ref[b]));
          REQUIRE(close(dx_simd[b], dx_ref[b]));
        }
        for (std::size_t s = 0; s < nsums; ++s) REQUIRE(close(s_simd[s], s_ref[s], 1e-11));
      }
    }
  }
}

}  // namespace

TEST_CASE("scalar gaussian kernel matches the closed form") {
  const std::vector<double> x = {-1.0, 0.0, 0.5, 2.0};
  std::vector<double> acc(4, 1.0);
  kt::scalar_table().gaussian_forward(x, 0.5, 1.5, 2.0, acc);
  for (std::size_t b = 0; b < x.size(); ++b) {
    const double d = x[b] - 0.5;
    CHECK(acc[b] == doctest::Approx(1.0 + 2.0 * std::exp(-d * d / 4.5)).epsilon(1e-15));
  }
}

TEST_CASE("AVX2 kernels agree with the scalar reference, including ragged tails") {
  const kt::Table* simd = kt::avx2_table();
  if (simd == nullptr) {
    MESSAGE("AVX2 table unavailable on this machine; equivalence not exercised");
    return;
  }
  compare_tables(kt::scalar_table(), *simd);
}

TEST_CASE("AVX2 exp handles deep underflow and large arguments") {
  const kt::Table* simd = kt::avx2_table();
  if (simd == nullptr) return;
  // (x - c)^2 / (2 sigma^2) up to ~1e6 drives exp far below the double range.
  const std::vector<double> x = {0.0, 10.0, 37.0, 38.5, 100.0, -100.0, 1e3};
  std::vector<double> a(x.size(), 0.0), b(x.size(), 0.0);
  kt::scalar_table().gaussian_forward(x, 0.0, 1.0, 1.0, a);
  simd->gaussian_forward(x, 0.0, 1.0, 1.0, b);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-300 + 1e-13 * a[i]);
  // Sigmoid saturates to 0 and 1 without NaN.
  std::vector<double> s1(x.size(), 0.0), s2(x.size(), 0.0);
  kt::scalar_table().sigmoid_forward(x, 0.0, 20.0, 1.0, s1);
  simd->sigmoid_forward(x, 0.0, -20.0, 1.0, s2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::isfinite(s2[i]));
    CHECK(std::abs(s1[i] + s2[i] - (x[i] == 0.0 ? 1.0 : 1.0)) < 1e-12);
  }
}

TEST_CASE("dispatch selects AVX2 when available and honours overrides") {
  if (kt::avx2_table() != nullptr) {
    CHECK(kt::active().name == "avx2");
    kt::select(kt::Isa::Scalar);
    CHECK(kt::active().name == "scalar");
    kt::select(kt::Isa::Avx2);
    CHECK(kt::active().name == "avx2");
  } else {
    CHECK(kt::active().name == "scalar");
    CHECK_THROWS(kt::select(kt::Isa::Avx2));
  }
  kt::select_auto();
}

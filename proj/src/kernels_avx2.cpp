// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <array>
#include <cstring>

#include "kanfis/kernels.hpp"

namespace kanfis::kernels::detail {

namespace {

constexpr std::size_t kLanes = 4;

// exp(x) for x in [-708, 709]; inputs below -708 return 0. Cody-Waite
// reduction x = n ln2 + r, |r| <= ln2/2, then a degree-13 Taylor polynomial
// (truncation error below 2e-16 relative on that interval).
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634074)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  constexpr std::array<double, 14> inv_fact = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
      1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
      1.0 / 6.0,          1.0 / 2.0,         1.0,              1.0};
  __m256d p = _mm256_set1_pd(inv_fact[0]);
  for (std::size_t i = 1; i < inv_fact.size(); ++i) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[i]));
  }

  const __m256i n64 = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, result);
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

// Loads up to four values, zero-padding past `count`.
inline __m256d load_partial(const double* p, std::size_t count) {
  alignas(32) double buf[kLanes] = {0.0, 0.0, 0.0, 0.0};
  std::memcpy(buf, p, count * sizeof(double));
  return _mm256_load_pd(buf);
}

inline void store_partial(double* p, __m256d v, std::size_t count) {
  alignas(32) double buf[kLanes];
  _mm256_store_pd(buf, v);
  std::memcpy(p, buf, count * sizeof(double));
}

void gaussian_forward(Column x, double center, double sigma, double scale, MutColumn acc) {
  const __m256d c = _mm256_set1_pd(center);
  const __m256d k = _mm256_set1_pd(-1.0 / (2.0 * sigma * sigma));
  const __m256d s = _mm256_set1_pd(scale);
  const std::size_t n = x.size();
  std::size_t b = 0;
  for (; b + kLanes <= n; b += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + b), c);
    const __m256d phi = exp_pd(_mm256_mul_pd(_mm256_mul_pd(d, d), k));
    _mm256_storeu_pd(acc.data() + b, _mm256_fmadd_pd(s, phi, _mm256_loadu_pd(acc.data() + b)));
  }
  if (b < n) {
    const std::size_t rest = n - b;
    const __m256d d = _mm256_sub_pd(load_partial(x.data() + b, rest), c);
    const __m256d phi = exp_pd(_mm256_mul_pd(_mm256_mul_pd(d, d), k));
    store_partial(acc.data() + b, _mm256_fmadd_pd(s, phi, load_partial(acc.data() + b, rest)),
                  rest);
  }
}

void gaussian_backward(Column x, double center, double sigma, double scale, Column g, MutColumn dx,
                       double sums[3]) {
  const __m256d c = _mm256_set1_pd(center);
  const __m256d k = _mm256_set1_pd(-1.0 / (2.0 * sigma * sigma));
  const __m256d dx_scale = _mm256_set1_pd(-scale / (sigma * sigma));
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd(), s2 = _mm256_setzero_pd();
  const std::size_t n = x.size();

  auto step = [&](__m256d xv, __m256d gv) {
    const __m256d d = _mm256_sub_pd(xv, c);
    const __m256d gp = _mm256_mul_pd(gv, exp_pd(_mm256_mul_pd(_mm256_mul_pd(d, d), k)));
    const __m256d gpd = _mm256_mul_pd(gp, d);
    s0 = _mm256_add_pd(s0, gp);
    s1 = _mm256_add_pd(s1, gpd);
    s2 = _mm256_fmadd_pd(gpd, d, s2);
    return _mm256_mul_pd(dx_scale, gpd);
  };

  std::size_t b = 0;
  for (; b + kLanes <= n; b += kLanes) {
    const __m256d ddx = step(_mm256_loadu_pd(x.data() + b), _mm256_loadu_pd(g.data() + b));
    if (!dx.empty()) {
      _mm256_storeu_pd(dx.data() + b, _mm256_add_pd(_mm256_loadu_pd(dx.data() + b), ddx));
    }
  }
  if (b < n) {
    const std::size_t rest = n - b;
    const __m256d ddx = step(load_partial(x.data() + b, rest), load_partial(g.data() + b, rest));
    if (!dx.empty()) {
      store_partial(dx.data() + b, _mm256_add_pd(load_partial(dx.data() + b, rest), ddx), rest);
    }
  }
  sums[0] = hsum(s0);
  sums[1] = hsum(s1);
  sums[2] = hsum(s2);
}

inline __m256d logistic_pd(__m256d z) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), z));
  return _mm256_div_pd(one, _mm256_add_pd(one, e));
}

void sigmoid_forward(Column x, double center, double slope, double scale, MutColumn acc) {
  const __m256d c = _mm256_set1_pd(center);
  const __m256d a = _mm256_set1_pd(slope);
  const __m256d s = _mm256_set1_pd(scale);
  const std::size_t n = x.size();
  std::size_t b = 0;
  for (; b + kLanes <= n; b += kLanes) {
    const __m256d phi = logistic_pd(_mm256_mul_pd(a, _mm256_sub_pd(_mm256_loadu_pd(x.data() + b), c)));
    _mm256_storeu_pd(acc.data() + b, _mm256_fmadd_pd(s, phi, _mm256_loadu_pd(acc.data() + b)));
  }
  if (b < n) {
    const std::size_t rest = n - b;
    const __m256d phi =
        logistic_pd(_mm256_mul_pd(a, _mm256_sub_pd(load_partial(x.data() + b, rest), c)));
    store_partial(acc.data() + b, _mm256_fmadd_pd(s, phi, load_partial(acc.data() + b, rest)),
                  rest);
  }
}

void sigmoid_backward(Column x, double center, double slope, double scale, Column g, MutColumn dx,
                      double sums[3]) {
  const __m256d c = _mm256_set1_pd(center);
  const __m256d a = _mm256_set1_pd(slope);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d dx_scale = _mm256_set1_pd(scale * slope);
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd(), s2 = _mm256_setzero_pd();
  const std::size_t n = x.size();

  auto step = [&](__m256d xv, __m256d gv) {
    const __m256d d = _mm256_sub_pd(xv, c);
    const __m256d phi = logistic_pd(_mm256_mul_pd(a, d));
    const __m256d gq = _mm256_mul_pd(gv, _mm256_mul_pd(phi, _mm256_sub_pd(one, phi)));
    s0 = _mm256_fmadd_pd(gv, phi, s0);
    s1 = _mm256_fmadd_pd(gq, d, s1);
    s2 = _mm256_add_pd(s2, gq);
    return _mm256_mul_pd(dx_scale, gq);
  };

  std::size_t b = 0;
  for (; b + kLanes <= n; b += kLanes) {
    const __m256d ddx = step(_mm256_loadu_pd(x.data() + b), _mm256_loadu_pd(g.data() + b));
    if (!dx.empty()) {
      _mm256_storeu_pd(dx.data() + b, _mm256_add_pd(_mm256_loadu_pd(dx.data() + b), ddx));
    }
  }
  if (b < n) {
    const std::size_t rest = n - b;
    const __m256d ddx = step(load_partial(x.data() + b, rest), load_partial(g.data() + b, rest));
    if (!dx.empty()) {
      store_partial(dx.data() + b, _mm256_add_pd(load_partial(dx.data() + b, rest), ddx), rest);
    }
  }
  sums[0] = hsum(s0);
  sums[1] = hsum(s1);
  sums[2] = hsum(s2);
}

}  // namespace

// Bell needs a vector pow; it reuses the scalar kernels.
const Table& avx2_table_impl() {
  static const Table table{"avx2",
                           gaussian_forward,
                           gaussian_backward,
                           sigmoid_forward,
                           sigmoid_backward,
                           scalar_table().bell_forward,
                           scalar_table().bell_backward};
  return table;
}

}  // namespace kanfis::kernels::detail

#include <cmath>

#include "kanfis/kernels.hpp"

namespace kanfis::kernels {

namespace {

void gaussian_forward(Column x, double center, double sigma, double scale, MutColumn acc) {
  const double k = -1.0 / (2.0 * sigma * sigma);
  for (std::size_t b = 0; b < x.size(); ++b) {
    const double d = x[b] - center;
    acc[b] += scale * std::exp(d * d * k);
  }
}

void gaussian_backward(Column x, double center, double sigma, double scale, Column g, MutColumn dx,
                       double sums[3]) {
  const double k = -1.0 / (2.0 * sigma * sigma);
  const double inv_s2 = 1.0 / (sigma * sigma);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t b = 0; b < x.size(); ++b) {
    const double d = x[b] - center;
    const double gp = g[b] * std::exp(d * d * k);
    s0 += gp;
    s1 += gp * d;
    s2 += gp * d * d;
    if (!dx.empty()) dx[b] -= scale * gp * d * inv_s2;
  }
  sums[0] = s0;
  sums[1] = s1;
  sums[2] = s2;
}

void sigmoid_forward(Column x, double center, double slope, double scale, MutColumn acc) {
  for (std::size_t b = 0; b < x.size(); ++b) {
    acc[b] += scale / (1.0 + std::exp(-slope * (x[b] - center)));
  }
}

void sigmoid_backward(Column x, double center, double slope, double scale, Column g, MutColumn dx,
                      double sums[3]) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t b = 0; b < x.size(); ++b) {
    const double d = x[b] - center;
    const double phi = 1.0 / (1.0 + std::exp(-slope * d));
    const double gq = g[b] * phi * (1.0 - phi);
    s0 += g[b] * phi;
    s1 += gq * d;
    s2 += gq;
    if (!dx.empty()) dx[b] += scale * slope * gq;
  }
  sums[0] = s0;
  sums[1] = s1;
  sums[2] = s2;
}

void bell_forward(Column x, double center, double a, double b, double scale, MutColumn acc) {
  const double two_b = 2.0 * b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = std::abs((x[i] - center) / a);
    acc[i] += scale / (1.0 + std::pow(u, two_b));
  }
}

void bell_backward(Column x, double center, double a, double b, double scale, Column g, MutColumn dx,
                   double sums[4]) {
  const double two_b = 2.0 * b;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = (x[i] - center) / a;
    const double au = std::abs(u);
    const double t = std::pow(au, two_b);
    const double phi = 1.0 / (1.0 + t);
    s0 += g[i] * phi;
    if (u == 0.0) continue;
    const double gp2 = g[i] * phi * phi;
    const double t_over_u = t / u;
    s1 += gp2 * t_over_u;
    s2 += gp2 * t;
    s3 += gp2 * t * std::log(au);
    if (!dx.empty()) dx[i] -= scale * two_b / a * gp2 * t_over_u;
  }
  sums[0] = s0;
  sums[1] = s1;
  sums[2] = s2;
  sums[3] = s3;
}

}  // namespace

const Table& scalar_table() {
  static const Table table{"scalar",        gaussian_forward, gaussian_backward, sigmoid_forward,
                           sigmoid_backward, bell_forward,     bell_backward};
  return table;
}

}  // namespace kanfis::kernels

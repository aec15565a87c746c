#include "kanfis/membership.hpp"

#include <cmath>
#include <string>

#include "kanfis/error.hpp"

namespace kanfis {

std::string_view to_string(MfFamily family) {
  switch (family) {
    case MfFamily::Gaussian:
      return "gaussian";
    case MfFamily::Bell:
      return "bell";
    case MfFamily::Sigmoid:
      return "sigmoid";
  }
  return "unknown";
}

MfFamily parse_family(std::string_view name) {
  if (name == "gaussian") return MfFamily::Gaussian;
  if (name == "bell") return MfFamily::Bell;
  if (name == "sigmoid") return MfFamily::Sigmoid;
  throw ConfigError("unknown membership family '" + std::string(name) +
                    "' (expected gaussian, bell or sigmoid)");
}

double softplus(double x) {
  // log1p(exp(x)) without overflow for large x.
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
  if (!(y > 0.0)) throw DomainError("softplus_inverse requires y > 0");
  return y > 30.0 ? y + std::log(-std::expm1(-y)) : std::log(std::expm1(y));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double t1_gaussian(double x, double center, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian width must be positive");
  const double d = x - center;
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

double bell(double x, double center, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("bell a and b must be positive");
  const double u = std::abs((x - center) / a);
  return 1.0 / (1.0 + std::pow(u, 2.0 * b));
}

double sigmoid_mf(double x, double center, double slope) { return logistic(slope * (x - center)); }

GaussianPartials t1_gaussian_partials(double x, double center, double sigma) {
  const double v = t1_gaussian(x, center, sigma);
  const double d = x - center;
  const double s2 = sigma * sigma;
  return {v, -v * d / s2, v * d / s2, v * d * d / (s2 * sigma)};
}

BellPartials bell_partials(double x, double center, double a, double b) {
  const double v = bell(x, center, a, b);
  const double u = (x - center) / a;
  if (u == 0.0) return {v, 0.0, 0.0, 0.0, 0.0};
  const double t = std::pow(std::abs(u), 2.0 * b);
  const double v2 = v * v;
  // dv/du = -v^2 * 2b t / u
  const double dv_du = -v2 * 2.0 * b * t / u;
  return {v, dv_du / a, -dv_du / a, -dv_du * u / a, -v2 * 2.0 * t * std::log(std::abs(u))};
}

SigmoidPartials sigmoid_partials(double x, double center, double slope) {
  const double v = sigmoid_mf(x, center, slope);
  const double dv_dz = v * (1.0 - v);
  return {v, dv_dz * slope, -dv_dz * slope, dv_dz * (x - center)};
}

It2Interval It2GaussianBasis::memberships(double x) const {
  return {t1_gaussian(x, center, sigma_upper()), t1_gaussian(x, center, sigma_lower())};
}

double It2GaussianBasis::membership(double x) const {
  const auto m = memberships(x);
  return type_reduce(m.upper, m.lower);
}

It2Interval it2_memberships(double x, const It2GaussianBasis& basis) {
  return basis.memberships(x);
}

double type_reduce(double upper, double lower) {
  if (lower > upper) {
    throw InvariantError("type reduction needs lower <= upper, got lower=" +
                         std::to_string(lower) + " upper=" + std::to_string(upper));
  }
  return 0.5 * (upper + lower);
}

double basis_membership(const Basis& basis, double x) {
  return std::visit([x](const auto& b) { return b.membership(x); }, basis);
}

double basis_amplitude(const Basis& basis) {
  return std::visit([](const auto& b) { return b.amplitude(); }, basis);
}

double basis_center(const Basis& basis) {
  return std::visit([](const auto& b) { return b.center; }, basis);
}

Edge::Edge(std::vector<Basis> bases) : bases_(std::move(bases)) {
  if (bases_.empty()) throw ConfigError("an edge needs at least one basis");
  const auto kind = bases_.front().index();
  for (const auto& b : bases_) {
    if (b.index() != kind) throw ConfigError("edge bases must share one membership family");
  }
}

double Edge::amplitude_sum() const {
  double s = 0.0;
  for (const auto& b : bases_) s += basis_amplitude(b);
  return s;
}

double edge_activate(double x, const Edge& edge, double mask_value) {
  if (!(mask_value >= 0.0 && mask_value <= 1.0)) {
    throw DomainError("mask value must lie in [0, 1]");
  }
  double s = 0.0;
  for (const auto& b : edge.bases()) s += basis_amplitude(b) * basis_membership(b, x);
  return mask_value * s;
}

}  // namespace kanfis

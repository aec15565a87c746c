#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace kanfis {

enum class MfFamily { Gaussian, Bell, Sigmoid };

std::string_view to_string(MfFamily family);
MfFamily parse_family(std::string_view name);

/// Floor added to every learnable width so that no division ever sees ~0.
inline constexpr double kWidthFloor = 1e-4;

double softplus(double x);
/// Inverse of softplus on (0, inf).
double softplus_inverse(double y);
double logistic(double x);

// Elementary membership functions.

/// exp(-(x - center)^2 / (2 sigma^2)). Throws DomainError if sigma <= 0.
double t1_gaussian(double x, double center, double sigma);
/// 1 / (1 + |(x - center) / a|^(2b)). Throws DomainError unless a, b > 0.
double bell(double x, double center, double a, double b);
/// 1 / (1 + exp(-slope (x - center))).
double sigmoid_mf(double x, double center, double slope);

struct GaussianPartials {
  double value, d_x, d_center, d_sigma;
};
struct BellPartials {
  double value, d_x, d_center, d_a, d_b;
};
struct SigmoidPartials {
  double value, d_x, d_center, d_slope;
};

GaussianPartials t1_gaussian_partials(double x, double center, double sigma);
BellPartials bell_partials(double x, double center, double a, double b);
SigmoidPartials sigmoid_partials(double x, double center, double slope);

struct GaussianBasis {
  double center = 0.0;
  double sigma_raw = 0.0;
  double amplitude_raw = 0.0;

  double sigma() const { return softplus(sigma_raw) + kWidthFloor; }
  double amplitude() const { return softplus(amplitude_raw); }
  double membership(double x) const { return t1_gaussian(x, center, sigma()); }
};

struct BellBasis {
  double center = 0.0;
  double a_raw = 0.0;
  double b_raw = 0.0;
  double amplitude_raw = 0.0;

  double a() const { return softplus(a_raw) + kWidthFloor; }
  double b() const { return softplus(b_raw) + kWidthFloor; }
  double amplitude() const { return softplus(amplitude_raw); }
  double membership(double x) const { return bell(x, center, a(), b()); }
};

struct SigmoidBasis {
  double center = 0.0;  // transition point
  double slope = 1.0;   // signed; sign sets the direction of monotonicity
  double amplitude_raw = 0.0;

  double amplitude() const { return softplus(amplitude_raw); }
  double membership(double x) const { return sigmoid_mf(x, center, slope); }
};

struct It2Interval {
  double upper;
  double lower;
};

/// Interval type-2 Gaussian with a shared center. sigma_upper is built as
/// sigma_lower + softplus(gap_raw) + floor, so sigma_upper > sigma_lower for
/// every value of the raw parameters.
struct It2GaussianBasis {
  double center = 0.0;
  double sigma_lower_raw = 0.0;
  double gap_raw = 0.0;
  double amplitude_raw = 0.0;

  double sigma_lower() const { return softplus(sigma_lower_raw) + kWidthFloor; }
  double sigma_upper() const { return sigma_lower() + softplus(gap_raw) + kWidthFloor; }
  double amplitude() const { return softplus(amplitude_raw); }
  It2Interval memberships(double x) const;
  double membership(double x) const;
};

It2Interval it2_memberships(double x, const It2GaussianBasis& basis);

/// Center-of-sets reduction (upper + lower) / 2. Throws InvariantError when
/// lower > upper.
double type_reduce(double upper, double lower);

using Basis = std::variant<GaussianBasis, BellBasis, SigmoidBasis, It2GaussianBasis>;

double basis_membership(const Basis& basis, double x);
double basis_amplitude(const Basis& basis);
double basis_center(const Basis& basis);

/// The K learnable memberships on one input-to-rule connection. All bases
/// share one family.
class Edge {
 public:
  explicit Edge(std::vector<Basis> bases);

  std::span<const Basis> bases() const { return bases_; }
  std::size_t size() const { return bases_.size(); }
  double amplitude_sum() const;

 private:
  std::vector<Basis> bases_;
};

/// mask_value * sum_k amplitude_k * phi_k(x). Throws DomainError if
/// mask_value is outside [0, 1].
double edge_activate(double x, const Edge& edge, double mask_value);

}  // namespace kanfis

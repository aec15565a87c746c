#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kanfis/matrix.hpp"

namespace kanfis {

using BigCount = boost::multiprecision::cpp_int;

/// Largest input dimension and rule count pfs_forward will evaluate.
inline constexpr std::size_t kPfsMaxInputs = 12;
inline constexpr std::size_t kPfsMaxRules = 1000000;

/// Grid-partition product-rule T1 fuzzy system with constant consequents.
/// Rule j enumerates one MF per input in mixed radix M with input 0 as the
/// most significant digit.
struct ProductFuzzySystem {
  std::size_t inputs = 0;
  std::size_t mfs = 0;
  Matrix centers;  // inputs x mfs
  Matrix sigmas;   // inputs x mfs
  std::vector<double> consequents;

  /// Centers evenly spaced over [-2, 2], neighbours crossing at 0.5, zero
  /// consequents. Throws CapacityError beyond the guard.
  static ProductFuzzySystem grid(std::size_t inputs, std::size_t mfs);

  std::size_t rule_count() const { return consequents.size(); }
};

/// Throws CapacityError if M^N exceeds the evaluation guard.
void check_pfs_capacity(std::size_t inputs, std::size_t mfs);

double pfs_forward(const ProductFuzzySystem& sys, std::span<const double> x);
std::vector<double> pfs_forward(const ProductFuzzySystem& sys, const Matrix& x);

/// Normalized firing strengths tau_j / sum(tau), one per rule.
std::vector<double> pfs_normalized_firing(const ProductFuzzySystem& sys, std::span<const double> x);

/// Least-squares consequents for fixed antecedents (small ridge for rank
/// deficiency).
void fit_consequents(ProductFuzzySystem& sys, const Matrix& x, std::span<const double> y,
                     double ridge = 1e-8);

BigCount pfs_rule_count(std::size_t mfs, std::size_t inputs);
/// M^N consequents plus a center and width per MF per input.
BigCount pfs_param_count(std::size_t mfs, std::size_t inputs);
/// Sum over layers of d_in*d_out*(K*P + 1), plus outputs*(H + 1).
BigCount afs_param_count(std::size_t inputs, const std::vector<std::size_t>& widths,
                         std::size_t bases, std::size_t params_per_basis, std::size_t outputs);

struct ComplexityRow {
  std::size_t inputs = 0;
  BigCount pfs_rules;
  BigCount pfs_params;
  BigCount afs_params;
};

std::vector<ComplexityRow> complexity_table(std::size_t n_first, std::size_t n_last, std::size_t mfs,
                                            std::size_t rules, std::size_t bases,
                                            std::size_t params_per_basis);

/// CSV with columns N,pfs_rules,pfs_params,afs_params.
void write_complexity_csv(std::ostream& out, const std::vector<ComplexityRow>& rows);

}  // namespace kanfis

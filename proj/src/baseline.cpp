#include "kanfis/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "kanfis/error.hpp"
#include "kanfis/membership.hpp"

namespace kanfis {

namespace {

constexpr double kDenominatorFloor = 1e-30;

std::vector<double> memberships(const ProductFuzzySystem& sys, std::size_t i, double x) {
  std::vector<double> mu(sys.mfs);
  for (std::size_t k = 0; k < sys.mfs; ++k) mu[k] = t1_gaussian(x, sys.centers(i, k), sys.sigmas(i, k));
  return mu;
}

}  // namespace

void check_pfs_capacity(std::size_t inputs, std::size_t mfs) {
  if (inputs == 0 || mfs == 0) throw ConfigError("product system needs positive N and M");
  const BigCount rules = pfs_rule_count(mfs, inputs);
  if (inputs > kPfsMaxInputs || rules > kPfsMaxRules) {
    throw CapacityError("product rule base M^N = " + std::to_string(mfs) + "^" + std::to_string(inputs) +
                        " = " + rules.str() + " exceeds the limit (N <= 12, M^N <= 1000000)");
  }
}

ProductFuzzySystem ProductFuzzySystem::grid(std::size_t inputs, std::size_t mfs) {
  check_pfs_capacity(inputs, mfs);
  ProductFuzzySystem sys;
  sys.inputs = inputs;
  sys.mfs = mfs;
  sys.centers = Matrix(inputs, mfs);
  const double spacing = mfs > 1 ? 4.0 / static_cast<double>(mfs - 1) : 2.0;
  sys.sigmas = Matrix(inputs, mfs, 0.5 * spacing / std::sqrt(2.0 * std::log(2.0)));
  for (std::size_t i = 0; i < inputs; ++i)
    for (std::size_t k = 0; k < mfs; ++k)
      sys.centers(i, k) = mfs > 1 ? -2.0 + spacing * static_cast<double>(k) : 0.0;
  sys.consequents.assign(static_cast<std::size_t>(pfs_rule_count(mfs, inputs)), 0.0);
  return sys;
}

double pfs_forward(const ProductFuzzySystem& sys, std::span<const double> x) {
  check_pfs_capacity(sys.inputs, sys.mfs);
  if (x.size() != sys.inputs) throw ShapeError("product system expects " + std::to_string(sys.inputs) + " inputs");
  if (sys.consequents.size() != static_cast<std::size_t>(pfs_rule_count(sys.mfs, sys.inputs))) {
    throw ShapeError("consequent count does not equal M^N");
  }
  // Contract the consequent tensor one input at a time, last input first.
  // The normalizer factorizes as the product of per-input membership sums.
  std::vector<double> t = sys.consequents;
  double denominator = 1.0;
  for (std::size_t i = sys.inputs; i-- > 0;) {
    const std::vector<double> mu = memberships(sys, i, x[i]);
    double mu_sum = 0.0;
    for (double m : mu) mu_sum += m;
    denominator *= mu_sum;
    const std::size_t outer = t.size() / sys.mfs;
    std::vector<double> next(outer, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t k = 0; k < sys.mfs; ++k) next[o] += t[o * sys.mfs + k] * mu[k];
    t = std::move(next);
  }
  return t.front() / std::max(denominator, kDenominatorFloor);
}

std::vector<double> pfs_forward(const ProductFuzzySystem& sys, const Matrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = pfs_forward(sys, x.row_span(r));
  return out;
}

std::vector<double> pfs_normalized_firing(const ProductFuzzySystem& sys, std::span<const double> x) {
  check_pfs_capacity(sys.inputs, sys.mfs);
  if (x.size() != sys.inputs) throw ShapeError("product system expects " + std::to_string(sys.inputs) + " inputs");
  std::vector<double> tau{1.0};
  for (std::size_t i = 0; i < sys.inputs; ++i) {
    const std::vector<double> mu = memberships(sys, i, x[i]);
    std::vector<double> next;
    next.reserve(tau.size() * sys.mfs);
    for (double t : tau)
      for (double m : mu) next.push_back(t * m);
    tau = std::move(next);
  }
  double total = 0.0;
  for (double t : tau) total += t;
  for (double& t : tau) t /= std::max(total, kDenominatorFloor);
  return tau;
}

void fit_consequents(ProductFuzzySystem& sys, const Matrix& x, std::span<const double> y, double ridge) {
  if (x.rows() != y.size() || x.rows() == 0) throw ShapeError("least squares needs matching, nonzero rows");
  check_pfs_capacity(sys.inputs, sys.mfs);
  const std::size_t r = static_cast<std::size_t>(pfs_rule_count(sys.mfs, sys.inputs));
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(r));
  for (std::size_t b = 0; b < x.rows(); ++b) {
    const std::vector<double> tau = pfs_normalized_firing(sys, x.row_span(b));
    for (std::size_t j = 0; j < r; ++j) phi(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)) = tau[j];
  }
  const Eigen::Map<const Eigen::VectorXd> target(y.data(), static_cast<Eigen::Index>(y.size()));
  Eigen::MatrixXd gram = phi.transpose() * phi;
  gram.diagonal().array() += ridge;
  const Eigen::VectorXd c = gram.ldlt().solve(phi.transpose() * target);
  sys.consequents.assign(c.data(), c.data() + c.size());
}

BigCount pfs_rule_count(std::size_t mfs, std::size_t inputs) {
  BigCount r = 1;
  for (std::size_t i = 0; i < inputs; ++i) r *= mfs;
  return r;
}

BigCount pfs_param_count(std::size_t mfs, std::size_t inputs) {
  return pfs_rule_count(mfs, inputs) + BigCount(2) * mfs * inputs;
}

BigCount afs_param_count(std::size_t inputs, const std::vector<std::size_t>& widths, std::size_t bases,
                         std::size_t params_per_basis, std::size_t outputs) {
  if (widths.empty()) throw ConfigError("architecture needs at least one layer");
  BigCount total = 0;
  std::size_t d_in = inputs;
  for (std::size_t w : widths) {
    total += BigCount(d_in) * w * (BigCount(bases) * params_per_basis + 1);
    d_in = w;
  }
  return total + BigCount(outputs) * (BigCount(widths.back()) + 1);
}

std::vector<ComplexityRow> complexity_table(std::size_t n_first, std::size_t n_last, std::size_t mfs,
                                            std::size_t rules, std::size_t bases,
                                            std::size_t params_per_basis) {
  if (n_first == 0 || n_last < n_first || mfs == 0 || rules == 0 || bases == 0) {
    throw ConfigError("complexity table needs positive sizes and a nonempty N range");
  }
  std::vector<ComplexityRow> rows;
  for (std::size_t n = n_first; n <= n_last; ++n) {
    rows.push_back({n, pfs_rule_count(mfs, n), pfs_param_count(mfs, n),
                    afs_param_count(n, {rules}, bases, params_per_basis, 1)});
  }
  return rows;
}

void write_complexity_csv(std::ostream& out, const std::vector<ComplexityRow>& rows) {
  out << "N,pfs_rules,pfs_params,afs_params\n";
  for (const auto& r : rows) out << r.inputs << ',' << r.pfs_rules << ',' << r.pfs_params << ',' << r.afs_params << '\n';
}

}  // namespace kanfis

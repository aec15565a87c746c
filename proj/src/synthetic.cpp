#include "kanfis/synthetic.hpp"

#include <cmath>
#include <string>

#include "kanfis/error.hpp"
#include "kanfis/random.hpp"

namespace kanfis {

namespace {

Dataset regression_frame(Matrix x, Matrix y) {
  Dataset ds;
  for (std::size_t i = 0; i < x.cols(); ++i) ds.feature_names.push_back("x" + std::to_string(i + 1));
  ds.target_name = "y";
  ds.task = Task::regression();
  ds.stats = compute_stats(x);
  ds.x = std::move(x);
  ds.y = std::move(y);
  return ds;
}

}  // namespace

Dataset make_sparse_regression(std::size_t rows, std::size_t features, double noise, std::uint64_t seed) {
  if (features < 3) throw ConfigError("sparse regression needs at least 3 features");
  if (rows == 0) throw ConfigError("sparse regression needs at least one row");
  if (!(noise >= 0.0)) throw ConfigError("noise must be nonnegative");
  Rng rng(seed);
  Matrix x(rows, features), y(rows, 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < features; ++c) x(r, c) = rng.uniform(-1.7, 1.7);
    y(r, 0) = 2.0 * std::sin(1.5 * x(r, 0)) + x(r, 1) * x(r, 1) - 1.5 * x(r, 2) + noise * rng.normal();
  }
  return regression_frame(std::move(x), std::move(y));
}

Dataset make_sine(std::size_t rows) {
  if (rows < 2) throw ConfigError("sine data needs at least 2 rows");
  Matrix x(rows, 1), y(rows, 1);
  for (std::size_t r = 0; r < rows; ++r) {
    x(r, 0) = -3.0 + 6.0 * static_cast<double>(r) / static_cast<double>(rows - 1);
    y(r, 0) = std::sin(x(r, 0));
  }
  return regression_frame(std::move(x), std::move(y));
}

}  // namespace kanfis

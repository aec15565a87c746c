#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "kanfis/matrix.hpp"
#include "kanfis/network.hpp"

namespace kanfis {

struct FeatureStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population
  double q33 = 0.0;
  double q66 = 0.0;
};

/// Linear-interpolation quantile (R type 7) of unsorted values.
double quantile(std::vector<double> values, double q);

std::vector<FeatureStats> compute_stats(const Matrix& x);

struct Dataset {
  Matrix x;  // N x D
  Matrix y;  // N x 1; class indices for classification
  std::vector<std::string> feature_names;
  std::string target_name;
  Task task;
  std::vector<std::string> class_names;  // dense index -> original label
  std::vector<FeatureStats> stats;

  std::size_t size() const { return x.rows(); }
  std::size_t features() const { return x.cols(); }
  std::vector<std::size_t> labels() const;

  /// Rows in the given order; statistics are recomputed on the subset.
  Dataset subset(const std::vector<std::size_t>& rows) const;
};

/// Parses a headered, comma-separated table. Classification labels are kept
/// as strings and numbered densely in order of first appearance.
Dataset parse_csv(std::istream& in, const std::string& target_column, TaskKind kind,
                  const std::string& source = "<stream>");
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 TaskKind kind);

/// Per-feature affine map to zero mean and unit variance.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;

  /// Throws DegenerateFeatureError on a constant column.
  static Standardizer fit(const Matrix& x, const std::vector<std::string>& names = {});
  Matrix apply(const Matrix& x) const;
  Matrix inverse(const Matrix& z) const;
};

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
  bool stratify = true;  // honoured for classification only
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded split. Both index lists come back in ascending order.
Split split_indices(const Dataset& ds, const SplitSpec& spec);

}  // namespace kanfis

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kanfis/matrix.hpp"

namespace kanfis {

struct RegressionMetrics {
  std::optional<double> mape;  // percent; empty when some target is zero
  double rmse = 0.0;
  double mae = 0.0;
};

RegressionMetrics metrics_regression(std::span<const double> prediction,
                                     std::span<const double> target);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;     // support-weighted
  double auroc = 0.0;  // binary, or one-vs-rest macro average
};

/// Mann-Whitney AUROC with midranks for tied scores.
double auroc_binary(std::span<const double> scores, const std::vector<bool>& positive);

/// `probabilities` is N x C; `predicted` and `target` are class indices.
/// Throws EvaluationError when `target` contains a single class.
ClassificationMetrics metrics_classification(const Matrix& probabilities,
                                             const std::vector<std::size_t>& predicted,
                                             const std::vector<std::size_t>& target);

}  // namespace kanfis

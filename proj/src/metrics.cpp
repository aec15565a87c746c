#include "kanfis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kanfis/error.hpp"

namespace kanfis {

RegressionMetrics metrics_regression(std::span<const double> prediction,
                                     std::span<const double> target) {
  if (prediction.size() != target.size() || target.empty()) {
    throw ShapeError("regression metrics need equal, nonzero lengths");
  }
  RegressionMetrics m;
  double sq = 0.0, abs = 0.0, pct = 0.0;
  bool zero_target = false;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double e = prediction[i] - target[i];
    sq += e * e;
    abs += std::abs(e);
    if (target[i] == 0.0) {
      zero_target = true;
    } else {
      pct += std::abs(e) / std::abs(target[i]);
    }
  }
  const double n = static_cast<double>(target.size());
  m.rmse = std::sqrt(sq / n);
  m.mae = abs / n;
  if (!zero_target) m.mape = 100.0 * pct / n;
  return m;
}

double auroc_binary(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw ShapeError("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw EvaluationError("AUROC is undefined with a single class");
  const double p = static_cast<double>(n_pos), q = static_cast<double>(n_neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

ClassificationMetrics metrics_classification(const Matrix& probabilities,
                                             const std::vector<std::size_t>& predicted,
                                             const std::vector<std::size_t>& target) {
  const std::size_t n = target.size();
  const std::size_t classes = probabilities.cols();
  if (n == 0 || predicted.size() != n || probabilities.rows() != n) {
    throw ShapeError("classification metrics need matching, nonzero lengths");
  }
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (double p : probabilities.row_span(r)) s += p;
    if (std::abs(s - 1.0) > 1e-6) throw DomainError("probability row " + std::to_string(r) + " does not sum to 1");
    if (target[r] >= classes || predicted[r] >= classes) throw LabelError("class index out of range");
  }

  std::vector<std::size_t> support(classes), tp(classes), predicted_count(classes);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < n; ++r) {
    ++support[target[r]];
    ++predicted_count[predicted[r]];
    if (predicted[r] == target[r]) {
      ++tp[target[r]];
      ++correct;
    }
  }
  const std::size_t present = static_cast<std::size_t>(
      std::count_if(support.begin(), support.end(), [](std::size_t s) { return s > 0; }));
  if (present < 2) throw EvaluationError("AUROC is undefined: the targets contain a single class");

  ClassificationMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  for (std::size_t c = 0; c < classes; ++c) {
    if (support[c] == 0) continue;
    const double precision = predicted_count[c] ? static_cast<double>(tp[c]) / static_cast<double>(predicted_count[c]) : 0.0;
    const double recall = static_cast<double>(tp[c]) / static_cast<double>(support[c]);
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.f1 += f1 * static_cast<double>(support[c]) / static_cast<double>(n);
  }

  if (classes == 2) {
    std::vector<double> scores(n);
    std::vector<bool> pos(n);
    for (std::size_t r = 0; r < n; ++r) {
      scores[r] = probabilities(r, 1);
      pos[r] = target[r] == 1;
    }
    m.auroc = auroc_binary(scores, pos);
    return m;
  }
  // One-vs-rest over the classes that occur in the targets.
  std::vector<double> scores(n);
  std::vector<bool> pos(n);
  double total = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    if (support[c] == 0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      scores[r] = probabilities(r, c);
      pos[r] = target[r] == c;
    }
    total += auroc_binary(scores, pos);
  }
  m.auroc = total / static_cast<double>(present);
  return m;
}

}  // namespace kanfis

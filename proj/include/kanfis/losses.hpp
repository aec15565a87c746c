#pragma once

#include <span>
#include <vector>

#include "kanfis/matrix.hpp"
#include "kanfis/network.hpp"
#include "kanfis/tape.hpp"

namespace kanfis {

/// Binary entropy -p ln p - (1-p) ln(1-p) of p = sigmoid(logit), evaluated
/// from the logit so that saturated masks stay accurate.
double mask_entropy_from_logit(double logit);

/// MSE for regression; mean softmax cross-entropy for classification, with
/// `y` a B x 1 column of class indices.
double task_loss(const Matrix& prediction, const Matrix& y, const Task& task);

/// Mean binary entropy of a mask with entries in (0, 1).
double sparsity_penalty(const Matrix& mask);
/// Mean over layers of the per-layer penalty, computed from mask logits.
double sparsity_penalty_from_logits(const std::vector<Matrix>& logits);

/// Sum of cosine similarities over distinct pairs of firing columns.
double distinctiveness_penalty(const Matrix& firing);

struct LossWeights {
  double lambda_s = 0.0;
  double lambda_d = 0.0;
};

struct LossTerms {
  double task = 0.0;
  double sparse = 0.0;
  double distinct = 0.0;
  double total = 0.0;
};

LossTerms total_loss(const KanfisModel& model, const Matrix& x, const Matrix& y,
                     const LossWeights& weights);

// Taped counterparts.

Var task_loss(Var prediction, const Matrix& y, const Task& task);
Var sparsity_penalty(std::span<const Var> mask_logits);
Var distinctiveness_penalty(Var firing);

/// Builds the full objective on the tape. The distinctiveness term is only
/// recorded when lambda_d > 0. `terms` receives the component values.
Var total_loss(const KanfisModel& model, std::span<const Var> params, Var x, const Matrix& y,
               const LossWeights& weights, LossTerms* terms = nullptr);

}  // namespace kanfis

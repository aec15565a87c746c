#include "kanfis/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kanfis/error.hpp"
#include "kanfis/membership.hpp"

namespace kanfis {

namespace {

constexpr double kCosineFloor = 1e-12;

std::size_t class_index(double label, std::size_t classes, std::size_t row) {
  if (!(label >= 0.0) || label != std::floor(label) || label >= static_cast<double>(classes)) {
    throw LabelError("class label " + std::to_string(label) + " at row " + std::to_string(row) +
                     " is not in 0.." + std::to_string(classes - 1));
  }
  return static_cast<std::size_t>(label);
}

void check_targets(const Matrix& prediction, const Matrix& y, const Task& task) {
  const std::size_t cols = task.is_classification() ? 1 : prediction.cols();
  if (y.rows() != prediction.rows() || y.cols() != cols) {
    throw ShapeError("targets " + y.shape_string() + " do not match predictions " +
                     prediction.shape_string());
  }
}

// Row-wise log-softmax.
Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row_span(r);
    const double m = *std::max_element(row.begin(), row.end());
    double s = 0.0;
    for (double v : row) s += std::exp(v - m);
    const double lse = m + std::log(s);
    for (std::size_t c = 0; c < logits.cols(); ++c) out(r, c) = row[c] - lse;
  }
  return out;
}

struct CosineTable {
  Matrix gram;                 // K x K column inner products
  std::vector<double> norms;   // column norms
};

CosineTable cosine_table(const Matrix& w) {
  const std::size_t k = w.cols();
  CosineTable t{Matrix(k, k), std::vector<double>(k)};
  for (std::size_t b = 0; b < w.rows(); ++b) {
    auto row = w.row_span(b);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) t.gram(i, j) += row[i] * row[j];
  }
  for (std::size_t i = 0; i < k; ++i) t.norms[i] = std::sqrt(t.gram(i, i));
  return t;
}

}  // namespace

double mask_entropy_from_logit(double z) {
  const double p = logistic(z);
  // ln p = -softplus(-z), ln(1 - p) = -softplus(z).
  return p * softplus(-z) + (1.0 - p) * softplus(z);
}

double task_loss(const Matrix& prediction, const Matrix& y, const Task& task) {
  check_targets(prediction, y, task);
  if (!task.is_classification()) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = prediction.values()[i] - y.values()[i];
      s += d * d;
    }
    return s / static_cast<double>(y.size());
  }
  const Matrix logp = log_softmax_rows(prediction);
  double s = 0.0;
  for (std::size_t r = 0; r < y.rows(); ++r) s -= logp(r, class_index(y(r, 0), prediction.cols(), r));
  return s / static_cast<double>(y.rows());
}

double sparsity_penalty(const Matrix& mask) {
  double s = 0.0;
  for (double p : mask.values()) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("mask entry outside (0, 1)");
    s -= p * std::log(p) + (1.0 - p) * std::log(1.0 - p);
  }
  return s / static_cast<double>(mask.size());
}

double sparsity_penalty_from_logits(const std::vector<Matrix>& logits) {
  double total = 0.0;
  for (const Matrix& z : logits) {
    double s = 0.0;
    for (double v : z.values()) s += mask_entropy_from_logit(v);
    total += s / static_cast<double>(z.size());
  }
  return total / static_cast<double>(logits.size());
}

double distinctiveness_penalty(const Matrix& firing) {
  if (firing.cols() < 2) throw ConfigError("distinctiveness needs at least 2 rules");
  const CosineTable t = cosine_table(firing);
  double s = 0.0;
  for (std::size_t i = 0; i < firing.cols(); ++i)
    for (std::size_t j = i + 1; j < firing.cols(); ++j)
      s += t.gram(i, j) / std::max(t.norms[i] * t.norms[j], kCosineFloor);
  return s;
}

LossTerms total_loss(const KanfisModel& model, const Matrix& x, const Matrix& y,
                     const LossWeights& weights) {
  const ForwardTrace trace = model_forward(model, x);
  std::vector<Matrix> logits;
  for (const auto& layer : model.layers()) logits.push_back(layer.mask_logits());
  LossTerms t;
  t.task = task_loss(trace.prediction, y, model.task());
  t.sparse = sparsity_penalty_from_logits(logits);
  t.distinct = weights.lambda_d > 0.0 ? distinctiveness_penalty(trace.firing) : 0.0;
  t.total = t.task + weights.lambda_s * t.sparse + weights.lambda_d * t.distinct;
  return t;
}

Var task_loss(Var prediction, const Matrix& y, const Task& task) {
  const Matrix& p = prediction.value();
  const double value = task_loss(p, y, task);
  const std::size_t ip = prediction.id();
  return prediction.tape()->record(Matrix(1, 1, value), {ip}, [ip, y, task](Tape& tp, std::size_t self) {
    const Matrix& pred = tp.value(ip);
    Matrix& g = tp.grad_buffer(ip);
    const double seed = tp.grad(self)(0, 0);
    if (!task.is_classification()) {
      const double f = 2.0 * seed / static_cast<double>(y.size());
      for (std::size_t i = 0; i < y.size(); ++i)
        g.values()[i] += f * (pred.values()[i] - y.values()[i]);
      return;
    }
    const Matrix prob = softmax_rows(pred);
    const double f = seed / static_cast<double>(y.rows());
    for (std::size_t r = 0; r < y.rows(); ++r) {
      const std::size_t label = static_cast<std::size_t>(y(r, 0));
      for (std::size_t c = 0; c < pred.cols(); ++c)
        g(r, c) += f * (prob(r, c) - (c == label ? 1.0 : 0.0));
    }
  });
}

Var sparsity_penalty(std::span<const Var> mask_logits) {
  if (mask_logits.empty()) throw ShapeError("sparsity penalty needs at least one mask");
  std::vector<Matrix> values;
  std::vector<std::size_t> ids;
  for (const Var& v : mask_logits) {
    values.push_back(v.value());
    ids.push_back(v.id());
  }
  const double value = sparsity_penalty_from_logits(values);
  Tape& tape = *mask_logits.front().tape();
  return tape.record(Matrix(1, 1, value), ids, [ids](Tape& tp, std::size_t self) {
    const double seed = tp.grad(self)(0, 0) / static_cast<double>(ids.size());
    for (std::size_t id : ids) {
      const Matrix& z = tp.value(id);
      Matrix& g = tp.grad_buffer(id);
      const double f = seed / static_cast<double>(z.size());
      // dPhi/dz = -z p (1 - p).
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double p = logistic(z.values()[i]);
        g.values()[i] -= f * z.values()[i] * p * (1.0 - p);
      }
    }
  });
}

Var distinctiveness_penalty(Var firing) {
  const double value = distinctiveness_penalty(firing.value());
  const std::size_t iw = firing.id();
  return firing.tape()->record(Matrix(1, 1, value), {iw}, [iw](Tape& tp, std::size_t self) {
    const Matrix& w = tp.value(iw);
    Matrix& g = tp.grad_buffer(iw);
    const double seed = tp.grad(self)(0, 0);
    const std::size_t k = w.cols();
    const CosineTable t = cosine_table(w);
    // Coefficients so that dS/dw[:, i] = sum_j A(i, j) w[:, j].
    Matrix a(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double den = t.norms[i] * t.norms[j];
        if (den > kCosineFloor) {
          const double c = t.gram(i, j) / den;
          a(i, j) += 1.0 / den;
          a(j, i) += 1.0 / den;
          a(i, i) -= c / (t.norms[i] * t.norms[i]);
          a(j, j) -= c / (t.norms[j] * t.norms[j]);
        } else {
          a(i, j) += 1.0 / kCosineFloor;
          a(j, i) += 1.0 / kCosineFloor;
        }
      }
    }
    for (std::size_t b = 0; b < w.rows(); ++b) {
      auto row = w.row_span(b);
      for (std::size_t i = 0; i < k; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += a(i, j) * row[j];
        g(b, i) += seed * s;
      }
    }
  });
}

Var total_loss(const KanfisModel& model, std::span<const Var> params, Var x, const Matrix& y,
               const LossWeights& weights, LossTerms* terms) {
  const TapedForward fwd = model_forward(model, params, x);
  Var task = task_loss(fwd.prediction, y, model.task());
  Var sparse = sparsity_penalty(fwd.mask_logits);
  Var total = add(task, scale(sparse, weights.lambda_s));
  double distinct = 0.0;
  if (weights.lambda_d > 0.0) {
    Var d = distinctiveness_penalty(fwd.firing);
    distinct = d.scalar();
    total = add(total, scale(d, weights.lambda_d));
  }
  if (terms != nullptr) {
    terms->task = task.scalar();
    terms->sparse = sparse.scalar();
    terms->distinct = distinct;
    terms->total = total.scalar();
  }
  return total;
}

}  // namespace kanfis

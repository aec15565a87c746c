#include "kanfis/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "kanfis/error.hpp"
#include "kanfis/format.hpp"
#include "kanfis/random.hpp"

namespace kanfis {

namespace {

constexpr double kDivergenceLimit = 1e8;

// Shuffling draws from its own stream so that it does not mirror the
// initialization draws made with the same seed.
constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ULL;

struct TargetScale {
  std::vector<double> mean, sd;
};

TargetScale target_scale(const Matrix& y) {
  TargetScale s{std::vector<double>(y.cols(), 0.0), std::vector<double>(y.cols(), 1.0)};
  const double n = static_cast<double>(y.rows());
  for (std::size_t c = 0; c < y.cols(); ++c) {
    double mean = 0.0, var = 0.0;
    for (std::size_t r = 0; r < y.rows(); ++r) mean += y(r, c);
    mean /= n;
    for (std::size_t r = 0; r < y.rows(); ++r) var += (y(r, c) - mean) * (y(r, c) - mean);
    const double sd = std::sqrt(var / n);
    s.mean[c] = mean;
    s.sd[c] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

// Maps a head trained on z-scored targets back to original units.
void fold_target_scale(KanfisModel& model, const TargetScale& s) {
  for (std::size_t o = 0; o < model.output_dim(); ++o) {
    for (std::size_t j = 0; j < model.head_w().cols(); ++j) model.head_w()(o, j) *= s.sd[o];
    model.head_b()(0, o) = model.head_b()(0, o) * s.sd[o] + s.mean[o];
  }
}

void unfold_target_scale(KanfisModel& model, const TargetScale& s) {
  for (std::size_t o = 0; o < model.output_dim(); ++o) {
    for (std::size_t j = 0; j < model.head_w().cols(); ++j) model.head_w()(o, j) /= s.sd[o];
    model.head_b()(0, o) = (model.head_b()(0, o) - s.mean[o]) / s.sd[o];
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lambda_s >= 0.0) || !(lambda_d >= 0.0)) throw ConfigError("lambda_s and lambda_d must be nonnegative");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be finite and nonnegative");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (lambda_d > 0.0 && batch_size < 2) throw ConfigError("lambda_d > 0 needs batch size >= 2");
  if (!(warmup_fraction >= 0.0 && warmup_fraction <= 1.0)) throw ConfigError("warm-up fraction must lie in [0, 1]");
  if (shape.widths.empty()) throw ConfigError("architecture needs at least one layer");
  for (std::size_t w : shape.widths)
    if (w == 0) throw ConfigError("layer widths must be positive");
  if (shape.bases_per_edge == 0) throw ConfigError("bases per edge must be positive");
  if (lambda_d > 0.0 && shape.widths.front() < 2) throw ConfigError("lambda_d > 0 needs at least 2 rules");
  if (shape.it2 && shape.family != MfFamily::Gaussian) throw ConfigError("IT2 is only available for the gaussian family");
}

double TrainConfig::lambda_s_at(std::size_t epoch) const {
  const auto ramp = static_cast<std::size_t>(std::llround(warmup_fraction * static_cast<double>(epochs)));
  if (ramp == 0 || epoch + 1 >= ramp) return lambda_s;
  return lambda_s * static_cast<double>(epoch + 1) / static_cast<double>(ramp);
}

Adam::Adam(const ParamSet& params, AdamOptions options) : opt_(options) {
  for (const auto& g : params) {
    m_.emplace_back(g.value.rows(), g.value.cols());
    v_.emplace_back(g.value.rows(), g.value.cols());
  }
}

void Adam::step(ParamSet& params, const std::vector<Matrix>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) throw ShapeError("Adam: group count changed");
  ++t_;
  const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
  for (std::size_t g = 0; g < params.size(); ++g) {
    auto p = params[g].value.values();
    const auto d = grads[g].values();
    auto m = m_[g].values();
    auto v = v_[g].values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = opt_.beta1 * m[i] + (1.0 - opt_.beta1) * d[i];
      v[i] = opt_.beta2 * v[i] + (1.0 - opt_.beta2) * d[i] * d[i];
      p[i] -= opt_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + opt_.epsilon);
    }
  }
}

double validation_metric(const KanfisModel& model, const Matrix& x, const Matrix& y) {
  if (model.task().is_classification()) {
    const auto pred = predict_class(model, x);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < y.rows(); ++r) correct += pred.labels[r] == static_cast<std::size_t>(y(r, 0));
    return static_cast<double>(correct) / static_cast<double>(y.rows());
  }
  const Matrix p = model_forward(model, x).prediction;
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = p.values()[i] - y.values()[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

double mean_pairwise_cosine(const Matrix& firing) {
  const double k = static_cast<double>(firing.cols());
  return distinctiveness_penalty(firing) / (k * (k - 1.0) / 2.0);
}

TrainReport train(KanfisModel& model, const Matrix& x, const Matrix& y, const TrainConfig& cfg,
                  std::optional<ValidationSet> validation) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  const bool classify = model.task().is_classification();
  if (x.cols() != model.input_dim()) {
    throw ShapeError("training data has " + std::to_string(x.cols()) + " features, model expects " +
                     std::to_string(model.input_dim()));
  }
  if (x.rows() == 0 || y.rows() != x.rows()) throw ShapeError("training inputs and targets differ in length");
  if (cfg.lambda_d > 0.0 && model.layers().front().d_out() < 2) throw ConfigError("lambda_d > 0 needs at least 2 rules");

  const bool scaled = !classify && cfg.standardize_target;
  Matrix y_fit = y;
  TargetScale ts{std::vector<double>(y.cols(), 0.0), std::vector<double>(y.cols(), 1.0)};
  if (scaled) {
    ts = target_scale(y);
    for (std::size_t r = 0; r < y.rows(); ++r)
      for (std::size_t c = 0; c < y.cols(); ++c) y_fit(r, c) = (y(r, c) - ts.mean[c]) / ts.sd[c];
  }
  const Matrix original_w = model.head_w(), original_b = model.head_b();
  if (scaled) unfold_target_scale(model, ts);
  const Matrix start_w = model.head_w(), start_b = model.head_b();

  ParamSet params = model.parameters();
  Adam adam(params, {cfg.learning_rate});
  Rng rng(cfg.seed ^ kShuffleStream);
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainReport report;
  const std::size_t n = x.rows();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const LossWeights weights{cfg.lambda_s_at(epoch), cfg.lambda_d};
    rng.shuffle(std::span<std::size_t>(order));
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.lambda_s = weights.lambda_s;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batches) {
      const std::size_t rows = std::min(cfg.batch_size, n - start);
      Matrix xb(rows, x.cols()), yb(rows, y.cols());
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t src = order[start + r];
        for (std::size_t c = 0; c < x.cols(); ++c) xb(r, c) = x(src, c);
        for (std::size_t c = 0; c < y.cols(); ++c) yb(r, c) = y_fit(src, c);
      }
      Tape tape;
      std::vector<Var> vars;
      vars.reserve(params.size());
      for (const auto& g : params) vars.push_back(tape.parameter(g.name, g.value));
      LossTerms terms;
      Var total = total_loss(model, vars, tape.constant(std::move(xb)), yb, weights, &terms);
      if (!std::isfinite(terms.total) || terms.total > kDivergenceLimit) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch + 1) + ", batch " +
                              std::to_string(batches + 1) + " (loss " + format_double(terms.total) + ")");
      }
      tape.backward(total);
      std::vector<Matrix> grads;
      grads.reserve(params.size());
      for (const auto& g : params) grads.push_back(tape.parameter_grad(g.name));
      adam.step(params, grads);
      model.set_parameters(params);

      rec.loss.task += terms.task;
      rec.loss.sparse += terms.sparse;
      rec.loss.distinct += terms.distinct;
    }
    const double nb = static_cast<double>(batches);
    rec.loss.task /= nb;
    rec.loss.sparse /= nb;
    rec.loss.distinct /= nb;
    rec.loss.total = rec.loss.task + weights.lambda_s * rec.loss.sparse + weights.lambda_d * rec.loss.distinct;

    rec.val_metric = std::numeric_limits<double>::quiet_NaN();
    if (validation && validation->x != nullptr) {
      KanfisModel view = model;
      if (scaled) fold_target_scale(view, ts);
      rec.val_metric = validation_metric(view, *validation->x, *validation->y);
    }
    report.epochs.push_back(rec);
  }
  if (scaled) {
    // An untouched head is restored exactly rather than through a rounding
    // divide-multiply round trip.
    if (model.head_w() == start_w && model.head_b() == start_b) {
      model.head_w() = original_w;
      model.head_b() = original_b;
    } else {
      fold_target_scale(model, ts);
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

void write_epoch_log(std::ostream& out, const TrainReport& report) {
  out << "epoch,task_loss,sparse,distinct,total,val_metric\n";
  for (const auto& e : report.epochs) {
    out << e.epoch << ',' << format_double(e.loss.task) << ',' << format_double(e.loss.sparse) << ','
        << format_double(e.loss.distinct) << ',' << format_double(e.loss.total) << ','
        << format_double(e.val_metric) << '\n';
  }
}

}  // namespace kanfis

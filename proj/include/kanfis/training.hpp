#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "kanfis/losses.hpp"
#include "kanfis/matrix.hpp"
#include "kanfis/network.hpp"

namespace kanfis {

struct TrainConfig {
  double lambda_s = 1e-2;
  double lambda_d = 1e-3;
  double learning_rate = 1e-2;
  std::size_t epochs = 200;
  std::size_t batch_size = 64;
  std::uint64_t seed = 42;
  ModelShape shape{{16}, 3, MfFamily::Gaussian, false};
  /// Fraction of epochs over which lambda_s ramps linearly up to its value.
  double warmup_fraction = 0.2;
  /// Initial logit of every mask entry.
  double mask_init = 0.0;
  /// Regression only: fit on z-scored targets and fold the scale into the head.
  bool standardize_target = true;

  /// Throws ConfigError on an invalid combination.
  void validate() const;
  /// lambda_s in effect for a 0-based epoch.
  double lambda_s_at(std::size_t epoch) const;
};

struct AdamOptions {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction, one moment pair per parameter group.
class Adam {
 public:
  Adam(const ParamSet& params, AdamOptions options);
  void step(ParamSet& params, const std::vector<Matrix>& grads);
  std::size_t steps() const { return t_; }

 private:
  AdamOptions opt_;
  std::vector<Matrix> m_, v_;
  std::size_t t_ = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double lambda_s = 0.0;
  LossTerms loss;         // batch means
  double val_metric = 0.0;  // RMSE (regression) or accuracy; NaN without validation data
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  double seconds = 0.0;
};

struct ValidationSet {
  const Matrix* x = nullptr;
  const Matrix* y = nullptr;
};

/// Mini-batch Adam on (x, y). `model` is updated in place; the run is
/// bitwise reproducible for a fixed configuration.
TrainReport train(KanfisModel& model, const Matrix& x, const Matrix& y, const TrainConfig& cfg,
                  std::optional<ValidationSet> validation = std::nullopt);

/// RMSE for regression, accuracy for classification.
double validation_metric(const KanfisModel& model, const Matrix& x, const Matrix& y);

/// Mean pairwise cosine between rule firing columns.
double mean_pairwise_cosine(const Matrix& firing);

/// Epoch log as CSV: epoch,task_loss,sparse,distinct,total,val_metric.
void write_epoch_log(std::ostream& out, const TrainReport& report);

}  // namespace kanfis

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kanfis/matrix.hpp"
#include "kanfis/membership.hpp"
#include "kanfis/tape.hpp"

namespace kanfis {

enum class TaskKind { Regression, Classification };

struct Task {
  TaskKind kind = TaskKind::Regression;
  std::size_t num_classes = 0;  // Classification only

  static Task regression() { return {TaskKind::Regression, 0}; }
  static Task classification(std::size_t classes) { return {TaskKind::Classification, classes}; }
  bool is_classification() const { return kind == TaskKind::Classification; }
};

/// Epsilon inside the per-sample standardization between layers.
inline constexpr double kNormEpsilon = 1e-5;

/// Read-only view of one layer's raw parameters. Row r = i * d_out + j of the
/// per-basis matrices holds the K bases of edge (i -> j).
struct LayerView {
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::size_t k = 0;
  MfFamily family = MfFamily::Gaussian;
  bool it2 = false;
  const Matrix* centers = nullptr;      // mu / c / beta
  const Matrix* widths = nullptr;       // sigma_raw / a_raw / slope / sigma_lower_raw
  const Matrix* shapes = nullptr;       // b_raw (Bell) or gap_raw (IT2); unused otherwise
  const Matrix* amplitudes = nullptr;   // amplitude_raw
  const Matrix* mask_logits = nullptr;  // [d_in x d_out]
};

/// One additive fuzzy layer: a d_in x d_out grid of K-basis edges gated by a
/// sigmoid soft mask.
class FuzzyLayer {
 public:
  FuzzyLayer(std::size_t d_in, std::size_t d_out, std::size_t k, MfFamily family, bool it2);

  std::size_t d_in() const { return d_in_; }
  std::size_t d_out() const { return d_out_; }
  std::size_t bases_per_edge() const { return k_; }
  MfFamily family() const { return family_; }
  bool it2() const { return it2_; }
  bool has_shapes() const { return it2_ || family_ == MfFamily::Bell; }

  /// Raw scalars per basis: 3 for Gaussian/Sigmoid, 4 for Bell and IT2.
  std::size_t params_per_basis() const { return has_shapes() ? 4 : 3; }
  std::size_t parameter_count() const;

  Matrix& centers() { return centers_; }
  Matrix& widths() { return widths_; }
  Matrix& shapes() { return shapes_; }
  Matrix& amplitudes() { return amplitudes_; }
  Matrix& mask_logits() { return mask_logits_; }
  const Matrix& centers() const { return centers_; }
  const Matrix& widths() const { return widths_; }
  const Matrix& shapes() const { return shapes_; }
  const Matrix& amplitudes() const { return amplitudes_; }
  const Matrix& mask_logits() const { return mask_logits_; }

  std::size_t edge_row(std::size_t i, std::size_t j) const { return i * d_out_ + j; }

  /// Materialized basis list of edge (i -> j).
  Edge edge(std::size_t i, std::size_t j) const;
  /// sigmoid(mask_logits), entrywise in (0, 1).
  Matrix mask() const;

  LayerView view() const;

 private:
  std::size_t d_in_, d_out_, k_;
  MfFamily family_;
  bool it2_;
  Matrix centers_, widths_, shapes_, amplitudes_, mask_logits_;
};

/// Rebuilds the effective widths from raw values for edge row r, basis k.
struct EffectiveBasis {
  double center;
  double width;   // sigma, a, slope or sigma_lower
  double width2;  // Bell b or IT2 sigma_upper
  double amplitude;
};
EffectiveBasis effective_basis(const LayerView& v, std::size_t row, std::size_t k);

/// h[b, j] = sum_i mask_ij * sum_k amp_ijk * phi_ijk(x[b, i]).
Matrix layer_forward(const FuzzyLayer& layer, const Matrix& x);
Matrix layer_forward(const LayerView& view, const Matrix& x);

/// Per-row standardization across units with epsilon kNormEpsilon.
Matrix normalize(const Matrix& h);

/// Row-wise softmax.
Matrix softmax_rows(const Matrix& logits);

struct ForwardTrace {
  std::vector<Matrix> pre_norm;  // h(l) before normalization, one per layer
  Matrix firing;                 // first layer pre-normalization output
  Matrix prediction;             // B x d_y
};

struct ModelShape {
  std::vector<std::size_t> widths;  // rule count per layer, e.g. {16}
  std::size_t bases_per_edge = 3;
  MfFamily family = MfFamily::Gaussian;
  bool it2 = false;
};

struct InitOptions {
  std::uint64_t seed = 42;
  double mask_logit = 0.0;  // initial mask logit for every edge
};

class KanfisModel {
 public:
  KanfisModel(std::vector<FuzzyLayer> layers, Matrix head_w, Matrix head_b, Task task);

  /// Randomly initialized model for `inputs` standardized features.
  static KanfisModel create(std::size_t inputs, const ModelShape& shape, Task task,
                            const InitOptions& init);

  const std::vector<FuzzyLayer>& layers() const { return layers_; }
  std::vector<FuzzyLayer>& layers() { return layers_; }
  const Matrix& head_w() const { return head_w_; }
  const Matrix& head_b() const { return head_b_; }
  Matrix& head_w() { return head_w_; }
  Matrix& head_b() { return head_b_; }
  const Task& task() const { return task_; }

  std::size_t input_dim() const { return layers_.front().d_in(); }
  std::size_t output_dim() const { return head_w_.rows(); }
  MfFamily family() const { return layers_.front().family(); }
  bool it2() const { return layers_.front().it2(); }
  std::size_t bases_per_edge() const { return layers_.front().bases_per_edge(); }

  /// All trainable groups in registry order: per layer centers, widths,
  /// [shapes], amplitudes, mask_logits; then head.W, head.b.
  ParamSet parameters() const;
  /// Inverse of parameters(); names and shapes must match.
  void set_parameters(const ParamSet& params);
  std::size_t parameter_count() const;

 private:
  void validate() const;

  std::vector<FuzzyLayer> layers_;
  Matrix head_w_;  // d_y x H
  Matrix head_b_;  // 1 x d_y
  Task task_;
};

ForwardTrace model_forward(const KanfisModel& model, const Matrix& x);

struct ClassPrediction {
  std::vector<std::size_t> labels;
  Matrix probabilities;
};

/// softmax + argmax over the head outputs. Throws TaskKindError on a
/// regression model.
ClassPrediction predict_class(const KanfisModel& model, const Matrix& x);

// Taped evaluation.

/// Fused layer node; `groups` are the layer's parameter Vars in registry order.
Var layer_forward(const FuzzyLayer& structure, std::span<const Var> groups, Var x);
Var normalize(Var h);

struct TapedForward {
  Var prediction;
  Var firing;
  std::vector<Var> mask_logits;  // one per layer
};

/// Forward pass on `tape` with parameters taken from `params` (in the order
/// returned by KanfisModel::parameters()); `model` supplies structure only.
TapedForward model_forward(const KanfisModel& model, std::span<const Var> params, Var x);

}  // namespace kanfis

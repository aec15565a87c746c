#include "kanfis/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kanfis/error.hpp"
#include "kanfis/kernels.hpp"
#include "kanfis/random.hpp"

namespace kanfis {

// ---------------------------------------------------------------------------
// FuzzyLayer

FuzzyLayer::FuzzyLayer(std::size_t d_in, std::size_t d_out, std::size_t k, MfFamily family,
                       bool it2)
    : d_in_(d_in), d_out_(d_out), k_(k), family_(family), it2_(it2) {
  if (d_in == 0 || d_out == 0) throw ConfigError("layer dimensions must be positive");
  if (k == 0) throw ConfigError("an edge needs at least one basis (K >= 1)");
  if (it2 && family != MfFamily::Gaussian) {
    throw ConfigError("interval type-2 bases are only defined for the gaussian family");
  }
  const std::size_t rows = d_in * d_out;
  centers_ = Matrix(rows, k);
  widths_ = Matrix(rows, k);
  if (has_shapes()) shapes_ = Matrix(rows, k);
  amplitudes_ = Matrix(rows, k);
  mask_logits_ = Matrix(d_in, d_out);
}

std::size_t FuzzyLayer::parameter_count() const {
  return d_in_ * d_out_ * (k_ * params_per_basis() + 1);
}

LayerView FuzzyLayer::view() const {
  return LayerView{d_in_,    d_out_,   k_,          family_,     it2_,
                   &centers_, &widths_, &shapes_,   &amplitudes_, &mask_logits_};
}

Matrix FuzzyLayer::mask() const {
  Matrix m(d_in_, d_out_);
  for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] = logistic(mask_logits_.values()[i]);
  return m;
}

Edge FuzzyLayer::edge(std::size_t i, std::size_t j) const {
  const std::size_t r = edge_row(i, j);
  std::vector<Basis> bases;
  bases.reserve(k_);
  for (std::size_t k = 0; k < k_; ++k) {
    const double c = centers_(r, k), w = widths_(r, k), a = amplitudes_(r, k);
    if (it2_) {
      bases.emplace_back(It2GaussianBasis{c, w, shapes_(r, k), a});
    } else if (family_ == MfFamily::Gaussian) {
      bases.emplace_back(GaussianBasis{c, w, a});
    } else if (family_ == MfFamily::Bell) {
      bases.emplace_back(BellBasis{c, w, shapes_(r, k), a});
    } else {
      bases.emplace_back(SigmoidBasis{c, w, a});
    }
  }
  return Edge(std::move(bases));
}

EffectiveBasis effective_basis(const LayerView& v, std::size_t row, std::size_t k) {
  EffectiveBasis e{};
  e.center = (*v.centers)(row, k);
  e.amplitude = softplus((*v.amplitudes)(row, k));
  const double w = (*v.widths)(row, k);
  if (v.it2) {
    e.width = softplus(w) + kWidthFloor;
    e.width2 = e.width + softplus((*v.shapes)(row, k)) + kWidthFloor;
  } else if (v.family == MfFamily::Gaussian) {
    e.width = softplus(w) + kWidthFloor;
  } else if (v.family == MfFamily::Bell) {
    e.width = softplus(w) + kWidthFloor;
    e.width2 = softplus((*v.shapes)(row, k)) + kWidthFloor;
  } else {
    e.width = w;
  }
  return e;
}

namespace {

void check_input(const LayerView& v, const Matrix& x) {
  if (x.cols() != v.d_in) {
    throw ShapeError("layer expects " + std::to_string(v.d_in) + " inputs, got x of shape " +
                     x.shape_string());
  }
}

void gather_column(const Matrix& x, std::size_t col, std::vector<double>& out) {
  out.resize(x.rows());
  for (std::size_t b = 0; b < x.rows(); ++b) out[b] = x(b, col);
}

// Column-major accumulation buffer: unit j occupies [j*B, (j+1)*B).
std::vector<double> forward_columns(const LayerView& v, const Matrix& x) {
  const auto& kt = kernels::active();
  const std::size_t batch = x.rows();
  std::vector<double> hcols(v.d_out * batch, 0.0);
  std::vector<double> xcol;
  for (std::size_t i = 0; i < v.d_in; ++i) {
    gather_column(x, i, xcol);
    for (std::size_t j = 0; j < v.d_out; ++j) {
      const std::size_t row = i * v.d_out + j;
      const double mask = logistic((*v.mask_logits)(i, j));
      std::span<double> acc(hcols.data() + j * batch, batch);
      for (std::size_t k = 0; k < v.k; ++k) {
        const EffectiveBasis e = effective_basis(v, row, k);
        const double scale = mask * e.amplitude;
        if (v.it2) {
          kt.gaussian_forward(xcol, e.center, e.width2, 0.5 * scale, acc);
          kt.gaussian_forward(xcol, e.center, e.width, 0.5 * scale, acc);
        } else if (v.family == MfFamily::Gaussian) {
          kt.gaussian_forward(xcol, e.center, e.width, scale, acc);
        } else if (v.family == MfFamily::Bell) {
          kt.bell_forward(xcol, e.center, e.width, e.width2, scale, acc);
        } else {
          kt.sigmoid_forward(xcol, e.center, e.width, scale, acc);
        }
      }
    }
  }
  return hcols;
}

Matrix columns_to_matrix(const std::vector<double>& cols, std::size_t batch, std::size_t units) {
  Matrix h(batch, units);
  for (std::size_t j = 0; j < units; ++j)
    for (std::size_t b = 0; b < batch; ++b) h(b, j) = cols[j * batch + b];
  return h;
}

struct LayerGrads {
  Matrix* centers;
  Matrix* widths;
  Matrix* shapes;
  Matrix* amplitudes;
  Matrix* mask_logits;
  Matrix* x;  // may be null
};

void backward_layer(const LayerView& v, const Matrix& x, const Matrix& upstream, LayerGrads out) {
  const auto& kt = kernels::active();
  const std::size_t batch = x.rows();
  std::vector<double> gcols(v.d_out * batch);
  for (std::size_t j = 0; j < v.d_out; ++j)
    for (std::size_t b = 0; b < batch; ++b) gcols[j * batch + b] = upstream(b, j);

  std::vector<double> xcol, dxcol;
  for (std::size_t i = 0; i < v.d_in; ++i) {
    gather_column(x, i, xcol);
    std::span<double> dx;
    if (out.x != nullptr) {
      dxcol.assign(batch, 0.0);
      dx = dxcol;
    }
    for (std::size_t j = 0; j < v.d_out; ++j) {
      const std::size_t row = i * v.d_out + j;
      const double mask = logistic((*v.mask_logits)(i, j));
      std::span<const double> g(gcols.data() + j * batch, batch);
      double d_mask = 0.0;
      for (std::size_t k = 0; k < v.k; ++k) {
        const EffectiveBasis e = effective_basis(v, row, k);
        const double scale = mask * e.amplitude;
        const double w_raw = (*v.widths)(row, k);
        double d_scale = 0.0;
        if (v.it2) {
          double su[3], sl[3];
          const double half = 0.5 * scale;
          kt.gaussian_backward(xcol, e.center, e.width2, half, g, dx, su);
          kt.gaussian_backward(xcol, e.center, e.width, half, g, dx, sl);
          const double su2 = e.width2 * e.width2, sl2 = e.width * e.width;
          d_scale = 0.5 * (su[0] + sl[0]);
          (*out.centers)(row, k) += half * (su[1] / su2 + sl[1] / sl2);
          const double d_sigma_u = half * su[2] / (su2 * e.width2);
          const double d_sigma_l = half * sl[2] / (sl2 * e.width);
          (*out.widths)(row, k) += (d_sigma_l + d_sigma_u) * logistic(w_raw);
          (*out.shapes)(row, k) += d_sigma_u * logistic((*v.shapes)(row, k));
        } else if (v.family == MfFamily::Gaussian) {
          double s[3];
          kt.gaussian_backward(xcol, e.center, e.width, scale, g, dx, s);
          const double s2 = e.width * e.width;
          d_scale = s[0];
          (*out.centers)(row, k) += scale * s[1] / s2;
          (*out.widths)(row, k) += scale * s[2] / (s2 * e.width) * logistic(w_raw);
        } else if (v.family == MfFamily::Bell) {
          double s[4];
          kt.bell_backward(xcol, e.center, e.width, e.width2, scale, g, dx, s);
          const double f = scale * 2.0 * e.width2 / e.width;
          d_scale = s[0];
          (*out.centers)(row, k) += f * s[1];
          (*out.widths)(row, k) += f * s[2] * logistic(w_raw);
          (*out.shapes)(row, k) += -2.0 * scale * s[3] * logistic((*v.shapes)(row, k));
        } else {
          double s[3];
          kt.sigmoid_backward(xcol, e.center, e.width, scale, g, dx, s);
          d_scale = s[0];
          (*out.centers)(row, k) += -scale * e.width * s[2];
          (*out.widths)(row, k) += scale * s[1];
        }
        (*out.amplitudes)(row, k) += mask * d_scale * logistic((*v.amplitudes)(row, k));
        d_mask += e.amplitude * d_scale;
      }
      (*out.mask_logits)(i, j) += d_mask * mask * (1.0 - mask);
    }
    if (out.x != nullptr) {
      for (std::size_t b = 0; b < batch; ++b) (*out.x)(b, i) += dxcol[b];
    }
  }
}

}  // namespace

Matrix layer_forward(const LayerView& view, const Matrix& x) {
  check_input(view, x);
  return columns_to_matrix(forward_columns(view, x), x.rows(), view.d_out);
}

Matrix layer_forward(const FuzzyLayer& layer, const Matrix& x) {
  return layer_forward(layer.view(), x);
}

Matrix normalize(const Matrix& h) {
  if (h.cols() == 0) throw ShapeError("normalize needs at least one unit");
  Matrix out(h.rows(), h.cols());
  const double n = static_cast<double>(h.cols());
  for (std::size_t r = 0; r < h.rows(); ++r) {
    auto row = h.row_span(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(var + kNormEpsilon);
    for (std::size_t c = 0; c < h.cols(); ++c) out(r, c) = (row[c] - mean) * inv;
  }
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row_span(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) z += (p(r, c) = std::exp(row[c] - mx));
    for (std::size_t c = 0; c < row.size(); ++c) p(r, c) /= z;
  }
  return p;
}

// ---------------------------------------------------------------------------
// KanfisModel

KanfisModel::KanfisModel(std::vector<FuzzyLayer> layers, Matrix head_w, Matrix head_b, Task task)
    : layers_(std::move(layers)), head_w_(std::move(head_w)), head_b_(std::move(head_b)),
      task_(task) {
  validate();
}

void KanfisModel::validate() const {
  if (layers_.empty()) throw ConfigError("a model needs at least one fuzzy layer");
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    if (layers_[l].d_out() != layers_[l + 1].d_in()) {
      throw ShapeError("layer " + std::to_string(l) + " emits " +
                       std::to_string(layers_[l].d_out()) + " units but layer " +
                       std::to_string(l + 1) + " expects " + std::to_string(layers_[l + 1].d_in()));
    }
  }
  for (const auto& layer : layers_) {
    if (layer.family() != layers_.front().family() || layer.it2() != layers_.front().it2() ||
        layer.bases_per_edge() != layers_.front().bases_per_edge()) {
      throw ConfigError("all layers must share membership family, IT2 flag and K");
    }
  }
  if (head_w_.cols() != layers_.back().d_out()) {
    throw ShapeError("head W has " + std::to_string(head_w_.cols()) + " columns but the last layer has " +
                     std::to_string(layers_.back().d_out()) + " units");
  }
  if (head_b_.rows() != 1 || head_b_.cols() != head_w_.rows()) {
    throw ShapeError("head b must be 1x" + std::to_string(head_w_.rows()) + ", got " +
                     head_b_.shape_string());
  }
  if (task_.is_classification()) {
    if (task_.num_classes < 2) throw ConfigError("classification needs at least two classes");
    if (head_w_.rows() != task_.num_classes) {
      throw ShapeError("classification head must emit one logit per class");
    }
  }
}

KanfisModel KanfisModel::create(std::size_t inputs, const ModelShape& shape, Task task,
                                const InitOptions& init) {
  if (shape.widths.empty()) throw ConfigError("architecture needs at least one layer width");
  Rng rng(init.seed);
  const std::size_t k = shape.bases_per_edge;
  const double spacing = k > 1 ? 4.0 / static_cast<double>(k - 1) : 2.0;
  // Neighbouring Gaussians cross at membership 0.5.
  const double sigma0 = 0.5 * spacing / std::sqrt(2.0 * std::log(2.0));

  std::vector<FuzzyLayer> layers;
  std::size_t d_in = inputs;
  for (std::size_t width : shape.widths) {
    FuzzyLayer layer(d_in, width, k, shape.family, shape.it2);
    for (std::size_t r = 0; r < d_in * width; ++r) {
      for (std::size_t b = 0; b < k; ++b) {
        const double anchor = k > 1 ? -2.0 + spacing * static_cast<double>(b) : 0.0;
        layer.centers()(r, b) = anchor + rng.uniform(-0.25, 0.25) * spacing;
        layer.amplitudes()(r, b) = softplus_inverse(1.0 / static_cast<double>(k));
        if (shape.it2) {
          layer.widths()(r, b) = softplus_inverse(0.8 * sigma0 - kWidthFloor);
          layer.shapes()(r, b) = softplus_inverse(0.4 * sigma0 - kWidthFloor);
        } else if (shape.family == MfFamily::Gaussian) {
          layer.widths()(r, b) = softplus_inverse(sigma0 - kWidthFloor);
        } else if (shape.family == MfFamily::Bell) {
          layer.widths()(r, b) = softplus_inverse(0.5 * spacing - kWidthFloor);
          layer.shapes()(r, b) = softplus_inverse(2.0 - kWidthFloor);
        } else {
          const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
          layer.widths()(r, b) = sign * 4.0 / spacing;
        }
      }
    }
    layer.mask_logits().fill(init.mask_logit);
    layers.push_back(std::move(layer));
    d_in = width;
  }

  const std::size_t outputs = task.is_classification() ? task.num_classes : 1;
  const std::size_t hidden = shape.widths.back();
  Matrix w(outputs, hidden);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& v : w.values()) v = rng.uniform(-bound, bound);
  return KanfisModel(std::move(layers), std::move(w), Matrix(1, outputs), task);
}

ParamSet KanfisModel::parameters() const {
  ParamSet ps;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const std::string p = "layer" + std::to_string(l) + ".";
    ps.push_back({p + "centers", layer.centers()});
    ps.push_back({p + "widths", layer.widths()});
    if (layer.has_shapes()) ps.push_back({p + "shapes", layer.shapes()});
    ps.push_back({p + "amplitudes", layer.amplitudes()});
    ps.push_back({p + "mask_logits", layer.mask_logits()});
  }
  ps.push_back({"head.W", head_w_});
  ps.push_back({"head.b", head_b_});
  return ps;
}

void KanfisModel::set_parameters(const ParamSet& params) {
  const ParamSet current = parameters();
  if (params.size() != current.size()) {
    throw ShapeError("expected " + std::to_string(current.size()) + " parameter groups, got " +
                     std::to_string(params.size()));
  }
  for (std::size_t g = 0; g < params.size(); ++g) {
    if (params[g].name != current[g].name || params[g].value.rows() != current[g].value.rows() ||
        params[g].value.cols() != current[g].value.cols()) {
      throw ShapeError("parameter group mismatch at '" + current[g].name + "'");
    }
  }
  std::size_t g = 0;
  for (auto& layer : layers_) {
    layer.centers() = params[g++].value;
    layer.widths() = params[g++].value;
    if (layer.has_shapes()) layer.shapes() = params[g++].value;
    layer.amplitudes() = params[g++].value;
    layer.mask_logits() = params[g++].value;
  }
  head_w_ = params[g++].value;
  head_b_ = params[g++].value;
}

std::size_t KanfisModel::parameter_count() const { return scalar_count(parameters()); }

ForwardTrace model_forward(const KanfisModel& model, const Matrix& x) {
  ForwardTrace trace;
  Matrix h = x;
  const auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix pre = layer_forward(layers[l], h);
    if (l == 0) trace.firing = pre;
    h = (l + 1 < layers.size()) ? normalize(pre) : pre;
    trace.pre_norm.push_back(std::move(pre));
  }
  Matrix y = matmul(h, model.head_w().transposed());
  for (std::size_t r = 0; r < y.rows(); ++r)
    for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) += model.head_b()(0, c);
  trace.prediction = std::move(y);
  return trace;
}

ClassPrediction predict_class(const KanfisModel& model, const Matrix& x) {
  if (!model.task().is_classification()) {
    throw TaskKindError("predict_class called on a regression model");
  }
  ClassPrediction out;
  out.probabilities = softmax_rows(model_forward(model, x).prediction);
  out.labels.resize(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = out.probabilities.row_span(r);
    out.labels[r] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Taped evaluation

Var layer_forward(const FuzzyLayer& structure, std::span<const Var> groups, Var x) {
  const bool shapes = structure.has_shapes();
  const std::size_t expected = shapes ? 5 : 4;
  if (groups.size() != expected) {
    throw ShapeError("layer expects " + std::to_string(expected) + " parameter groups");
  }
  Tape& tape = *x.tape();
  const std::size_t ic = groups[0].id(), iw = groups[1].id();
  const std::size_t is = shapes ? groups[2].id() : 0;
  const std::size_t ia = groups[shapes ? 3 : 2].id();
  const std::size_t im = groups[shapes ? 4 : 3].id();
  const std::size_t ix = x.id();

  const LayerView base{structure.d_in(), structure.d_out(), structure.bases_per_edge(),
                       structure.family(), structure.it2(), nullptr, nullptr, nullptr, nullptr,
                       nullptr};
  auto bind = [=](const Tape& tp) {
    LayerView v = base;
    v.centers = &tp.value(ic);
    v.widths = &tp.value(iw);
    v.shapes = shapes ? &tp.value(is) : nullptr;
    v.amplitudes = &tp.value(ia);
    v.mask_logits = &tp.value(im);
    return v;
  };

  Matrix h = layer_forward(bind(tape), x.value());
  std::vector<std::size_t> inputs = {ix, ic, iw};
  if (shapes) inputs.push_back(is);
  inputs.push_back(ia);
  inputs.push_back(im);

  return tape.record(std::move(h), std::move(inputs), [=](Tape& tp, std::size_t self) {
    const LayerView v = bind(tp);
    Matrix dummy_shapes;
    LayerGrads grads{&tp.grad_buffer(ic), &tp.grad_buffer(iw),
                     shapes ? &tp.grad_buffer(is) : &dummy_shapes, &tp.grad_buffer(ia),
                     &tp.grad_buffer(im), tp.needs_grad(ix) ? &tp.grad_buffer(ix) : nullptr};
    backward_layer(v, tp.value(ix), tp.grad(self), grads);
  });
}

Var normalize(Var h) {
  Matrix y = normalize(h.value());
  const std::size_t ih = h.id();
  return h.tape()->record(std::move(y), {ih}, [ih](Tape& tp, std::size_t self) {
    const Matrix& x = tp.value(ih);
    const Matrix& y = tp.value(self);
    const Matrix& g = tp.grad(self);
    Matrix& gx = tp.grad_buffer(ih);
    const double n = static_cast<double>(x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      double mean = 0.0;
      for (double v : x.row_span(r)) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : x.row_span(r)) var += (v - mean) * (v - mean);
      var /= n;
      const double inv = 1.0 / std::sqrt(var + kNormEpsilon);
      double g_mean = 0.0, gy_mean = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        g_mean += g(r, c);
        gy_mean += g(r, c) * y(r, c);
      }
      g_mean /= n;
      gy_mean /= n;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        gx(r, c) += inv * (g(r, c) - g_mean - y(r, c) * gy_mean);
      }
    }
  });
}

TapedForward model_forward(const KanfisModel& model, std::span<const Var> params, Var x) {
  TapedForward out;
  std::size_t g = 0;
  Var h = x;
  const auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::size_t n = layers[l].has_shapes() ? 5 : 4;
    if (g + n > params.size()) throw ShapeError("too few parameter Vars for the model");
    Var pre = layer_forward(layers[l], params.subspan(g, n), h);
    out.mask_logits.push_back(params[g + n - 1]);
    g += n;
    if (l == 0) out.firing = pre;
    h = (l + 1 < layers.size()) ? normalize(pre) : pre;
  }
  if (g + 2 != params.size()) throw ShapeError("parameter Var count does not match the model");
  out.prediction = add_row_vector(matmul(h, transpose(params[g])), params[g + 1]);
  return out;
}

}  // namespace kanfis

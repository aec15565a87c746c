#include "kanfis/tape.hpp"

#include <algorithm>

#include "kanfis/error.hpp"

namespace kanfis {

std::size_t scalar_count(const ParamSet& params) {
  std::size_t n = 0;
  for (const auto& g : params) n += g.value.size();
  return n;
}

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ShapeError("expected 1x1, got " + v.shape_string());
  return v(0, 0);
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, {}, {}, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(const std::string& name, Matrix value) {
  for (const auto& [n, id] : params_) {
    if (n == name) throw ConfigError("parameter registered twice: " + name);
  }
  nodes_.push_back(Node{std::move(value), {}, {}, {}, true});
  params_.emplace_back(name, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::vector<std::size_t> inputs, BackwardFn backward) {
  const bool needs = std::any_of(inputs.begin(), inputs.end(),
                                 [this](std::size_t i) { return nodes_.at(i).needs_grad; });
  nodes_.push_back(Node{std::move(value), {}, needs ? std::move(backward) : BackwardFn{},
                        std::move(inputs), needs});
  return Var(this, nodes_.size() - 1);
}

Matrix& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_.at(id);
  if (n.grad.rows() != n.value.rows() || n.grad.cols() != n.value.cols()) {
    n.grad = Matrix(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

const Matrix& Tape::grad(std::size_t id) const {
  // Const access must not allocate; unused nodes report through grad_buffer
  // once backward() has run, which zero-fills every participating leaf.
  return nodes_.at(id).grad;
}

void Tape::backward(Var output) {
  if (output.tape_ != this) throw Error("backward called with a foreign Var");
  const Matrix& out = nodes_.at(output.id_).value;
  if (out.rows() != 1 || out.cols() != 1) {
    throw ShapeError("backward requires a 1x1 output, got " + out.shape_string());
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].needs_grad) grad_buffer(i).fill(0.0);
  }
  for (const auto& [name, id] : params_) grad_buffer(id);
  grad_buffer(output.id_)(0, 0) = 1.0;

  visits_ = 0;
  for (std::size_t i = output.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward) continue;
    n.backward(*this, i);
    ++visits_;
  }
}

const Matrix& Tape::parameter_grad(const std::string& name) const {
  for (const auto& [n, id] : params_) {
    if (n == name) return nodes_[id].grad;
  }
  throw ConfigError("unknown parameter: " + name);
}

std::vector<std::string> Tape::parameter_names() const {
  std::vector<std::string> names;
  names.reserve(params_.size());
  for (const auto& [n, id] : params_) names.push_back(n);
  return names;
}

namespace {

void require_same_tape(Var a, Var b) {
  if (a.tape() != b.tape()) throw Error("operands recorded on different tapes");
}

}  // namespace

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  Tape& t = *a.tape();
  Matrix v = matmul(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(v), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    // dA = G B^T, dB = A^T G
    if (tp.needs_grad(ia)) {
      const Matrix& B = tp.value(ib);
      Matrix& ga = tp.grad_buffer(ia);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t k = 0; k < B.rows(); ++k) {
          double s = 0.0;
          for (std::size_t j = 0; j < g.cols(); ++j) s += g(i, j) * B(k, j);
          ga(i, k) += s;
        }
    }
    if (tp.needs_grad(ib)) {
      const Matrix& A = tp.value(ia);
      Matrix& gb = tp.grad_buffer(ib);
      for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < A.cols(); ++k) {
          const double aik = A(i, k);
          for (std::size_t j = 0; j < g.cols(); ++j) gb(k, j) += aik * g(i, j);
        }
    }
  });
}

Var transpose(Var a) {
  Tape& t = *a.tape();
  const std::size_t ia = a.id();
  return t.record(a.value().transposed(), {ia}, [ia](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    Matrix& ga = tp.grad_buffer(ia);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) ga(c, r) += g(r, c);
  });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) {
    throw ShapeError("add shape mismatch: " + av.shape_string() + " + " + bv.shape_string());
  }
  Matrix v = av;
  for (std::size_t i = 0; i < v.size(); ++i) v.values()[i] += bv.values()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(v), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    for (std::size_t id : {ia, ib}) {
      if (!tp.needs_grad(id)) continue;
      Matrix& gi = tp.grad_buffer(id);
      for (std::size_t i = 0; i < g.size(); ++i) gi.values()[i] += g.values()[i];
    }
  });
}

Var add_row_vector(Var m, Var v) {
  require_same_tape(m, v);
  const Matrix& mv = m.value();
  const Matrix& vv = v.value();
  if (vv.rows() != 1 || vv.cols() != mv.cols()) {
    throw ShapeError("add_row_vector shape mismatch: " + mv.shape_string() + " + " +
                     vv.shape_string());
  }
  Matrix out = mv;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += vv(0, c);
  const std::size_t im = m.id(), iv = v.id();
  return m.tape()->record(std::move(out), {im, iv}, [im, iv](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    if (tp.needs_grad(im)) {
      Matrix& gm = tp.grad_buffer(im);
      for (std::size_t i = 0; i < g.size(); ++i) gm.values()[i] += g.values()[i];
    }
    if (tp.needs_grad(iv)) {
      Matrix& gv = tp.grad_buffer(iv);
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) gv(0, c) += g(r, c);
    }
  });
}

Var scale(Var a, double factor) {
  Matrix v = a.value();
  for (double& x : v.values()) x *= factor;
  const std::size_t ia = a.id();
  return a.tape()->record(std::move(v), {ia}, [ia, factor](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    Matrix& ga = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga.values()[i] += factor * g.values()[i];
  });
}

Var mul(Var a, Var b) {
  require_same_tape(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) {
    throw ShapeError("mul shape mismatch: " + av.shape_string() + " * " + bv.shape_string());
  }
  Matrix v = av;
  for (std::size_t i = 0; i < v.size(); ++i) v.values()[i] *= bv.values()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(v), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(self);
    const Matrix& A = tp.value(ia);
    const Matrix& B = tp.value(ib);
    if (tp.needs_grad(ia)) {
      Matrix& ga = tp.grad_buffer(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga.values()[i] += g.values()[i] * B.values()[i];
    }
    if (tp.needs_grad(ib)) {
      Matrix& gb = tp.grad_buffer(ib);
      for (std::size_t i = 0; i < g.size(); ++i) gb.values()[i] += g.values()[i] * A.values()[i];
    }
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double x : a.value().values()) s += x;
  const std::size_t ia = a.id();
  return a.tape()->record(Matrix(1, 1, s), {ia}, [ia](Tape& tp, std::size_t self) {
    const double g = tp.grad(self)(0, 0);
    Matrix& ga = tp.grad_buffer(ia);
    for (double& x : ga.values()) x += g;
  });
}

}  // namespace kanfis

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kanfis/matrix.hpp"

namespace kanfis {

class Tape;

/// A named block of trainable scalars, e.g. "layer0.centers".
struct ParamGroup {
  std::string name;
  Matrix value;
};

using ParamSet = std::vector<ParamGroup>;

/// Total number of scalars across all groups.
std::size_t scalar_count(const ParamSet& params);

/// Handle to a node recorded on a Tape. Cheap to copy; only valid while the
/// tape that produced it is alive.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  const Matrix& grad() const;
  std::size_t id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }
  double scalar() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode gradient tape over matrix-valued nodes.
///
/// Nodes are appended in evaluation order, so creation order is already a
/// topological order and backward() simply walks the node list in reverse.
/// Each backward rule reads the gradient of its own output and accumulates
/// into the gradients of its inputs.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Constant input; never receives a gradient.
  Var constant(Matrix value);

  /// Trainable leaf registered under `name`.
  Var parameter(const std::string& name, Matrix value);

  /// Records an operation whose value has already been computed.
  Var record(Matrix value, std::vector<std::size_t> inputs, BackwardFn backward);

  /// Seeds d(output)/d(output) = 1 and propagates. `output` must be 1x1.
  void backward(Var output);

  const Matrix& value(std::size_t id) const { return nodes_.at(id).value; }
  const Matrix& grad(std::size_t id) const;
  bool needs_grad(std::size_t id) const { return nodes_.at(id).needs_grad; }

  /// Gradient buffer of node `id`, zero-allocated on first use.
  Matrix& grad_buffer(std::size_t id);

  /// Gradient of a registered parameter by name. A parameter that did not
  /// participate in the forward pass yields an exactly-zero matrix.
  const Matrix& parameter_grad(const std::string& name) const;
  std::vector<std::string> parameter_names() const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  /// Number of backward rules executed by the last backward() call.
  std::size_t backward_visits() const noexcept { return visits_; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    std::vector<std::size_t> inputs;
    bool needs_grad = false;
  };

  std::vector<Node> nodes_;
  std::vector<std::pair<std::string, std::size_t>> params_;
  std::size_t visits_ = 0;
};

// Taped primitives. All of them record an adjoint rule when any input needs
// a gradient and behave as plain evaluation otherwise.

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
/// m[B x C] + v[1 x C] broadcast over rows.
Var add_row_vector(Var m, Var v);
Var scale(Var a, double factor);
/// Elementwise product of equally shaped operands.
Var mul(Var a, Var b);
/// Sum of all entries as a 1x1 node.
Var sum(Var a);

}  // namespace kanfis

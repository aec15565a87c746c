#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kanfis/tape.hpp"

namespace kanfis {

/// Builds a scalar (1x1) node from parameter leaves, one Var per group of
/// the ParamSet in the same order.
using ScalarObjective = std::function<Var(Tape&, const std::vector<Var>&)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_group;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// Compares the tape gradient of `f` at `theta` with central differences of
/// step `h`. The error per scalar is |analytic - numeric| / max(1, |numeric|).
/// Throws EvaluationError if `f` is non-finite at theta or a perturbation.
GradCheckResult grad_check(const ScalarObjective& f, const ParamSet& theta, double h = 1e-5);

/// Tape gradient of `f` at `theta`, one matrix per group.
std::vector<Matrix> analytic_gradient(const ScalarObjective& f, const ParamSet& theta);

/// Plain evaluation of `f` at `theta`.
double evaluate(const ScalarObjective& f, const ParamSet& theta);

}  // namespace kanfis

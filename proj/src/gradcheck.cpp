#include "kanfis/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "kanfis/error.hpp"

namespace kanfis {

namespace {

std::vector<Var> register_all(Tape& tape, const ParamSet& theta) {
  std::vector<Var> vars;
  vars.reserve(theta.size());
  for (const auto& g : theta) vars.push_back(tape.parameter(g.name, g.value));
  return vars;
}

}  // namespace

double evaluate(const ScalarObjective& f, const ParamSet& theta) {
  Tape tape;
  const double v = f(tape, register_all(tape, theta)).scalar();
  if (!std::isfinite(v)) throw EvaluationError("objective is not finite");
  return v;
}

std::vector<Matrix> analytic_gradient(const ScalarObjective& f, const ParamSet& theta) {
  Tape tape;
  auto vars = register_all(tape, theta);
  Var out = f(tape, vars);
  if (!std::isfinite(out.scalar())) throw EvaluationError("objective is not finite");
  tape.backward(out);
  std::vector<Matrix> grads;
  grads.reserve(vars.size());
  for (const auto& v : vars) grads.push_back(v.grad());
  return grads;
}

GradCheckResult grad_check(const ScalarObjective& f, const ParamSet& theta, double h) {
  if (!(h > 0.0)) throw DomainError("grad_check step must be positive");
  const auto grads = analytic_gradient(f, theta);

  GradCheckResult result;
  ParamSet probe = theta;
  for (std::size_t g = 0; g < probe.size(); ++g) {
    auto values = probe[g].value.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double fp = evaluate(f, probe);
      values[i] = saved - h;
      const double fm = evaluate(f, probe);
      values[i] = saved;

      const double numeric = (fp - fm) / (2.0 * h);
      const double analytic = grads[g].values()[i];
      const double err = std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
      ++result.checked;
      if (result.checked == 1 || err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_group = probe[g].name;
        result.worst_index = i;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace kanfis

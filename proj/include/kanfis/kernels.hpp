#pragma once

#include <span>
#include <string_view>

// Batch membership kernels. Each kernel evaluates one basis function over a
// contiguous column of inputs (one value per sample) and either accumulates
// the scaled membership into an output column or reduces the adjoint sums
// needed by the parameter gradients.
//
// A scalar reference table is always available. An AVX2+FMA table is
// compiled on x86-64 and selected at runtime when the CPU supports it; it
// must agree with the reference to ~1e-12 relative (see test_kernels).

namespace kanfis::kernels {

using Column = std::span<const double>;
using MutColumn = std::span<double>;

struct Table {
  std::string_view name;

  // acc[b] += scale * exp(-(x[b]-center)^2 / (2 sigma^2))
  void (*gaussian_forward)(Column x, double center, double sigma, double scale, MutColumn acc);
  // sums = {sum g*phi, sum g*phi*d, sum g*phi*d^2} with d = x - center.
  // If dx is non-empty: dx[b] += scale * g[b] * dphi/dx.
  void (*gaussian_backward)(Column x, double center, double sigma, double scale, Column g,
                            MutColumn dx, double sums[3]);

  // acc[b] += scale / (1 + exp(-slope (x[b]-center)))
  void (*sigmoid_forward)(Column x, double center, double slope, double scale, MutColumn acc);
  // sums = {sum g*phi, sum g*q*d, sum g*q} with q = phi(1-phi), d = x - center.
  void (*sigmoid_backward)(Column x, double center, double slope, double scale, Column g,
                           MutColumn dx, double sums[3]);

  // acc[b] += scale / (1 + |(x[b]-center)/a|^(2b))
  void (*bell_forward)(Column x, double center, double a, double b, double scale, MutColumn acc);
  // sums = {sum g*phi, sum g*phi^2*t/u, sum g*phi^2*t, sum g*phi^2*t*ln|u|}
  // with u = (x - center)/a and t = |u|^(2b); terms with u == 0 contribute 0.
  void (*bell_backward)(Column x, double center, double a, double b, double scale, Column g,
                        MutColumn dx, double sums[4]);
};

enum class Isa { Scalar, Avx2 };

const Table& scalar_table();

/// The AVX2 table, or nullptr when it was not compiled in or the running CPU
/// lacks AVX2/FMA.
const Table* avx2_table();

/// Table used by the network layers: the widest supported ISA unless
/// overridden with select().
const Table& active();

/// Forces a particular table. Throws ConfigError if it is unavailable.
void select(Isa isa);
/// Restores automatic selection.
void select_auto();

bool cpu_supports_avx2();

}  // namespace kanfis::kernels

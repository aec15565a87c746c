#pragma once

#include <cstddef>
#include <cstdint>

#include "kanfis/data.hpp"

namespace kanfis {

/// y = 2 sin(1.5 x1) + x2^2 - 1.5 x3 + noise * N(0, 1), with every feature
/// drawn from U(-1.7, 1.7). Features x4.. are irrelevant distractors.
Dataset make_sparse_regression(std::size_t rows, std::size_t features, double noise, std::uint64_t seed);

/// y = sin(x) on `rows` evenly spaced points of [-3, 3].
Dataset make_sine(std::size_t rows);

}  // namespace kanfis

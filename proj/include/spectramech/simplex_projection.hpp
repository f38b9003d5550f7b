#pragma once

#include <span>

namespace spectramech {

/// In-place Euclidean projection onto {x >= 0, sum x <= budget}. Sorting based,
/// O(N log N).
void project_capped_simplex(std::span<double> x, double budget);

}  // namespace spectramech

#include "spectramech/simplex_projection.hpp"

#include <algorithm>
#include <functional>
#include <vector>

#include "spectramech/errors.hpp"

namespace spectramech {

void project_capped_simplex(std::span<double> x, double budget) {
  if (!(budget > 0.0)) throw DomainError("simplex budget must be positive");
  double clipped_sum = 0.0;
  for (double v : x) clipped_sum += std::max(v, 0.0);
  if (clipped_sum <= budget) {
    for (double& v : x) v = std::max(v, 0.0);
    return;
  }
  // The budget constraint is active: project onto {x >= 0, sum x = budget}.
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    prefix += sorted[j];
    const double candidate = (prefix - budget) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) threshold = candidate;
  }
  for (double& v : x) v = std::max(v - threshold, 0.0);
}

}  // namespace spectramech

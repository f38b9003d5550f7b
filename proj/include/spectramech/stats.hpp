#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace spectramech {

struct SampleSummary {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error of the mean. Accumulates deviations from the first
/// sample, so a constant sample yields that constant and a zero error exactly.
inline SampleSummary summarize(std::span<const double> xs) {
  SampleSummary out;
  if (xs.empty()) return out;
  const double pivot = xs.front();
  const auto n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x - pivot;
  const double shift = sum / n;
  out.mean = pivot + shift;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - pivot - shift;
    ss += d * d;
  }
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

}  // namespace spectramech

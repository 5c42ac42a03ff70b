#pragma once

// Chi-squared tests on outcome histograms.

#include <span>

namespace rep::stats {

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Goodness of fit of counts against the uniform distribution.
ChiSquare uniformity(std::span<const long> counts);

/// Two-sample homogeneity test of two histograms over the same categories;
/// categories empty in both are dropped.
ChiSquare two_sample(std::span<const long> a, std::span<const long> b);

}  // namespace rep::stats

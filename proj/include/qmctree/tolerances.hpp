#pragma once

#include <cstddef>

namespace qmctree {

/// Numerical thresholds used wherever an exact statement ("= 0", "is PSD",
/// "equals 1") has to be decided in floating point.
struct Tolerances {
  double psd_tol = 1e-10;      ///< smallest eigenvalue still accepted as >= 0
  double zero_tol = 1e-9;      ///< operator norm / modulus counted as zero
  double one_tol = 1e-9;       ///< |x - 1| counted as x == 1
  double sqrt_tol = 1e-10;     ///< accepted ||S^2 - rho|| for square roots
  double trace_floor = 1e-14;  ///< traces below this are treated as vanishing
  std::size_t level_cap = 1'000'000;        ///< max vertices per tree level
  std::size_t dense_cap = 4096;             ///< max dense operator dimension
  std::size_t enumeration_cap = 1'000'000;  ///< max enumerated paths

  /// Width of the band above zero_tol in which verdicts are Inconclusive.
  static constexpr double kMarginFactor = 10.0;
};

}  // namespace qmctree

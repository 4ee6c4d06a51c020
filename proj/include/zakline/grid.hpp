#pragma once

#include <vector>

namespace zakline {

/// Ordered discretization alpha_1 .. alpha_M of a closed loop. The last
/// point is the first one shifted by one period and is identified with it.
class LoopGrid {
 public:
  LoopGrid(std::vector<double> points, double period);

  /// k_j = -pi + 2 pi (j - 1) / (M - 1), j = 1..M.
  static LoopGrid brillouin_zone(int points);

  int size() const { return static_cast<int>(points_.size()); }
  double operator[](int j) const { return points_[static_cast<std::size_t>(j)]; }
  double period() const { return period_; }
  const std::vector<double>& points() const { return points_; }

  /// Position of point j along the loop, (j - 1)/(M - 1) in 1-based terms.
  double fraction(int j) const { return static_cast<double>(j) / (size() - 1); }

 private:
  std::vector<double> points_;
  double period_;
};

}  // namespace zakline

#include "zakline/grid.hpp"

#include <cmath>
#include <string>

#include "zakline/error.hpp"
#include "zakline/types.hpp"

namespace zakline {

LoopGrid::LoopGrid(std::vector<double> points, double period)
    : points_(std::move(points)), period_(period) {
  if (points_.size() < 3) {
    fail(ErrorCode::InvalidArgument,
         "grid too coarse: a loop needs at least 3 points, got " +
             std::to_string(points_.size()));
  }
  if (!(period_ > 0.0) || !std::isfinite(period_)) {
    fail(ErrorCode::InvalidArgument, "loop period must be positive and finite");
  }
  for (std::size_t j = 1; j < points_.size(); ++j) {
    if (!(points_[j] > points_[j - 1])) {
      fail(ErrorCode::InvalidArgument, "loop coordinates must be strictly increasing");
    }
  }
  if (std::abs(points_.back() - points_.front() - period_) > 1e-12 * period_) {
    fail(ErrorCode::InvalidArgument, "last loop point must equal the first plus one period");
  }
}

LoopGrid LoopGrid::brillouin_zone(int points) {
  if (points < 3) {
    fail(ErrorCode::InvalidArgument,
         "grid too coarse: M must be at least 3, got " + std::to_string(points));
  }
  std::vector<double> k(static_cast<std::size_t>(points));
  const double step = kTwoPi / (points - 1);
  for (int j = 0; j < points; ++j) k[static_cast<std::size_t>(j)] = -kPi + step * j;
  k.back() = kPi;
  return LoopGrid(std::move(k), kTwoPi);
}

}  // namespace zakline

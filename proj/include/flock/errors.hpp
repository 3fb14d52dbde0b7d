#pragma once

#include <stdexcept>
#include <string>

namespace flock {

// Two agents came closer than the potential's singularity guard. Raised
// instead of letting the repulsive term overflow to inf.
class CollisionError : public std::runtime_error {
 public:
  CollisionError(int i, int j, double distance)
      : std::runtime_error("collision singularity between agents " +
                           std::to_string(i) + " and " + std::to_string(j) +
                           " (distance " + std::to_string(distance) + ")"),
        first_(i),
        second_(j),
        distance_(distance) {}

  explicit CollisionError(double distance)
      : std::runtime_error("collision singularity: separation " +
                           std::to_string(distance) + " below guard"),
        distance_(distance) {}

  int first() const { return first_; }
  int second() const { return second_; }
  double distance() const { return distance_; }

 private:
  int first_ = -1;
  int second_ = -1;
  double distance_ = 0.0;
};

// The velocity graph has more than one weak component, so there is no single
// common final velocity to predict.
class NoPredictionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File-system failure while reading or writing an artifact.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace flock

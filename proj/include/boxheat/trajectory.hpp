#pragma once

#include <vector>

#include "boxheat/grid.hpp"

namespace boxheat {

/// Time-indexed sequence of fields on one grid; times strictly increasing.
class Trajectory {
 public:
  explicit Trajectory(const GridSpec& spec) : spec_(spec) {}

  /// Throws ValidationError on a non-increasing time or a foreign grid.
  void push(double t, ComplexField u);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double time(std::size_t i) const { return times_[i]; }
  const std::vector<double>& times() const { return times_; }
  const ComplexField& field(std::size_t i) const { return fields_[i]; }
  const ComplexField& back() const { return fields_.back(); }

 private:
  GridSpec spec_;
  std::vector<double> times_;
  std::vector<ComplexField> fields_;
};

/// Nodewise difference of two trajectories on identical schedules.
Trajectory difference(const Trajectory& a, const Trajectory& b);

/// max over snapshots of ||a(t) - b(t)||_2 / ||b(t)||_2 (snapshots with b = 0
/// use the absolute difference).
double max_relative_l2(const Trajectory& a, const Trajectory& b);

}  // namespace boxheat

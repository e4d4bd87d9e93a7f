#include "boxheat/trajectory.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "boxheat/error.hpp"

namespace boxheat {

void Trajectory::push(double t, ComplexField u) {
  if (!(u.spec() == spec_)) throw ValidationError("trajectory: snapshot on a foreign grid");
  if (!times_.empty() && !(t > times_.back())) {
    throw ValidationError(fmt::format("trajectory: time {} does not follow {}", t, times_.back()));
  }
  times_.push_back(t);
  fields_.push_back(std::move(u));
}

Trajectory difference(const Trajectory& a, const Trajectory& b) {
  if (a.times() != b.times()) throw ValidationError("difference: trajectories have different schedules");
  Trajectory out(a.spec());
  for (std::size_t i = 0; i < a.size(); ++i) out.push(a.time(i), a.field(i) - b.field(i));
  return out;
}

double max_relative_l2(const Trajectory& a, const Trajectory& b) {
  if (a.times() != b.times()) throw ValidationError("max_relative_l2: trajectories have different schedules");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = lp_norm(a.field(i) - b.field(i), 2.0);
    const double ref = lp_norm(b.field(i), 2.0);
    worst = std::max(worst, ref > 0.0 ? diff / ref : diff);
  }
  return worst;
}

}  // namespace boxheat

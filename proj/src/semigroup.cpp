#include "boxheat/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "boxheat/error.hpp"

namespace boxheat {

std::string_view to_string(Scheme s) {
  return s == Scheme::crank_nicolson ? "crank_nicolson" : "backward_euler";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "crank_nicolson") return Scheme::crank_nicolson;
  if (s == "backward_euler") return Scheme::backward_euler;
  throw ValidationError(fmt::format("unknown scheme '{}' (crank_nicolson | backward_euler)", s));
}

void StepperConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError(fmt::format("stepper: dt must be > 0, got {}", dt));
  if (!(tolerance > 0.0)) throw ValidationError("stepper: tolerance must be > 0");
  if (max_iterations < 1) throw ValidationError("stepper: max_iterations must be >= 1");
}

LinearStepper::LinearStepper(const BoxOperator& op, StepperConfig cfg) : op_(&op), cfg_(cfg) {
  cfg_.validate();
  const double implicit_weight = cfg_.scheme == Scheme::crank_nicolson ? 0.5 : 1.0;
  explicit_weight_ = 1.0 - implicit_weight;
  SparseMatrixC id(op.matrix().rows(), op.matrix().cols());
  id.setIdentity();
  lhs_ = id + (implicit_weight * cfg_.dt) * op.matrix();
  lhs_.makeCompressed();
  cg_.setTolerance(cfg_.tolerance);
  cg_.setMaxIterations(cfg_.max_iterations);
  cg_.compute(lhs_);
  if (cg_.info() != Eigen::Success) throw NumericalError("stepper: preconditioner setup failed");
}

void LinearStepper::advance(VectorXc& u, long steps) const {
  auto& cg = const_cast<Eigen::ConjugateGradient<SparseMatrixC, Eigen::Lower | Eigen::Upper>&>(cg_);
  VectorXc rhs(u.size());
  for (long s = 0; s < steps; ++s) {
    if (explicit_weight_ > 0.0) {
      rhs.noalias() = op_->matrix() * u;
      rhs = u - (explicit_weight_ * cfg_.dt) * rhs;
    } else {
      rhs = u;
    }
    if (rhs.squaredNorm() == 0.0) {
      u.setZero();
      continue;
    }
    VectorXc next = cg.solveWithGuess(rhs, u);
    iterations_ += cg.iterations();
    if (cg.info() != Eigen::Success) {
      throw NumericalError(fmt::format("stepper: conjugate gradients stalled after {} iterations (error {:.3e})",
                                       cg.iterations(), cg.error()));
    }
    u.swap(next);
  }
}

long steps_for(double t, double dt) {
  const double ratio = t / dt;
  const long k = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(k)) > 1e-6) {
    throw ValidationError(fmt::format("time {} is not a multiple of dt = {}", t, dt));
  }
  return k;
}

std::vector<double> geometric_schedule(double t_min, int count) {
  if (!(t_min > 0.0) || count < 1) throw ValidationError("geometric_schedule: need t_min > 0 and count >= 1");
  std::vector<double> s;
  for (int j = 0; j < count; ++j) s.push_back(std::ldexp(t_min, j));
  return s;
}

std::vector<double> uniform_schedule(double spacing, double t_final) {
  if (!(spacing > 0.0) || !(t_final > 0.0)) throw ValidationError("uniform_schedule: need spacing, t_final > 0");
  const long count = std::lround(t_final / spacing);
  std::vector<double> s;
  for (long k = 1; k <= count; ++k) s.push_back(static_cast<double>(k) * spacing);
  return s;
}

Trajectory evolve_linear(const BoxOperator& op, const ComplexField& u0, const std::vector<double>& schedule,
                         const StepperConfig& cfg) {
  require_same_grid(u0, op.potential(), "evolve_linear");
  if (schedule.empty() || !(schedule.front() > 0.0)) {
    throw ValidationError("evolve_linear: schedule must be non-empty with positive times");
  }
  LinearStepper stepper(op, cfg);
  Trajectory traj(op.spec());
  traj.push(0.0, u0);
  VectorXc u = u0.values();
  const double initial = u.norm();
  long done = 0;
  for (double t : schedule) {
    const long target = steps_for(t, cfg.dt);
    if (target <= done) throw ValidationError("evolve_linear: schedule must be strictly increasing");
    stepper.advance(u, target - done);
    done = target;
    if (!u.allFinite() || (initial > 0.0 && u.norm() > 10.0 * initial)) {
      throw NumericalError(fmt::format("evolve_linear: norm blow-up at t = {} (a dissipative flow cannot grow)", t));
    }
    traj.push(t, ComplexField(op.spec(), u));
  }
  return traj;
}

double general_envelope(double t, cplx z, cplx w) { return std::exp(-std::norm(z - w) / t) / (kPi * t); }

std::vector<KernelSlice> heat_kernel(const BoxOperator& op, cplx w, const std::vector<double>& times,
                                     const StepperConfig& cfg) {
  cfg.validate();
  const GridSpec& g = op.spec();
  const double h = g.spacing();
  for (double t : times) {
    if (t < 10.0 * cfg.dt * (1.0 - 1e-12)) {
      throw ValidationError(fmt::format("heat_kernel: t = {} is below the regularisation window 10 dt = {}", t,
                                        10.0 * cfg.dt));
    }
    if (t < 4.0 * h * h) {
      throw ValidationError(fmt::format(
          "heat_kernel: t = {} under-resolves the kernel on spacing h = {} (need t >= 4 h^2 = {})", t, h,
          4.0 * h * h));
    }
  }
  const Eigen::Index src = g.nearest(w);
  ComplexField delta(g);
  delta[src] = 1.0 / (h * h);

  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const Trajectory traj = evolve_linear(op, delta, sorted, cfg);

  std::vector<KernelSlice> out;
  for (double t : times) {
    const auto pos = std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    KernelSlice slice{t, g.node(src), src, traj.field(static_cast<std::size_t>(pos) + 1), 0.0};
    double margin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      margin = std::min(margin, general_envelope(t, g.node(i), slice.source) - std::abs(slice.field[i]));
    }
    slice.bound_margin = margin;
    out.push_back(std::move(slice));
  }
  return out;
}

KernelSlice heat_kernel(const BoxOperator& op, cplx w, double t, const StepperConfig& cfg) {
  return std::move(heat_kernel(op, w, std::vector<double>{t}, cfg).front());
}

GeneralBoundReport check_general_bound(const KernelSlice& slice, double slack) {
  const GridSpec& g = slice.field.spec();
  const double peak = 1.0 / (kPi * slice.t);
  const double floor = kEnvelopeFloor * peak;
  GeneralBoundReport r;
  r.t = slice.t;
  r.slack = slack;
  r.peak_ratio = std::abs(slice.field[slice.source_index]) / peak;
  r.worst_violation = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const cplx z = g.node(i);
    const double env = general_envelope(slice.t, z, slice.source);
    const double mag = std::abs(slice.field[i]);
    r.max_excess = std::max(r.max_excess, (mag - env) / peak);
    const double violation = (mag - (1.0 + slack) * env - floor) / peak;
    if (violation > r.worst_violation) {
      r.worst_violation = violation;
      r.worst_node = z;
    }
    if (violation > 0.0) ++r.violating_nodes;
  }
  r.holds = r.violating_nodes == 0;
  return r;
}

PolynomialFitReport fit_polynomial_bound(const std::vector<KernelSlice>& slices, const Weight& w) {
  struct Point {
    double x, y;
  };
  std::vector<Point> pts;
  for (const KernelSlice& s : slices) {
    const GridSpec& g = s.field.spec();
    const double floor = kEnvelopeFloor / (kPi * s.t);
    const double mu_w = inverse_mu_squared(w, s.source);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double mag = std::abs(s.field[i]);
      if (mag <= floor) continue;
      const cplx z = g.node(i);
      pts.push_back({s.t * (inverse_mu_squared(w, z) + mu_w), std::log(mag * s.t) + std::norm(z - s.source) / (32.0 * s.t)});
    }
  }
  PolynomialFitReport r;
  r.samples = static_cast<long>(pts.size());
  if (pts.empty()) return r;

  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Point> hull;
  for (const Point& p : pts) {
    if (!hull.empty() && hull.back().x == p.x) hull.pop_back();  // keep the highest y per x
    while (hull.size() >= 2) {
      const Point& a = hull[hull.size() - 2];
      const Point& b = hull.back();
      if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }

  double sum_x = 0.0, sum_y = 0.0;
  for (const Point& p : pts) {
    sum_x += p.x;
    sum_y += p.y;
  }
  const double n = static_cast<double>(pts.size());
  double best_obj = std::numeric_limits<double>::infinity();
  double best_c = hull.front().y, best_slope = 0.0;
  if (hull.size() == 1) {
    best_obj = 0.0;
  }
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const double slope = (hull[i + 1].y - hull[i].y) / (hull[i + 1].x - hull[i].x);
    const double c = hull[i].y - slope * hull[i].x;
    const double obj = n * c + slope * sum_x - sum_y;
    if (obj < best_obj) {
      best_obj = obj;
      best_c = c;
      best_slope = slope;
    }
  }
  r.c = std::exp(best_c);
  r.c_prime = -best_slope;
  r.all_below = std::all_of(pts.begin(), pts.end(), [&](const Point& p) {
    return p.y <= best_c + best_slope * p.x + 1e-9 * (1.0 + std::abs(p.y));
  });
  return r;
}

}  // namespace boxheat

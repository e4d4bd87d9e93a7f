#include "boxheat/mild.hpp"

#include <cmath>

#include <fmt/format.h>

#include "boxheat/error.hpp"
#include "boxheat/stability.hpp"

namespace boxheat {

void Nonlinearity::validate() const {
  if (kind == Kind::none) return;
  if (!(m > 2.0)) throw ValidationError(fmt::format("nonlinearity: exponent m must be > 2, got {}", m));
  if (!(lipschitz > 0.0)) throw ValidationError("nonlinearity: Lipschitz constant must be > 0");
}

ComplexField f_apply(const Nonlinearity& nl, const ComplexField& u, double /*t*/) {
  ComplexField out(u.spec());
  if (nl.kind == Nonlinearity::Kind::none) return out;
  const double e = nl.m - 1.0;
  for (Eigen::Index i = 0; i < u.values().size(); ++i) {
    const double a = std::abs(u[i]);
    out[i] = a == 0.0 ? cplx{} : std::pow(a, e) * u[i];
  }
  return out;
}

namespace {

struct UniformSchedule {
  double ds;
  long steps_per_interval;
};

UniformSchedule check_schedule(const std::vector<double>& times, double dt) {
  if (times.size() < 2 || times.front() != 0.0) {
    throw ValidationError("duhamel: schedule must start at t = 0 and contain at least two times");
  }
  const double ds = times[1] - times[0];
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs((times[k] - times[k - 1]) - ds) > 1e-9 * std::max(1.0, times[k])) {
      throw ValidationError(fmt::format("duhamel: schedule is not uniform at t = {}", times[k]));
    }
  }
  return {ds, steps_for(ds, dt)};
}

std::vector<double> uniform_times(double ds, double t_final) {
  std::vector<double> t{0.0};
  for (double s : uniform_schedule(ds, t_final)) t.push_back(s);
  return t;
}

// One trapezoidal Duhamel sweep. `v` may be null (f evaluated on zero).
Trajectory sweep(const LinearStepper& stepper, const Nonlinearity& nl, const ComplexField& u0,
                 const Trajectory* v, const std::vector<double>& times) {
  const UniformSchedule sched = check_schedule(times, stepper.config().dt);
  const GridSpec& g = u0.spec();
  const bool active = v != nullptr && nl.kind != Nonlinearity::Kind::none;
  auto source = [&](std::size_t k) {
    ComplexField f = f_apply(nl, v->field(k), times[k]);
    if (!f.values().allFinite()) throw NumericalError(fmt::format("duhamel: non-finite f(v) at t = {}", times[k]));
    return f;
  };

  Trajectory out(g);
  out.push(0.0, u0);
  VectorXc w = u0.values();
  const double half = 0.5 * sched.ds;
  ComplexField g_prev = active ? source(0) : ComplexField(g);
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (active) w += half * g_prev.values();
    stepper.advance(w, sched.steps_per_interval);
    if (active) {
      ComplexField g_next = source(k);
      w += half * g_next.values();
      g_prev = std::move(g_next);
    }
    if (!w.allFinite()) throw NumericalError(fmt::format("duhamel: non-finite iterate at t = {}", times[k]));
    out.push(times[k], ComplexField(g, w));
  }
  return out;
}

}  // namespace

Trajectory duhamel_apply(const BoxOperator& op, const Nonlinearity& nl, const ComplexField& u0,
                         const Trajectory& v, const StepperConfig& cfg) {
  nl.validate();
  require_same_grid(u0, op.potential(), "duhamel_apply");
  if (!(v.spec() == op.spec())) throw ValidationError("duhamel_apply: trajectory lives on a different grid");
  LinearStepper stepper(op, cfg);
  return sweep(stepper, nl, u0, &v, v.times());
}

PicardResult picard_solve(const BoxOperator& op, const Nonlinearity& nl, const ComplexField& u0, double ds,
                          double t_final, const StepperConfig& cfg, const PicardOptions& opts) {
  nl.validate();
  require_same_grid(u0, op.potential(), "picard_solve");
  if (opts.max_iter < 1) throw ValidationError("picard_solve: max_iter must be >= 1");
  if (!(opts.tol > 0.0)) throw ValidationError("picard_solve: tol must be > 0");
  const std::vector<double> times = uniform_times(ds, t_final);
  LinearStepper stepper(op, cfg);

  PicardReport report;
  const double m = nl.kind == Nonlinearity::Kind::none ? 3.0 : nl.m;
  if (!theorem1_window(m, opts.q)) {
    report.warnings.push_back(fmt::format("q = {} lies outside the window m-1 < q < m(m-1) for m = {}", opts.q, m));
  }
  if (nl.kind == Nonlinearity::Kind::power) {
    // Sup-norm Lipschitz bound of Phi on the ball of radius ||u0||_inf.
    const double lip = nl.m * std::pow(lp_norm(u0, kInfNorm), nl.m - 1.0) * t_final;
    if (lip >= 1.0) {
      report.warnings.push_back(fmt::format(
          "initial data may be too large for a contraction: m ||u0||_inf^(m-1) t_final = {:.3g} >= 1", lip));
    }
  }

  Trajectory current = sweep(stepper, nl, u0, nullptr, times);
  int rising = 0;
  for (int k = 1; k <= opts.max_iter; ++k) {
    report.iterations = k;
    Trajectory next = current;
    try {
      next = sweep(stepper, nl, u0, &current, times);
    } catch (const NumericalError& e) {
      report.diverged = true;
      report.warnings.push_back(e.what());
      break;
    }
    const double d = y_norm(difference(next, current), m, opts.q);
    if (!std::isfinite(d)) {
      report.diverged = true;
      break;
    }
    if (!report.differences.empty()) {
      const double prev = report.differences.back();
      report.ratios.push_back(prev > 0.0 ? d / prev : 0.0);
      rising = d > prev ? rising + 1 : 0;
    }
    report.differences.push_back(d);
    current = std::move(next);
    if (d < opts.tol) {
      report.converged = true;
      break;
    }
    if (rising >= 3) {
      report.diverged = true;
      break;
    }
  }
  return {std::move(current), std::move(report)};
}

ImexResult solve_imex(const BoxOperator& op, const Nonlinearity& nl, const ComplexField& u0,
                      const std::vector<double>& schedule, double dt, double blowup_cap, double tolerance) {
  nl.validate();
  require_same_grid(u0, op.potential(), "solve_imex");
  if (schedule.empty()) throw ValidationError("solve_imex: empty schedule");
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.scheme = Scheme::backward_euler;
  cfg.tolerance = tolerance;
  LinearStepper stepper(op, cfg);

  ImexResult r{Trajectory(op.spec())};
  r.trajectory.push(0.0, u0);
  ComplexField u = u0;
  r.max_norm = lp_norm(u0, 2.0);
  long done = 0;
  for (double t : schedule) {
    const long target = steps_for(t, dt);
    if (target <= done) throw ValidationError("solve_imex: schedule must be strictly increasing");
    for (; done < target; ++done) {
      if (nl.kind != Nonlinearity::Kind::none) {
        u.values() += dt * f_apply(nl, u, static_cast<double>(done) * dt).values();
      }
      if (!u.values().allFinite() || lp_norm(u, 2.0) > blowup_cap) {
        r.blew_up = true;
        r.blowup_time = static_cast<double>(done) * dt;
        return r;
      }
      stepper.advance(u.values(), 1);
      r.max_norm = std::max(r.max_norm, lp_norm(u, 2.0));
    }
    r.trajectory.push(t, u);
  }
  return r;
}

}  // namespace boxheat

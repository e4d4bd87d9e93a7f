#include "boxheat/stability.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "boxheat/error.hpp"

namespace boxheat {

bool theorem1_window(double m, double q) { return 1.0 < m - 1.0 && m - 1.0 < q && q < m * (m - 1.0); }

double y_norm(const Trajectory& traj, double m, double q) {
  if (traj.empty()) throw ValidationError("y_norm: empty trajectory");
  if (!(m > 2.0)) throw ValidationError(fmt::format("y_norm: m must be > 2, got {}", m));
  if (!(q >= 1.0)) throw ValidationError(fmt::format("y_norm: q must be >= 1, got {}", q));
  const double weight_power = 1.0 / (m - 1.0) - 1.0 / q;
  double sup_low = 0.0;
  double sup_weighted = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    sup_low = std::max(sup_low, lp_norm(traj.field(i), m - 1.0));
    const double t = traj.time(i);
    if (t > 0.0) sup_weighted = std::max(sup_weighted, std::pow(t, weight_power) * lp_norm(traj.field(i), q));
  }
  return sup_low + sup_weighted;
}

std::string_view to_string(DecayModel m) { return m == DecayModel::exponential ? "exponential" : "power_law"; }

DecayModel parse_decay_model(std::string_view s) {
  if (s == "power_law") return DecayModel::power_law;
  if (s == "exponential") return DecayModel::exponential;
  throw ValidationError(fmt::format("unknown decay model '{}' (power_law | exponential)", s));
}

DecayModel model_for(DeltaClass c) {
  return c == DeltaClass::delta_positive ? DecayModel::exponential : DecayModel::power_law;
}

double DecayFit::model_value(double t) const {
  return model == DecayModel::exponential ? coefficient * std::exp(-rate * t) : coefficient * std::pow(t, rate);
}

void DecayFit::set_target(double value) {
  target = value;
  deviation = value != 0.0 ? std::abs(rate - value) / std::abs(value) : std::abs(rate);
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("fit_decay: degenerate window (all abscissae equal)");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  if (syy > 0.0) {
    f.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  } else {
    f.r2 = 1.0;
  }
  return f;
}

double contamination(const ComplexField& u) {
  const double sup = lp_norm(u, kInfNorm);
  return sup > 0.0 ? boundary_mass(u) / sup : 0.0;
}

struct Window {
  std::vector<double> t;
  std::vector<double> v;
};

Window select(const Series& series, double t_a, double t_b, bool positive_times) {
  if (!(t_a < t_b)) throw ValidationError(fmt::format("fit_decay: degenerate window [{}, {}]", t_a, t_b));
  Window w;
  for (const auto& [t, v] : series) {
    if (t < t_a || t > t_b) continue;
    if (positive_times && !(t > 0.0)) throw ValidationError("fit_decay: power-law fit needs t > 0");
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError(fmt::format("fit_decay: nonpositive value {} at t = {}", v, t));
    }
    w.t.push_back(t);
    w.v.push_back(v);
  }
  if (w.t.size() < 5) {
    throw ValidationError(fmt::format("fit_decay: {} points in [{}, {}], need at least 5", w.t.size(), t_a, t_b));
  }
  return w;
}

}  // namespace

DecayFit fit_decay(const Series& series, DecayModel model, double t_a, double t_b) {
  const bool power = model == DecayModel::power_law;
  const Window w = select(series, t_a, t_b, power);
  std::vector<double> x(w.t.size()), y(w.t.size());
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    x[i] = power ? std::log(w.t[i]) : w.t[i];
    y[i] = std::log(w.v[i]);
  }
  const LineFit line = least_squares(x, y);
  DecayFit f;
  f.model = model;
  f.rate = power ? line.slope : -line.slope;
  f.coefficient = std::exp(line.intercept);
  f.t_a = w.t.front();
  f.t_b = w.t.back();
  f.r2 = line.r2;
  f.points = static_cast<int>(w.t.size());
  return f;
}

DecayFit fit_exponential_with_power(const Series& series, double alpha, double t_a, double t_b) {
  Series scaled;
  scaled.reserve(series.size());
  for (const auto& [t, v] : series) {
    if (t < t_a || t > t_b) continue;
    if (!(t > 0.0)) throw ValidationError("fit_decay: exponential-times-power fit needs t > 0");
    scaled.emplace_back(t, v * std::pow(t, -alpha));
  }
  return fit_decay(scaled, DecayModel::exponential, t_a, t_b);
}

LpLqProbe lp_lq_probe(const BoxOperator& op, double p, double q, const std::vector<ComplexField>& probes,
                      const std::vector<double>& schedule, const StepperConfig& cfg, DecayModel model,
                      double t_a, double t_b, int jobs) {
  if (!(q >= 1.0) || !(p >= q)) {
    throw ValidationError(fmt::format("lp_lq_probe: need 1 <= q <= p <= inf, got p = {}, q = {}", p, q));
  }
  if (probes.empty()) throw ValidationError("lp_lq_probe: no probes");
  LpLqProbe r;
  r.p = p;
  r.q = q;
  r.times = schedule;
  r.predicted_exponent = (std::isinf(p) ? 0.0 : 1.0 / p) - 1.0 / q;
  r.max_ratio.assign(schedule.size(), 0.0);
  r.contaminated.assign(schedule.size(), false);
  std::vector<Trajectory> runs;
  runs.reserve(probes.size());
  for (std::size_t start = 0; start < probes.size(); start += static_cast<std::size_t>(std::max(jobs, 1))) {
    std::vector<std::future<Trajectory>> batch;
    for (std::size_t i = start; i < std::min(probes.size(), start + static_cast<std::size_t>(std::max(jobs, 1))); ++i) {
      if (!(lp_norm(probes[i], q) > 0.0)) throw ValidationError("lp_lq_probe: zero probe");
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [&, i] { return evolve_linear(op, probes[i], schedule, cfg); }));
    }
    for (auto& f : batch) runs.push_back(f.get());
  }
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    const double denom = lp_norm(probes[pi], q);
    const Trajectory& traj = runs[pi];
    std::vector<double> ratios(schedule.size());
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      const ComplexField& u = traj.field(i + 1);
      ratios[i] = lp_norm(u, p) / denom;
      r.max_ratio[i] = std::max(r.max_ratio[i], ratios[i]);
      if (contamination(u) > kBoundaryContamination) r.contaminated[i] = true;
    }
    r.ratios.push_back(std::move(ratios));
  }

  Series clean;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!r.contaminated[i]) clean.emplace_back(schedule[i], r.max_ratio[i]);
  }
  if (model == DecayModel::power_law) {
    r.fit = fit_decay(clean, DecayModel::power_law, t_a, t_b);
    r.fit.set_target(r.predicted_exponent);
  } else {
    r.fit = fit_exponential_with_power(clean, r.predicted_exponent, t_a, t_b);
  }
  return r;
}

namespace {

Trajectory solve_pair_member(const BoxOperator& op, const Nonlinearity& nl, const ComplexField& u0,
                             const std::vector<double>& schedule, const StepperConfig& cfg,
                             const StabilityOptions& opts) {
  if (opts.solver == PairSolver::imex) {
    ImexResult r = solve_imex(op, nl, u0, schedule, cfg.dt, opts.blowup_cap, cfg.tolerance);
    if (r.blew_up) {
      throw NumericalError(fmt::format("stability_experiment: IMEX solve blew up at t = {}", r.blowup_time));
    }
    return std::move(r.trajectory);
  }
  const double ds = schedule.front();
  PicardResult r = picard_solve(op, nl, u0, ds, schedule.back(), cfg, opts.picard);
  if (!r.report.converged) {
    throw NumericalError(fmt::format("stability_experiment: Picard iteration did not converge ({} iterations)",
                                     r.report.iterations));
  }
  if (r.solution.size() != schedule.size() + 1) {
    throw ValidationError("stability_experiment: Picard solver needs a uniform schedule k * ds");
  }
  return std::move(r.solution);
}

}  // namespace

StabilityReport stability_experiment(const BoxOperator& op, const Nonlinearity& nl, const ComplexField& u0,
                                     const ComplexField& u0_hat, const std::vector<double>& schedule,
                                     const StepperConfig& cfg, const StabilityOptions& opts) {
  if (schedule.empty()) throw ValidationError("stability_experiment: empty schedule");
  if (!(opts.norm_exponent >= 1.0)) throw ValidationError("stability_experiment: norm exponent must be >= 1");
  const double m = nl.kind == Nonlinearity::Kind::none ? 3.0 : nl.m;
  const double n_exp = opts.norm_exponent;

  StabilityReport r;
  auto policy = opts.jobs > 1 ? std::launch::async : std::launch::deferred;
  auto fa = std::async(policy, [&] { return solve_pair_member(op, nl, u0, schedule, cfg, opts); });
  auto fb = std::async(policy, [&] { return solve_pair_member(op, nl, u0_hat, schedule, cfg, opts); });
  const Trajectory a = fa.get();
  const Trajectory b = fb.get();
  const Trajectory d = difference(a, b);

  const bool power = opts.model == DecayModel::power_law;
  r.initial_distance = lp_norm(d.field(0), power ? m - 1.0 : n_exp);
  if (power) r.rate_target = -(1.0 / (m - 1.0) - 1.0 / n_exp);
  if (power && !theorem1_window(m, n_exp)) {
    r.notes.push_back(fmt::format("q = {} lies outside the window m-1 < q < m(m-1)", n_exp));
  }
  if (!power && !(n_exp > m - 1.0)) r.notes.push_back(fmt::format("n = {} is not above m-1", n_exp));

  double clean_end = 0.0;
  bool clean = true;
  for (std::size_t i = 1; i < d.size(); ++i) {
    const double t = d.time(i);
    r.distance.emplace_back(t, lp_norm(d.field(i), n_exp));
    const double bm = std::max(contamination(a.field(i)), contamination(b.field(i)));
    r.boundary.push_back(bm);
    if (bm > kBoundaryContamination) clean = false;
    if (clean) clean_end = t;
  }
  r.notes.push_back("stability is certified on the truncated domain and the finite schedule only");

  if (r.initial_distance == 0.0) {
    r.fit.model = opts.model;
    r.notes.push_back("identical data: d(t) = 0, no fit");
    return r;
  }

  const double t_a = std::max(opts.t_a, 10.0 * cfg.dt);
  const double t_b = opts.t_b > 0.0 ? std::min(opts.t_b, clean_end) : clean_end;
  if (!(t_b > t_a)) {
    throw NumericalError(fmt::format(
        "stability_experiment: boundary contamination above {} before the fit window opens at t = {}",
        kBoundaryContamination, t_a));
  }
  r.fit = fit_decay(r.distance, opts.model, t_a, t_b);
  if (power) r.fit.set_target(r.rate_target);

  for (const auto& [t, v] : r.distance) {
    if (t < r.fit.t_a || t > r.fit.t_b) continue;
    const double rate = power ? std::pow(t, r.rate_target) : std::exp(-r.fit.rate * t);
    r.constant = std::max(r.constant, v / (rate * r.initial_distance));
  }
  return r;
}

BetaCheck beta_identity_check(double k, double l, double t) {
  if (!(k > 0.0 && k < 1.0) || !(l > 0.0 && l < 1.0)) {
    throw ValidationError(fmt::format("beta_identity_check: need 0 < k, l < 1, got k = {}, l = {}", k, l));
  }
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("beta_identity_check: t must be > 0");

  // s = t sin^2(theta): ds = 2 t sin cos dtheta and t - s = t cos^2, so the
  // integrand becomes 2 t^{1-k-l} sin^{1-2l} cos^{1-2k}. The complement
  // argument keeps cos accurate near theta = pi/2.
  constexpr double half_pi = kPi / 2.0;
  auto integrand = [=](double theta, double complement) {
    const bool left = theta <= 0.5 * half_pi;
    const double sn = left ? std::sin(theta) : std::cos(complement);
    const double cs = left ? std::cos(theta) : std::sin(complement);
    return std::pow(sn, 1.0 - 2.0 * l) * std::pow(cs, 1.0 - 2.0 * k);
  };
  boost::math::quadrature::tanh_sinh<double> quad;
  double error = 0.0;
  const double integral = 2.0 * std::pow(t, 1.0 - k - l) *
                          quad.integrate(integrand, 0.0, half_pi, std::sqrt(std::numeric_limits<double>::epsilon()),
                                         &error);

  BetaCheck c;
  c.k = k;
  c.l = l;
  c.t = t;
  c.quadrature = std::pow(t, k + l - 1.0) * integral;
  c.closed_form = std::exp(std::lgamma(1.0 - k) + std::lgamma(1.0 - l) - std::lgamma(2.0 - k - l));
  c.abs_difference = std::abs(c.quadrature - c.closed_form);
  c.error_estimate = error;
  return c;
}

}  // namespace boxheat

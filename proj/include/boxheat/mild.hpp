#pragma once

// Mild solutions of u_t + Box u = f(u):
//
//   Phi(v)(t) = exp(-t Box) u0 + int_0^t exp(-(t-s) Box) f(v(s)) ds
//
// evaluated on a uniform schedule with trapezoidal quadrature in s, and
// iterated to a fixed point. solve_imex is an independent semi-implicit
// stepper used to cross-check the fixed point.

#include <string>
#include <vector>

#include "boxheat/semigroup.hpp"

namespace boxheat {

/// f(u) = |u|^{m-1} u (kind power) or f = 0 (kind none).
struct Nonlinearity {
  enum class Kind { none, power };
  Kind kind = Kind::power;
  double m = 3.0;
  /// Constant in |f(u1) - f(u2)| <= L |u1 - u2| (|u1|^{m-1} + |u2|^{m-1});
  /// L = m works for the power law.
  double lipschitz = 3.0;

  static Nonlinearity none() { return {Kind::none, 0.0, 0.0}; }
  static Nonlinearity power(double m) { return {Kind::power, m, m}; }

  /// Throws ValidationError unless m > 2 for the power law.
  void validate() const;
};

/// Nodewise f(u); t is accepted for time-dependent nonlinearities and ignored
/// by the shipped ones.
ComplexField f_apply(const Nonlinearity& nl, const ComplexField& u, double t = 0.0);

/// Phi(v) on v's schedule, which must be uniform, start at 0, and have a
/// spacing that is a multiple of cfg.dt. One forward sweep:
///   w_{k+1} = P (w_k + ds/2 f_k) + ds/2 f_{k+1},   P = exp(-ds Box) stepped.
Trajectory duhamel_apply(const BoxOperator& op, const Nonlinearity& nl, const ComplexField& u0,
                         const Trajectory& v, const StepperConfig& cfg);

struct PicardOptions {
  double tol = 1e-10;    // stop when the Y-norm of successive differences drops below
  int max_iter = 50;
  double q = 3.0;        // Y-norm exponent
};

struct PicardReport {
  int iterations = 0;
  std::vector<double> differences;  // d_k = ||u^{(k+1)} - u^{(k)}||_Y
  std::vector<double> ratios;       // d_{k+1} / d_k
  bool converged = false;
  bool diverged = false;
  std::vector<std::string> warnings;
};

struct PicardResult {
  Trajectory solution;  // best iterate
  PicardReport report;
};

/// Picard iteration u^{(k+1)} = Phi(u^{(k)}) from u^{(0)} = exp(-t Box) u0 on
/// schedule {0, ds, ..., t_final}. Divergence (d_k growing three times in a
/// row, or non-finite iterates) is reported, not thrown.
PicardResult picard_solve(const BoxOperator& op, const Nonlinearity& nl, const ComplexField& u0, double ds,
                          double t_final, const StepperConfig& cfg, const PicardOptions& opts);

struct ImexResult {
  Trajectory trajectory;
  bool blew_up = false;
  double blowup_time = 0.0;
  double max_norm = 0.0;  // largest L2 norm seen
};

/// (I + dt Box) u^{k+1} = u^k + dt f(u^k), snapshots at the schedule times.
/// The run stops early (blew_up = true) once ||u||_2 exceeds blowup_cap.
ImexResult solve_imex(const BoxOperator& op, const Nonlinearity& nl, const ComplexField& u0,
                      const std::vector<double>& schedule, double dt, double blowup_cap = 1e8,
                      double tolerance = 1e-12);

}  // namespace boxheat

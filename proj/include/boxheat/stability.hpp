#pragma once

// Decay laws of linear and semilinear flows: the Y-norm, L^p-L^q ratio
// probes, least-squares rate fits, paired-solution stability runs, and the
// Beta integral
//
//   t^{k+l-1} int_0^t (t-s)^{-k} s^{-l} ds = B(1-k, 1-l).

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boxheat/mild.hpp"

namespace boxheat {

/// 1 < m-1 < q < m(m-1)
bool theorem1_window(double m, double q);

/// sup_t ||u(t)||_{m-1} + sup_{t>0} t^{1/(m-1) - 1/q} ||u(t)||_q over the
/// snapshots. Throws ValidationError on an empty trajectory or m <= 2, q < 1.
double y_norm(const Trajectory& traj, double m, double q);

enum class DecayModel { power_law, exponential };

std::string_view to_string(DecayModel m);
DecayModel parse_decay_model(std::string_view s);

/// delta_positive -> exponential, delta_zero -> power_law
DecayModel model_for(DeltaClass c);

using Series = std::vector<std::pair<double, double>>;

struct DecayFit {
  DecayModel model = DecayModel::power_law;
  /// power_law: value ~ coefficient * t^rate; exponential: value ~ coefficient * e^{-rate t}
  double rate = 0.0;
  double coefficient = 0.0;
  double t_a = 0.0;
  double t_b = 0.0;
  double r2 = 0.0;
  int points = 0;
  std::optional<double> target;
  std::optional<double> deviation;  // |rate - target| / |target|

  double model_value(double t) const;
  void set_target(double value);
};

/// Least squares of log(value) against log t or t on points with
/// t_a <= t <= t_b. Throws ValidationError with fewer than five points, a
/// nonpositive value, or t_a >= t_b (or t <= 0 for power_law).
DecayFit fit_decay(const Series& series, DecayModel model, double t_a, double t_b);

/// Exponential fit of value * t^{-alpha} (alpha held fixed): the
/// exponential-times-power model with a known power.
DecayFit fit_exponential_with_power(const Series& series, double alpha, double t_a, double t_b);

/// Boundary mass relative to the sup norm above which a snapshot is excluded
/// from fits.
inline constexpr double kBoundaryContamination = 1e-4;

struct LpLqProbe {
  double p = 2.0;
  double q = 2.0;
  std::vector<double> times;
  std::vector<std::vector<double>> ratios;  // [probe][time]
  std::vector<double> max_ratio;            // over probes, per time
  std::vector<bool> contaminated;           // per time
  DecayFit fit;
  double predicted_exponent = 0.0;          // -(1/q - 1/p)
};

/// ||exp(-t Box) psi||_p / ||psi||_q for every probe and schedule time. The
/// per-time maximum over probes is fitted on [t_a, t_b]: a power law for
/// power_law, and an exponential with the power fixed at the predicted
/// exponent for exponential. Up to `jobs` probes are evolved concurrently.
LpLqProbe lp_lq_probe(const BoxOperator& op, double p, double q, const std::vector<ComplexField>& probes,
                      const std::vector<double>& schedule, const StepperConfig& cfg, DecayModel model,
                      double t_a, double t_b, int jobs = 1);

enum class PairSolver { imex, picard };

struct StabilityOptions {
  double norm_exponent = 3.0;  // q (power law) or n (exponential)
  DecayModel model = DecayModel::power_law;
  double t_a = 0.0;            // fit window; t_b = 0 means the last clean snapshot
  double t_b = 0.0;
  PairSolver solver = PairSolver::imex;
  PicardOptions picard;        // used with PairSolver::picard
  double blowup_cap = 1e8;
  int jobs = 1;                // > 1 solves the pair concurrently
};

struct StabilityReport {
  Series distance;               // d(t) = ||u(t) - u_hat(t)||
  std::vector<double> boundary;  // max boundary mass of the pair, per snapshot
  DecayFit fit;
  double constant = 0.0;         // sup_window d(t) / (rate(t) * initial distance)
  double initial_distance = 0.0;
  double rate_target = 0.0;      // power law: -(1/(m-1) - 1/q)
  bool converged = true;
  std::vector<std::string> notes;
};

/// Solves from u0 and u0_hat and fits d(t). The window starts no earlier than
/// 10 dt and ends before the first snapshot whose boundary mass exceeds
/// kBoundaryContamination. If the two data coincide d is identically zero and
/// no fit is attempted. Throws NumericalError if a solve does not converge.
StabilityReport stability_experiment(const BoxOperator& op, const Nonlinearity& nl, const ComplexField& u0,
                                     const ComplexField& u0_hat, const std::vector<double>& schedule,
                                     const StepperConfig& cfg, const StabilityOptions& opts);

struct BetaCheck {
  double k = 0.0;
  double l = 0.0;
  double t = 0.0;
  double quadrature = 0.0;  // t^{k+l-1} int_0^t (t-s)^{-k} s^{-l} ds
  double closed_form = 0.0; // exp(lgamma(1-k) + lgamma(1-l) - lgamma(2-k-l))
  double abs_difference = 0.0;
  double error_estimate = 0.0;
};

/// Throws ValidationError unless 0 < k, l < 1 and t > 0.
BetaCheck beta_identity_check(double k, double l, double t);

}  // namespace boxheat

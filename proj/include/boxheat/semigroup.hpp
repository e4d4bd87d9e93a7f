#pragma once

// The linear heat flow u(t) = exp(-t Box) u0, its discrete kernel columns
// H(t, ., w), and the Gaussian envelope checks
//
//   general:    |H(t,z,w)| <= (pi t)^{-1} exp(-|z-w|^2 / t)
//   polynomial: |H(t,z,w)| <= C t^{-1} exp(-|z-w|^2/(32 t) - C' t (mu(z,1)^{-2} + mu(w,1)^{-2}))

#include <string_view>
#include <vector>

#include <Eigen/IterativeLinearSolvers>

#include "boxheat/box_operator.hpp"
#include "boxheat/trajectory.hpp"

namespace boxheat {

enum class Scheme { crank_nicolson, backward_euler };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view s);

struct StepperConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::crank_nicolson;
  double tolerance = 1e-12;  // relative residual of each linear solve
  int max_iterations = 2000;

  void validate() const;
};

/// One-step propagator for (I + theta dt A) u+ = (I - (1 - theta) dt A) u,
/// theta = 1/2 (Crank-Nicolson) or 1 (backward Euler), solved by conjugate
/// gradients on the Hermitian positive definite left-hand side.
class LinearStepper {
 public:
  LinearStepper(const BoxOperator& op, StepperConfig cfg);
  LinearStepper(const LinearStepper&) = delete;
  LinearStepper& operator=(const LinearStepper&) = delete;

  const StepperConfig& config() const { return cfg_; }
  const BoxOperator& op() const { return *op_; }

  /// Advances u by `steps` time steps in place. Throws NumericalError when
  /// a linear solve fails to reach the tolerance.
  void advance(VectorXc& u, long steps = 1) const;

  long total_iterations() const { return iterations_; }

 private:
  const BoxOperator* op_;
  StepperConfig cfg_;
  SparseMatrixC lhs_;
  double explicit_weight_;
  Eigen::ConjugateGradient<SparseMatrixC, Eigen::Lower | Eigen::Upper> cg_;
  mutable long iterations_ = 0;
};

/// Number of dt steps that make up the interval t; throws ValidationError if
/// t is not an integer multiple of dt.
long steps_for(double t, double dt);

/// Snapshot times t_min * 2^j, j = 0..count-1.
std::vector<double> geometric_schedule(double t_min, int count);
/// Snapshot times k * spacing, k = 1..round(t_final / spacing).
std::vector<double> uniform_schedule(double spacing, double t_final);

/// Trajectory at t = 0 and every schedule time. Throws NumericalError if the
/// L2 norm ever exceeds 10x its initial value.
Trajectory evolve_linear(const BoxOperator& op, const ComplexField& u0, const std::vector<double>& schedule,
                         const StepperConfig& cfg);

struct KernelSlice {
  double t = 0.0;
  cplx source;              // snapped node
  Eigen::Index source_index = 0;
  ComplexField field;       // H(t, ., source)
  double bound_margin = 0.0;  // min over nodes of (general envelope - |H|)
};

/// (pi t)^{-1} exp(-|z - w|^2 / t)
double general_envelope(double t, cplx z, cplx w);

/// Discrete delta 1/h^2 at the node nearest w evolved to each requested time.
/// Each t must be >= 10 dt and >= 4 h^2.
std::vector<KernelSlice> heat_kernel(const BoxOperator& op, cplx w, const std::vector<double>& times,
                                     const StepperConfig& cfg);
KernelSlice heat_kernel(const BoxOperator& op, cplx w, double t, const StepperConfig& cfg);

enum class BoundMode { general, polynomial };

/// Tail nodes where the envelope drops below this fraction of its peak are
/// judged against this absolute floor instead.
inline constexpr double kEnvelopeFloor = 1e-6;

struct GeneralBoundReport {
  double t = 0.0;
  double peak_ratio = 0.0;    // |H(t,w,w)| / envelope(w)
  double max_excess = 0.0;    // max (|H| - envelope)_+ / peak envelope
  double worst_violation = 0.0;  // max (|H| - (1+slack) envelope - floor) / peak envelope
  cplx worst_node;
  long violating_nodes = 0;
  double slack = 0.0;
  bool holds = false;         // no violating node
};

struct PolynomialFitReport {
  double c = 0.0;        // C
  double c_prime = 0.0;  // C'
  long samples = 0;
  bool all_below = false;  // every sample lies under the fitted envelope
};

GeneralBoundReport check_general_bound(const KernelSlice& slice, double slack);

/// Fits the tightest (C, C') such that the polynomial-mode envelope dominates
/// every sample above the floor: the line log C - C' x supported by the upper
/// hull of (x, y) = (t (mu(z)^{-2} + mu(w)^{-2}), log(|H| t) + |z-w|^2/(32 t))
/// minimising the summed gap.
PolynomialFitReport fit_polynomial_bound(const std::vector<KernelSlice>& slices, const Weight& w);

/// Dense exp(-t A) by scaling and squaring with the [13/13] Pade approximant.
/// Requires n <= 32.
MatrixXc expm_oracle(const BoxOperator& op, double t);

/// exp(M) for a dense square matrix.
MatrixXc expm_dense(const MatrixXc& m);

}  // namespace boxheat

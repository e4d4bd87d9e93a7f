#pragma once

// Discrete weighted Cauchy-Riemann operators on a GridSpec:
//
//   Dbar u  = u_zbar + phi_zbar u
//   Dbar* u = -u_z + phi_z u
//   Box u   = Dbar Dbar* u
//           = -u_{z zbar} - phi_zbar u_z + phi_z u_zbar + (|phi_zbar|^2 + phi_{z zbar}) u
//
// Box is assembled as a sparse Hermitian matrix with zero-Dirichlet closure:
// -(1/4) times the 5-point Laplacian, a symmetrised centred first-order
// (magnetic) part, and the diagonal potential V = |phi_zbar|^2 + phi_{z zbar}.

#include <cstdint>

#include "boxheat/grid.hpp"
#include "boxheat/weight.hpp"

namespace boxheat {

ComplexField apply_dbar(const Weight& w, const ComplexField& u);
ComplexField apply_dbar_star(const Weight& w, const ComplexField& u);

class BoxOperator {
 public:
  BoxOperator(GridSpec spec, Weight weight, SparseMatrixC matrix, ComplexField phi_z,
              ComplexField phi_zbar, ComplexField phi_zzbar, ComplexField potential);

  const GridSpec& spec() const { return spec_; }
  const Weight& weight() const { return weight_; }
  const SparseMatrixC& matrix() const { return matrix_; }

  const ComplexField& phi_z() const { return phi_z_; }
  const ComplexField& phi_zbar() const { return phi_zbar_; }
  const ComplexField& phi_zzbar() const { return phi_zzbar_; }
  /// V = |phi_zbar|^2 + phi_{z zbar} at the nodes (stored with zero imaginary part).
  const ComplexField& potential() const { return potential_; }

  ComplexField apply(const ComplexField& u) const;
  double max_abs_entry() const;

 private:
  GridSpec spec_;
  Weight weight_;
  SparseMatrixC matrix_;
  ComplexField phi_z_;
  ComplexField phi_zbar_;
  ComplexField phi_zzbar_;
  ComplexField potential_;
};

/// Throws ValidationError if the weight fails the subharmonicity audit on the
/// grid, NumericalError on non-finite coefficients.
BoxOperator assemble_box(const Weight& w, const GridSpec& spec);

/// max_ij |A_ij - conj(A_ji)|
double hermitian_defect(const SparseMatrixC& a);

/// Smooth bump exp(1 - 1/(1 - |z - c|^2 / R^2)) supported in the disk |z - c| < R.
ComplexField bump_field(const GridSpec& spec, cplx center, double radius);

/// exp(-|z - c|^2 / width^2)
ComplexField gaussian_bump(const GridSpec& spec, cplx center, double width);

/// max |Box u - Dbar(Dbar* u)| over nodes at least `margin` rings from the edge.
double factorization_defect(const BoxOperator& op, const ComplexField& u, int margin = 2);

struct EigenEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Smallest eigenvalue by block inverse iteration with Rayleigh-Ritz on a
/// sparse LDL^H factorisation.
EigenEstimate lowest_eigenvalue(const BoxOperator& op, int block = 6, int max_iter = 400,
                                double tol = 1e-11);

/// Smallest eigenvalue by a dense Hermitian eigensolve (small grids only).
double dense_lowest_eigenvalue(const BoxOperator& op);

struct OperatorAuditReport {
  double hermitian_defect = 0.0;
  double max_abs_entry = 0.0;
  double min_rayleigh = 0.0;       // min over random fields of <Au,u>/<u,u>
  double factorization_defect = 0.0;
  EigenEstimate lambda_min;
};

/// trials random fields (seeded) for the Rayleigh quotient; a centred Gaussian
/// of width extent/4 for the factorisation defect.
OperatorAuditReport operator_audit(const BoxOperator& op, int trials, std::uint64_t seed = 1);

}  // namespace boxheat

#include "boxheat/box_operator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include "boxheat/error.hpp"

namespace boxheat {

namespace {

ComplexField weight_field(const GridSpec& spec, const Weight& w, int dz, int dzbar) {
  return sample(spec, [&](cplx z) { return w.derivative(z, dz, dzbar); });
}

}  // namespace

ComplexField apply_dbar(const Weight& w, const ComplexField& u) {
  ComplexField out = d_zbar(u);
  const ComplexField coeff = weight_field(u.spec(), w, 0, 1);
  out.values() += coeff.values().cwiseProduct(u.values());
  return out;
}

ComplexField apply_dbar_star(const Weight& w, const ComplexField& u) {
  ComplexField out = d_z(u);
  out *= -1.0;
  const ComplexField coeff = weight_field(u.spec(), w, 1, 0);
  out.values() += coeff.values().cwiseProduct(u.values());
  return out;
}

BoxOperator::BoxOperator(GridSpec spec, Weight weight, SparseMatrixC matrix, ComplexField phi_z,
                         ComplexField phi_zbar, ComplexField phi_zzbar, ComplexField potential)
    : spec_(spec),
      weight_(std::move(weight)),
      matrix_(std::move(matrix)),
      phi_z_(std::move(phi_z)),
      phi_zbar_(std::move(phi_zbar)),
      phi_zzbar_(std::move(phi_zzbar)),
      potential_(std::move(potential)) {}

ComplexField BoxOperator::apply(const ComplexField& u) const {
  require_same_grid(u, phi_z_, "BoxOperator::apply");
  return ComplexField(spec_, matrix_ * u.values());
}

double BoxOperator::max_abs_entry() const {
  double m = 0.0;
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    for (SparseMatrixC::InnerIterator it(matrix_, r); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

BoxOperator assemble_box(const Weight& w, const GridSpec& spec) {
  const SubharmonicityReport audit = subharmonicity_audit(w, spec.extent(), spec.points());
  if (!audit.pass) {
    throw ValidationError(fmt::format(
        "assemble_box: weight '{}' is not subharmonic on the grid (min Laplacian {} at ({}, {}))",
        w.name(), audit.min_laplacian, audit.argmin.real(), audit.argmin.imag()));
  }

  ComplexField phi_z = weight_field(spec, w, 1, 0);
  ComplexField phi_zbar = weight_field(spec, w, 0, 1);
  ComplexField phi_zzbar = weight_field(spec, w, 1, 1);
  ComplexField potential(spec);
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    phi_zzbar[i] = phi_zzbar[i].real();
    potential[i] = std::norm(phi_zbar[i]) + phi_zzbar[i].real();
  }
  if (!potential.values().allFinite() || !phi_zbar.values().allFinite()) {
    throw NumericalError(fmt::format("assemble_box: non-finite coefficients for weight '{}'", w.name()));
  }

  // phi_x = 2 Re phi_zbar, phi_y = 2 Im phi_zbar; the first-order part
  // (i/2)(phi_x d_y - phi_y d_x) is symmetrised with edge-averaged coefficients.
  const int n = spec.points();
  const double h = spec.spacing();
  const double lap = 1.0 / (4.0 * h * h);
  const cplx i_unit{0.0, 1.0};
  auto phi_x = [&](Eigen::Index i) { return 2.0 * phi_zbar[i].real(); };
  auto phi_y = [&](Eigen::Index i) { return 2.0 * phi_zbar[i].imag(); };

  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * spec.size()));
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const Eigen::Index i = spec.index(a, b);
      triplets.emplace_back(i, i, cplx{4.0 * lap + potential[i].real(), 0.0});
      if (a + 1 < n) {
        const Eigen::Index j = spec.index(a + 1, b);
        const cplx magnetic = -i_unit * 0.25 * (phi_y(i) + phi_y(j)) / (2.0 * h);
        triplets.emplace_back(i, j, -lap + magnetic);
        triplets.emplace_back(j, i, std::conj(-lap + magnetic));
      }
      if (b + 1 < n) {
        const Eigen::Index j = spec.index(a, b + 1);
        const cplx magnetic = i_unit * 0.25 * (phi_x(i) + phi_x(j)) / (2.0 * h);
        triplets.emplace_back(i, j, -lap + magnetic);
        triplets.emplace_back(j, i, std::conj(-lap + magnetic));
      }
    }
  }
  SparseMatrixC m(spec.size(), spec.size());
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return BoxOperator(spec, w, std::move(m), std::move(phi_z), std::move(phi_zbar), std::move(phi_zzbar),
                     std::move(potential));
}

double hermitian_defect(const SparseMatrixC& a) {
  const SparseMatrixC ah = a.adjoint();
  const SparseMatrixC diff = a - ah;
  double m = 0.0;
  for (Eigen::Index r = 0; r < diff.outerSize(); ++r) {
    for (SparseMatrixC::InnerIterator it(diff, r); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

ComplexField bump_field(const GridSpec& spec, cplx center, double radius) {
  return sample(spec, [=](cplx z) -> cplx {
    const double s = std::norm(z - center) / (radius * radius);
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s));
  });
}

ComplexField gaussian_bump(const GridSpec& spec, cplx center, double width) {
  return sample(spec, [=](cplx z) -> cplx { return std::exp(-std::norm(z - center) / (width * width)); });
}

double factorization_defect(const BoxOperator& op, const ComplexField& u, int margin) {
  const ComplexField direct = op.apply(u);
  const ComplexField composed = apply_dbar(op.weight(), apply_dbar_star(op.weight(), u));
  double m = 0.0;
  for (Eigen::Index i = 0; i < op.spec().size(); ++i) {
    if (op.spec().ring(i) < margin) continue;
    m = std::max(m, std::abs(direct[i] - composed[i]));
  }
  return m;
}

EigenEstimate lowest_eigenvalue(const BoxOperator& op, int block, int max_iter, double tol) {
  using ColMajor = Eigen::SparseMatrix<cplx>;
  const ColMajor a = op.matrix();
  Eigen::SimplicialLDLT<ColMajor> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("lowest_eigenvalue: factorisation failed");

  const Eigen::Index dim = a.rows();
  block = static_cast<int>(std::min<Eigen::Index>(block, dim));
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal;
  MatrixXc x(dim, block);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) x(r, c) = cplx{normal(rng), normal(rng)};
  }

  EigenEstimate est;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    MatrixXc y(dim, block);
    for (int c = 0; c < block; ++c) y.col(c) = solver.solve(x.col(c));
    Eigen::HouseholderQR<MatrixXc> qr(y);
    const MatrixXc q = qr.householderQ() * MatrixXc::Identity(dim, block);
    const MatrixXc small = q.adjoint() * (a * q);
    Eigen::SelfAdjointEigenSolver<MatrixXc> ritz(0.5 * (small + small.adjoint()));
    x = q * ritz.eigenvectors();
    est.value = ritz.eigenvalues()(0);
    est.iterations = it;
    if (std::abs(est.value - previous) <= tol * std::max(1.0, std::abs(est.value))) {
      est.converged = true;
      break;
    }
    previous = est.value;
  }
  return est;
}

double dense_lowest_eigenvalue(const BoxOperator& op) {
  if (op.spec().size() > 5000) {
    throw ValidationError("dense_lowest_eigenvalue: grid too large for a dense eigensolve");
  }
  const MatrixXc dense = MatrixXc(op.matrix());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(dense, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

OperatorAuditReport operator_audit(const BoxOperator& op, int trials, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("operator_audit: trials must be >= 1");
  OperatorAuditReport r;
  r.hermitian_defect = hermitian_defect(op.matrix());
  r.max_abs_entry = op.max_abs_entry();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  r.min_rayleigh = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    ComplexField u(op.spec());
    for (Eigen::Index i = 0; i < u.spec().size(); ++i) u[i] = cplx{normal(rng), normal(rng)};
    const double q = inner(op.apply(u), u).real() / inner(u, u).real();
    r.min_rayleigh = std::min(r.min_rayleigh, q);
  }

  r.factorization_defect =
      factorization_defect(op, gaussian_bump(op.spec(), cplx{}, 0.25 * op.spec().extent()));
  r.lambda_min = lowest_eigenvalue(op);
  return r;
}

}  // namespace boxheat

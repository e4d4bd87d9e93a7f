#include <doctest.h>

#include <cmath>

#include "boxheat/box_operator.hpp"
#include "boxheat/error.hpp"

using namespace boxheat;

namespace {

double factorization_order(const char* weight) {
  const Weight w = catalog_weight(weight);
  auto defect = [&](int n) {
    const BoxOperator op = assemble_box(w, GridSpec(4.0, n));
    return factorization_defect(op, gaussian_bump(op.spec(), cplx{}, 1.0));
  };
  return std::log2(defect(33) / defect(65));
}

}  // namespace

TEST_CASE("assembled operator is Hermitian with nonnegative Rayleigh quotients") {
  for (const char* name : {"zero", "modsq", "modquartic", "harmonic_re_z2", "flat_example"}) {
    const BoxOperator op = assemble_box(catalog_weight(name), GridSpec(4.0, 33));
    const OperatorAuditReport r = operator_audit(op, 4, 3);
    CHECK(r.hermitian_defect <= 1e-12 * r.max_abs_entry);
    CHECK(r.min_rayleigh >= -1e-8);
    CHECK(r.lambda_min.converged);
    CHECK(r.lambda_min.value > 0.0);
  }
}

TEST_CASE("non-subharmonic weights are rejected") {
  CHECK_THROWS_AS(assemble_box(catalog_weight("neg_modsq"), GridSpec(2.0, 9)), ValidationError);
}

TEST_CASE("potential of |z|^2 is |z|^2 + 1") {
  const BoxOperator op = assemble_box(catalog_weight("modsq"), GridSpec(2.0, 9));
  for (Eigen::Index i = 0; i < op.spec().size(); ++i) {
    CHECK(op.potential()[i].real() == doctest::Approx(std::norm(op.spec().node(i)) + 1.0));
  }
}

TEST_CASE("free operator is a quarter of the negative Laplacian") {
  const BoxOperator op = assemble_box(catalog_weight("zero"), GridSpec(3.0, 61));
  const ComplexField u = gaussian_bump(op.spec(), cplx{}, 1.0);
  const ComplexField au = op.apply(u);
  for (Eigen::Index i = 0; i < op.spec().size(); ++i) {
    if (op.spec().ring(i) < 2) continue;
    const double r2 = std::norm(op.spec().node(i));
    const double exact = -0.25 * (4.0 * r2 - 4.0) * std::exp(-r2);
    CHECK(std::abs(au[i].real() - exact) < 5e-3);
  }
}

TEST_CASE("factorisation defect decays at second order") {
  for (const char* name : {"zero", "modsq", "modquartic"}) {
    CAPTURE(name);
    CHECK(factorization_order(name) >= 1.8);
  }
}

TEST_CASE("sparse and dense lowest eigenvalues agree") {
  for (const char* name : {"zero", "modsq", "flat_example"}) {
    const BoxOperator op = assemble_box(catalog_weight(name), GridSpec(4.0, 16));
    const EigenEstimate e = lowest_eigenvalue(op);
    CHECK(e.value == doctest::Approx(dense_lowest_eigenvalue(op)).epsilon(1e-9));
  }
}

TEST_CASE("Gaussian is nearly an eigenfunction of the |z|^2 box with eigenvalue 2") {
  // Box = Dbar* Dbar + 2 phi_{z zbar} and Dbar exp(-|z|^2) = 0.
  const BoxOperator op = assemble_box(catalog_weight("modsq"), GridSpec(5.0, 101));
  const ComplexField u = gaussian_bump(op.spec(), cplx{}, 1.0);
  const ComplexField au = op.apply(u);
  ComplexField residual = au - cplx{2.0} * u;
  CHECK(lp_norm(residual, 2.0) / lp_norm(u, 2.0) < 1e-2);
}

TEST_CASE("bump field has compact support") {
  const GridSpec g(2.0, 41);
  const ComplexField b = bump_field(g, cplx{}, 1.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (std::abs(g.node(i)) >= 1.0) CHECK(b[i] == cplx{});
  }
  CHECK(b[g.nearest(cplx{})].real() == doctest::Approx(1.0));
}

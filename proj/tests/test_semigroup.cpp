#include <doctest.h>

#include <cmath>
#include <random>

#include "boxheat/error.hpp"
#include "boxheat/semigroup.hpp"

using namespace boxheat;

namespace {

ComplexField oracle_apply(const MatrixXc& e, const ComplexField& u) { return ComplexField(u.spec(), e * u.values()); }

double rel_l2(const ComplexField& a, const ComplexField& b) { return lp_norm(a - b, 2.0) / lp_norm(b, 2.0); }

ComplexField cn_at(const BoxOperator& op, const ComplexField& u0, double t, double dt, Scheme scheme) {
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.scheme = scheme;
  return evolve_linear(op, u0, {t}, cfg).back();
}

}  // namespace

TEST_CASE("dense exponential of simple matrices") {
  MatrixXc d = MatrixXc::Zero(3, 3);
  d(0, 0) = -50.0;
  d(1, 1) = 0.5;
  d(2, 2) = cplx{0.0, 1.0};
  const MatrixXc e = expm_dense(d);
  CHECK(std::abs(e(0, 0) - std::exp(-50.0)) < 1e-30);
  CHECK(std::abs(e(1, 1) - std::exp(0.5)) < 1e-14);
  CHECK(std::abs(e(2, 2) - std::exp(cplx{0.0, 1.0})) < 1e-14);

  MatrixXc n = MatrixXc::Zero(2, 2);
  n(0, 1) = 3.0;
  const MatrixXc en = expm_dense(n);
  CHECK(std::abs(en(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(en(0, 1) - 3.0) < 1e-14);
  CHECK(std::abs(en(1, 0)) < 1e-15);
}

TEST_CASE("dense oracle has the semigroup property") {
  const BoxOperator op = assemble_box(catalog_weight("modsq"), GridSpec(4.0, 12));
  const MatrixXc a = expm_oracle(op, 0.1);
  const MatrixXc b = expm_oracle(op, 0.25);
  const MatrixXc ab = expm_oracle(op, 0.35);
  CHECK((a * b - ab).norm() < 1e-12 * ab.norm());
  CHECK((expm_oracle(op, 0.0) - MatrixXc::Identity(op.spec().size(), op.spec().size())).norm() == 0.0);
  CHECK_THROWS_AS(expm_oracle(assemble_box(catalog_weight("zero"), GridSpec(1.0, 33)), 1.0), ValidationError);
}

TEST_CASE("Crank-Nicolson matches the dense exponential at second order") {
  const BoxOperator op = assemble_box(catalog_weight("modsq"), GridSpec(4.0, 16));
  const ComplexField u0 = gaussian_bump(op.spec(), cplx{0.5, -0.3}, 1.2);
  const ComplexField exact = oracle_apply(expm_oracle(op, 0.2), u0);
  CHECK(rel_l2(cn_at(op, u0, 0.2, 1e-3, Scheme::crank_nicolson), exact) < 1e-4);
  const double e1 = rel_l2(cn_at(op, u0, 0.2, 0.02, Scheme::crank_nicolson), exact);
  const double e2 = rel_l2(cn_at(op, u0, 0.2, 0.01, Scheme::crank_nicolson), exact);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
}

TEST_CASE("backward Euler is first order") {
  const BoxOperator op = assemble_box(catalog_weight("modsq"), GridSpec(4.0, 16));
  const ComplexField u0 = gaussian_bump(op.spec(), cplx{}, 1.0);
  const ComplexField exact = oracle_apply(expm_oracle(op, 0.2), u0);
  const double e1 = rel_l2(cn_at(op, u0, 0.2, 0.01, Scheme::backward_euler), exact);
  const double e2 = rel_l2(cn_at(op, u0, 0.2, 0.005, Scheme::backward_euler), exact);
  CHECK(std::log2(e1 / e2) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("linear flow is an L2 contraction") {
  const BoxOperator op = assemble_box(catalog_weight("modquartic"), GridSpec(3.0, 25));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  ComplexField u0(op.spec());
  for (Eigen::Index i = 0; i < u0.spec().size(); ++i) u0[i] = cplx{normal(rng), normal(rng)};
  StepperConfig cfg;
  cfg.dt = 0.01;
  const Trajectory traj = evolve_linear(op, u0, uniform_schedule(0.1, 1.0), cfg);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    CHECK(lp_norm(traj.field(i), 2.0) <= lp_norm(traj.field(i - 1), 2.0) * (1.0 + 1e-12));
  }
}

TEST_CASE("schedules and step counts") {
  CHECK(steps_for(0.2, 1e-3) == 200);
  CHECK_THROWS_AS(steps_for(0.2005, 1e-3), ValidationError);
  const std::vector<double> g = geometric_schedule(0.1, 4);
  CHECK(g.back() == doctest::Approx(0.8));
  const std::vector<double> u = uniform_schedule(0.25, 1.0);
  CHECK(u.size() == 4);
  CHECK(u.front() == doctest::Approx(0.25));
  StepperConfig bad;
  bad.dt = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK(parse_scheme("backward_euler") == Scheme::backward_euler);
  CHECK_THROWS_AS(parse_scheme("rk4"), ValidationError);
}

TEST_CASE("free kernel column keeps unit mass and tracks the Gaussian") {
  const BoxOperator op = assemble_box(catalog_weight("zero"), GridSpec(6.0, 121));
  StepperConfig cfg;
  cfg.dt = 2e-3;
  const KernelSlice s = heat_kernel(op, cplx{}, 0.5, cfg);
  const double h2 = op.spec().spacing() * op.spec().spacing();
  CHECK(s.field.values().sum().real() * h2 == doctest::Approx(1.0).epsilon(1e-6));
  const GeneralBoundReport r = check_general_bound(s, 0.05);
  CHECK(r.peak_ratio == doctest::Approx(1.0).epsilon(0.05));
  CHECK(r.max_excess <= 0.05);
  CHECK_THROWS_AS(heat_kernel(op, cplx{}, 0.01, cfg), ValidationError);
}

TEST_CASE("bound check on a synthetic slice equal to the envelope") {
  const GridSpec g(4.0, 41);
  KernelSlice s{0.5, cplx{}, g.nearest(cplx{}), sample(g, [](cplx z) { return general_envelope(0.5, z, cplx{}); })};
  const GeneralBoundReport r = check_general_bound(s, 0.0);
  CHECK(r.holds);
  CHECK(r.peak_ratio == doctest::Approx(1.0));
  s.field *= 1.2;
  CHECK_FALSE(check_general_bound(s, 0.05).holds);
  CHECK(check_general_bound(s, 0.25).holds);
}

TEST_CASE("polynomial fit recovers a planted envelope") {
  const Weight w = catalog_weight("modsq");
  const GridSpec g(3.0, 31);
  const double c = 2.0, c_prime = 0.5;
  std::vector<KernelSlice> slices;
  for (double t : {0.25, 0.5, 1.0}) {
    KernelSlice s{t, cplx{}, g.nearest(cplx{}), sample(g, [&](cplx z) {
                    const double x = t * (inverse_mu_squared(w, z) + inverse_mu_squared(w, cplx{}));
                    return c / t * std::exp(-std::norm(z) / (32.0 * t) - c_prime * x);
                  })};
    slices.push_back(std::move(s));
  }
  const PolynomialFitReport r = fit_polynomial_bound(slices, w);
  CHECK(r.c == doctest::Approx(c).epsilon(1e-9));
  CHECK(r.c_prime == doctest::Approx(c_prime).epsilon(1e-9));
  CHECK(r.all_below);
}

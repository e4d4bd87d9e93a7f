#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "boxheat/error.hpp"
#include "boxheat/mild.hpp"

using namespace boxheat;

namespace {

Trajectory constant_trajectory(const ComplexField& w, const std::vector<double>& times) {
  Trajectory t(w.spec());
  for (double s : times) t.push(s, w);
  return t;
}

std::vector<double> with_zero(double ds, double t_final) {
  std::vector<double> t{0.0};
  for (double s : uniform_schedule(ds, t_final)) t.push_back(s);
  return t;
}

}  // namespace

TEST_CASE("power nonlinearity") {
  const GridSpec g(1.0, 5);
  const ComplexField u = sample(g, [](cplx z) { return z + cplx{0.5, 0.0}; });
  const ComplexField f = f_apply(Nonlinearity::power(3.0), u);
  for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(std::abs(f[i] - std::norm(u[i]) * u[i]) < 1e-14);
  CHECK(lp_norm(f_apply(Nonlinearity::none(), u), kInfNorm) == 0.0);
  CHECK_THROWS_AS(Nonlinearity::power(2.0).validate(), ValidationError);
  CHECK_NOTHROW(Nonlinearity::none().validate());
}

TEST_CASE("Duhamel map without a nonlinearity is the linear flow") {
  const BoxOperator op = assemble_box(catalog_weight("modsq"), GridSpec(3.0, 21));
  const ComplexField u0 = gaussian_bump(op.spec(), cplx{}, 1.0);
  StepperConfig cfg;
  cfg.dt = 0.01;
  const std::vector<double> times = with_zero(0.05, 0.5);
  const Trajectory phi = duhamel_apply(op, Nonlinearity::none(), u0, constant_trajectory(u0, times), cfg);
  const Trajectory lin = evolve_linear(op, u0, uniform_schedule(0.05, 0.5), cfg);
  CHECK(max_relative_l2(phi, lin) < 1e-12);
}

TEST_CASE("Duhamel quadrature converges at second order to the dense integral") {
  // For a time-constant source g: int_0^t exp(-(t-s)A) g ds = A^{-1} (I - exp(-tA)) g.
  const BoxOperator op = assemble_box(catalog_weight("modsq"), GridSpec(3.0, 12));
  const ComplexField w = gaussian_bump(op.spec(), cplx{0.3, 0.0}, 1.0);
  const Nonlinearity nl = Nonlinearity::power(3.0);
  const ComplexField g = f_apply(nl, w);
  const MatrixXc a(op.matrix());
  const double t = 0.4;
  const VectorXc integral = a.partialPivLu().solve((MatrixXc::Identity(a.rows(), a.cols()) - expm_oracle(op, t)) * g.values());

  auto error = [&](double ds) {
    StepperConfig cfg;
    cfg.dt = 1e-4;
    ComplexField zero(op.spec());
    const Trajectory phi = duhamel_apply(op, nl, zero, constant_trajectory(w, with_zero(ds, t)), cfg);
    return (phi.back().values() - integral).norm() / integral.norm();
  };
  const double e1 = error(0.02);
  const double e2 = error(0.01);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("Duhamel map rejects malformed schedules") {
  const BoxOperator op = assemble_box(catalog_weight("zero"), GridSpec(1.0, 9));
  const ComplexField u0(op.spec());
  StepperConfig cfg;
  cfg.dt = 0.01;
  CHECK_THROWS_AS(duhamel_apply(op, Nonlinearity::power(3.0), u0, constant_trajectory(u0, {0.0, 0.1, 0.3}), cfg),
                  ValidationError);
  CHECK_THROWS_AS(duhamel_apply(op, Nonlinearity::power(3.0), u0, constant_trajectory(u0, {0.0, 0.015}), cfg),
                  ValidationError);
}

TEST_CASE("Picard iteration from zero data stops at once") {
  const BoxOperator op = assemble_box(catalog_weight("modsq"), GridSpec(3.0, 17));
  StepperConfig cfg;
  cfg.dt = 0.01;
  const PicardResult r = picard_solve(op, Nonlinearity::power(3.0), ComplexField(op.spec()), 0.05, 0.5, cfg, {});
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 1);
  CHECK(lp_norm(r.solution.back(), kInfNorm) == 0.0);
}

TEST_CASE("Picard iteration contracts for small data and reaches a fixed point") {
  const BoxOperator op = assemble_box(catalog_weight("modsq"), GridSpec(3.0, 21));
  ComplexField u0 = gaussian_bump(op.spec(), cplx{}, 1.0);
  u0 *= 0.3;
  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.scheme = Scheme::backward_euler;
  const Nonlinearity nl = Nonlinearity::power(3.0);
  const PicardResult r = picard_solve(op, nl, u0, 0.05, 1.0, cfg, {});
  REQUIRE(r.report.converged);
  for (double ratio : r.report.ratios) CHECK(ratio < 1.0);
  const Trajectory again = duhamel_apply(op, nl, u0, r.solution, cfg);
  CHECK(max_relative_l2(again, r.solution) < 1e-8);
}

TEST_CASE("Picard iteration reports divergence for large data") {
  const BoxOperator op = assemble_box(catalog_weight("zero"), GridSpec(3.0, 17));
  ComplexField u0 = gaussian_bump(op.spec(), cplx{}, 1.0);
  u0 *= 6.0;
  StepperConfig cfg;
  cfg.dt = 0.01;
  PicardOptions opts;
  opts.max_iter = 40;
  const PicardResult r = picard_solve(op, Nonlinearity::power(3.0), u0, 0.05, 1.0, cfg, opts);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.diverged);
  CHECK_FALSE(r.report.warnings.empty());
}

TEST_CASE("semi-implicit solver agrees with the Picard fixed point") {
  const BoxOperator op = assemble_box(catalog_weight("modsq"), GridSpec(3.0, 21));
  ComplexField u0 = gaussian_bump(op.spec(), cplx{}, 1.0);
  u0 *= 0.3;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.scheme = Scheme::backward_euler;
  const Nonlinearity nl = Nonlinearity::power(3.0);
  const PicardResult p = picard_solve(op, nl, u0, 0.05, 0.5, cfg, {});
  REQUIRE(p.report.converged);
  const ImexResult imex = solve_imex(op, nl, u0, uniform_schedule(0.05, 0.5), cfg.dt);
  CHECK_FALSE(imex.blew_up);
  CHECK(max_relative_l2(imex.trajectory, p.solution) < 1e-3);
}

TEST_CASE("semi-implicit solver flags blow-up") {
  const BoxOperator op = assemble_box(catalog_weight("zero"), GridSpec(3.0, 17));
  ComplexField u0 = gaussian_bump(op.spec(), cplx{}, 1.0);
  u0 *= 8.0;
  const ImexResult r = solve_imex(op, Nonlinearity::power(3.0), u0, uniform_schedule(0.05, 1.0), 1e-3, 1e6);
  CHECK(r.blew_up);
  CHECK(r.blowup_time > 0.0);
  CHECK(r.blowup_time < 1.0);
}

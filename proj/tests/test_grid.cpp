#include <doctest.h>

#include <cmath>
#include <sstream>

#include "boxheat/error.hpp"
#include "boxheat/grid.hpp"
#include "boxheat/trajectory.hpp"

using namespace boxheat;

TEST_CASE("grid geometry") {
  const GridSpec g(2.0, 5);
  CHECK(g.spacing() == doctest::Approx(1.0));
  CHECK(g.size() == 25);
  CHECK(g.node(0, 0) == cplx{-2.0, -2.0});
  CHECK(g.node(g.index(4, 2)) == cplx{2.0, 0.0});
  CHECK(g.nearest(cplx{0.4, -0.6}) == g.index(2, 1));
  CHECK(g.nearest(cplx{10.0, 10.0}) == g.index(4, 4));
  CHECK(g.ring(g.index(0, 3)) == 0);
  CHECK(g.ring(g.index(2, 2)) == 2);
  CHECK_THROWS_AS(GridSpec(0.0, 5), ValidationError);
  CHECK_THROWS_AS(GridSpec(1.0, 2), ValidationError);
}

TEST_CASE("Wirtinger differences are exact on quadratics away from nothing") {
  const GridSpec g(1.0, 21);
  const ComplexField u = sample(g, [](cplx z) { return z * z + 3.0 * std::conj(z) * z; });
  const ComplexField dz = d_z(u);
  const ComplexField dzb = d_zbar(u);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const cplx z = g.node(i);
    CHECK(std::abs(dz[i] - (2.0 * z + 3.0 * std::conj(z))) < 1e-10);
    CHECK(std::abs(dzb[i] - 3.0 * z) < 1e-10);
  }
}

TEST_CASE("Wirtinger differences converge at second order") {
  auto err = [](int n) {
    const GridSpec g(1.0, n);
    const ComplexField u = sample(g, [](cplx z) { return std::exp(z.real()) * std::sin(z.imag()); });
    const ComplexField d = d_zbar(u);
    double e = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const cplx z = g.node(i);
      const cplx exact = 0.5 * std::exp(z.real()) * cplx{std::sin(z.imag()), std::cos(z.imag())};
      e = std::max(e, std::abs(d[i] - exact));
    }
    return e;
  };
  const double order = std::log2(err(21) / err(41));
  CHECK(order > 1.8);
}

TEST_CASE("norms and inner products") {
  const GridSpec g(1.0, 3);
  ComplexField u(g);
  u[4] = cplx{3.0, 4.0};
  const double h2 = g.spacing() * g.spacing();
  CHECK(lp_norm(u, 1.0) == doctest::Approx(5.0 * h2));
  CHECK(lp_norm(u, 2.0) == doctest::Approx(5.0 * std::sqrt(h2)));
  CHECK(lp_norm(u, kInfNorm) == doctest::Approx(5.0));
  CHECK(inner(u, u).real() == doctest::Approx(25.0 * h2));
  CHECK(boundary_mass(u) == 0.0);
  u[0] = 2.0;
  CHECK(boundary_mass(u) == doctest::Approx(2.0));
  CHECK_THROWS_AS(lp_norm(u, 0.5), ValidationError);
}

TEST_CASE("Gaussian norms approach their continuum values") {
  const GridSpec g(6.0, 241);
  const ComplexField u = sample(g, [](cplx z) { return std::exp(-std::norm(z)); });
  CHECK(lp_norm(u, 1.0) == doctest::Approx(M_PI).epsilon(1e-8));
  CHECK(lp_norm(u, 2.0) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-8));
}

TEST_CASE("field arithmetic guards the grid") {
  const GridSpec a(1.0, 5), b(1.0, 7);
  ComplexField u(a), v(b);
  CHECK_THROWS_AS(u += v, ValidationError);
  CHECK_THROWS_AS(sample(a, [](cplx) { return cplx{NAN, 0.0}; }), ValidationError);
}

TEST_CASE("field CSV layout") {
  const GridSpec g(1.0, 3);
  const ComplexField u = sample(g, [](cplx z) { return z; });
  std::ostringstream out;
  write_field_csv(out, u);
  const std::string s = out.str();
  CHECK(s.rfind("x,y,re,im\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 10);
}

TEST_CASE("trajectory ordering and differences") {
  const GridSpec g(1.0, 3);
  Trajectory a(g), b(g);
  ComplexField one = sample(g, [](cplx) { return cplx{1.0}; });
  a.push(0.0, one);
  CHECK_THROWS_AS(a.push(0.0, one), ValidationError);
  a.push(1.0, 2.0 * one);
  b.push(0.0, one);
  b.push(1.0, one);
  const Trajectory d = difference(a, b);
  CHECK(lp_norm(d.field(0), kInfNorm) == 0.0);
  CHECK(lp_norm(d.field(1), kInfNorm) == doctest::Approx(1.0));
  CHECK(max_relative_l2(a, b) == doctest::Approx(1.0));
  Trajectory c(GridSpec(1.0, 5));
  CHECK_THROWS_AS(c.push(0.0, one), ValidationError);
}

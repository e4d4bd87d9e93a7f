#include <doctest.h>

#include <cmath>
#include <random>

#include "boxheat/error.hpp"
#include "boxheat/weight.hpp"

using namespace boxheat;
using C = std::map<Bidegree, cplx>;

TEST_CASE("polynomial weight rejects non-real coefficient tables") {
  CHECK_THROWS_AS(PolynomialWeight(C{{{2, 0}, 1.0}}), ValidationError);
  CHECK_THROWS_AS(PolynomialWeight(C{{{1, 1}, cplx{1.0, 0.5}}}), ValidationError);
  CHECK_THROWS_AS(PolynomialWeight(C{{{-1, 1}, 1.0}, {{1, -1}, 1.0}}), ValidationError);
  CHECK_NOTHROW(PolynomialWeight(C{{{2, 0}, cplx{0.5, 0.2}}, {{0, 2}, cplx{0.5, -0.2}}}));
}

TEST_CASE("Wirtinger derivatives of a polynomial match hand expansions") {
  // phi = z^2 zbar + z zbar^2 = 2 |z|^2 Re z
  const PolynomialWeight p(C{{{2, 1}, 1.0}, {{1, 2}, 1.0}});
  const cplx z{0.7, -1.3};
  const cplx zb = std::conj(z);
  CHECK(std::abs(p.derivative(z, 1, 0) - (2.0 * z * zb + zb * zb)) < 1e-13);
  CHECK(std::abs(p.derivative(z, 0, 1) - (z * z + 2.0 * z * zb)) < 1e-13);
  CHECK(std::abs(p.derivative(z, 1, 1) - (2.0 * z + 2.0 * zb)) < 1e-13);
  CHECK(std::abs(p.derivative(z, 2, 1) - cplx{2.0}) < 1e-13);
  CHECK(std::abs(p.derivative(z, 3, 0)) < 1e-13);
  CHECK(p.value(z) == doctest::Approx(2.0 * std::norm(z) * z.real()));
}

TEST_CASE("finite-difference Wirtinger derivatives agree with exact ones") {
  const PolynomialWeight p(C{{{2, 2}, 1.0}, {{1, 1}, 0.5}});
  auto f = [&](cplx z) { return p.value(z); };
  const cplx z{0.4, 0.9};
  for (int j = 0; j <= 2; ++j) {
    for (int k = 0; k <= 2; ++k) {
      if (j + k == 0) continue;
      const cplx fd = finite_difference_wirtinger(f, z, j, k, 1e-3);
      CHECK(std::abs(fd - p.derivative(z, j, k)) < 1e-4 * (1.0 + std::abs(p.derivative(z, j, k))));
    }
  }
}

TEST_CASE("radial weight jet matches the polynomial for g(t) = t^2") {
  const Weight radial("radial", radial_weight([](double t, int n) {
                        if (n == 0) return t * t;
                        if (n == 1) return 2.0 * t;
                        if (n == 2) return 2.0;
                        return 0.0;
                      }));
  const Weight poly = catalog_weight("modquartic");
  for (cplx z : {cplx{0.3, 0.1}, cplx{-1.2, 0.8}, cplx{0.0, 2.0}}) {
    for (int j = 0; j <= 3; ++j) {
      for (int k = 0; k <= 3; ++k) {
        CHECK(std::abs(radial.derivative(z, j, k) - poly.derivative(z, j, k)) < 1e-11);
      }
    }
  }
}

TEST_CASE("Taylor coefficients are conjugate-symmetric for random real polynomials") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 5; ++trial) {
    C coeffs;
    for (int j = 0; j <= 3; ++j) {
      for (int k = j; k <= 3; ++k) {
        const cplx c = j == k ? cplx{normal(rng)} : cplx{normal(rng), normal(rng)};
        coeffs[{j, k}] = c;
        coeffs[{k, j}] = std::conj(c);
      }
    }
    const Weight w("random", PolynomialWeight(coeffs));
    const cplx z{normal(rng), normal(rng)};
    const TaylorTable t = taylor_table(w, z, 3);
    for (int j = 1; j <= 3; ++j) {
      for (int k = 1; k <= 3; ++k) CHECK(std::abs(t.at(j, k) - std::conj(t.at(k, j))) < 1e-10);
    }
  }
}

TEST_CASE("mu of |z|^2 is sqrt(r) everywhere") {
  const Weight w = catalog_weight("modsq");
  for (double r : {0.25, 1.0, 4.0}) {
    CHECK(mu(w, cplx{0.3, -2.0}, r) == doctest::Approx(std::sqrt(r)).epsilon(1e-14));
  }
  CHECK(inverse_mu_squared(w, cplx{}) == doctest::Approx(1.0));
  CHECK(std::isinf(mu(catalog_weight("harmonic_re_z2"), cplx{1.0, 1.0}, 1.0)));
}

TEST_CASE("delta of the catalog weights") {
  const DeltaReport modsq = delta(catalog_weight("modsq"), 3.0, 31, 6);
  CHECK(std::abs(modsq.delta - 1.0) < 1e-12);
  CHECK(modsq.classification == DeltaClass::delta_positive);

  const DeltaReport harmonic = delta(catalog_weight("harmonic_re_z2"), 3.0, 31, 6);
  CHECK(harmonic.delta == 0.0);
  CHECK(harmonic.classification == DeltaClass::delta_zero);

  const DeltaReport quartic = delta(catalog_weight("modquartic"), 3.0, 31, 6);
  CHECK(std::abs(quartic.delta - 1.0) < 1e-6);

  const DeltaReport flat = delta(catalog_weight("flat_example"), 3.0, 31, 6);
  CHECK(flat.delta == 0.0);
  CHECK(std::abs(flat.argmin) <= 6.0 / 30.0 + 1e-12);
  CHECK(flat.classification == DeltaClass::delta_zero);
}

TEST_CASE("delta input validation") {
  const Weight w = catalog_weight("modsq");
  CHECK_THROWS_AS(delta(w, 0.0, 11, 1), ValidationError);
  CHECK_THROWS_AS(delta(w, 1.0, 1, 1), ValidationError);
}

TEST_CASE("subharmonicity audit") {
  CHECK(subharmonicity_audit(catalog_weight("modsq"), 3.0, 21).pass);
  CHECK(subharmonicity_audit(catalog_weight("harmonic_re_z2"), 3.0, 21).pass);
  CHECK(subharmonicity_audit(catalog_weight("flat_example"), 3.0, 21).pass);
  CHECK_FALSE(subharmonicity_audit(catalog_weight("neg_modsq"), 3.0, 21).pass);
}

TEST_CASE("flat profile is C^2 across the join and flat at the origin") {
  const double eps = 1e-7;
  for (int order = 0; order <= 2; ++order) {
    CHECK(flat_profile(0.5 - eps, order) == doctest::Approx(flat_profile(0.5 + eps, order)).epsilon(1e-5));
  }
  for (int order = 0; order <= 4; ++order) CHECK(flat_profile(0.01, order) == 0.0);
  CHECK(flat_profile(-1.0, 0) == 0.0);
  for (double t : {0.6, 1.0, 3.0, 10.0}) {
    CHECK(flat_profile(t, 1) > 0.0);
    CHECK(flat_profile(t, 2) > 0.0);
  }
}

TEST_CASE("unknown catalog names are rejected") { CHECK_THROWS_AS(catalog_weight("nope"), ValidationError); }

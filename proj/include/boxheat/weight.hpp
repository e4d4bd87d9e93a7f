#pragma once

// Subharmonic weights phi on the complex plane and the scale quantities
// built from their Taylor coefficients:
//
//   a_jk(z)  = 1/(j! k!) d^{j+k} phi / dz^j dzbar^k (z)
//   mu(z, r) = inf_{j,k >= 1} |r / a_jk(z)|^{1/(j+k)}      (+inf if all vanish)
//   delta    = inf_z mu(z, 1)^{-2}
//
// delta > 0 selects the exponentially damped regime of the heat flow,
// delta = 0 the purely polynomial one.

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "boxheat/types.hpp"

namespace boxheat {

/// Exponent pair (j, k) of the monomial z^j zbar^k.
struct Bidegree {
  int j = 0;
  int k = 0;
  auto operator<=>(const Bidegree&) const = default;
};

/// phi(z) = sum c_jk z^j zbar^k with c_jk = conj(c_kj), so phi is real.
class PolynomialWeight {
 public:
  /// Throws ValidationError if the table is not conjugate-symmetric or has
  /// negative exponents. Zero coefficients are dropped.
  explicit PolynomialWeight(std::map<Bidegree, cplx> coeffs, double symmetry_tol = 1e-12);

  const std::map<Bidegree, cplx>& coeffs() const { return coeffs_; }
  int degree() const { return degree_; }

  double value(cplx z) const;
  /// d^{dz+dzbar} phi / dz^dz dzbar^dzbar at z.
  cplx derivative(cplx z, int dz, int dzbar) const;
  /// True when no coefficient with j >= 1 and k >= 1 is present.
  bool is_harmonic() const;

 private:
  std::map<Bidegree, cplx> coeffs_;
  int degree_ = 0;
};

/// Wirtinger jet: (z, j, k) -> d^{j+k} phi / dz^j dzbar^k (z).
using WirtingerJet = std::function<cplx(cplx, int, int)>;

/// A smooth real weight given by a point evaluator and, optionally, an exact
/// Wirtinger jet. Without a jet, derivatives come from central differences of
/// the evaluator with step fd_step.
class SmoothWeight {
 public:
  static constexpr int kMaxTaylorOrder = 4;

  explicit SmoothWeight(std::function<double(cplx)> eval, WirtingerJet jet = {},
                        double fd_step = 1e-2);

  double value(cplx z) const { return eval_(z); }
  cplx derivative(cplx z, int dz, int dzbar) const;
  bool has_exact_jet() const { return static_cast<bool>(jet_); }
  double fd_step() const { return fd_step_; }

 private:
  std::function<double(cplx)> eval_;
  WirtingerJet jet_;
  double fd_step_;
};

/// d^{j+k} f / dz^j dzbar^k by second-order central differences of f with
/// step h (iterated two-sided differences in x and y).
cplx finite_difference_wirtinger(const std::function<double(cplx)>& f, cplx z, int j, int k,
                                 double h);

/// Radial profile g with phi(z) = g(|z|^2); deriv(t, n) = g^{(n)}(t).
using RadialProfile = std::function<double(double, int)>;

/// Smooth weight g(|z|^2) with the exact jet obtained from the derivatives of g.
SmoothWeight radial_weight(RadialProfile profile);

class Weight {
 public:
  Weight(std::string name, PolynomialWeight poly);
  Weight(std::string name, SmoothWeight smooth);

  const std::string& name() const { return name_; }

  double value(cplx z) const;
  cplx derivative(cplx z, int dz, int dzbar) const;
  cplx dz(cplx z) const { return derivative(z, 1, 0); }
  cplx dzbar(cplx z) const { return derivative(z, 0, 1); }
  /// d^2 phi / dz dzbar, real for a real weight.
  double dz_dzbar(cplx z) const { return derivative(z, 1, 1).real(); }
  double laplacian(cplx z) const { return 4.0 * dz_dzbar(z); }

  const PolynomialWeight* polynomial() const { return std::get_if<PolynomialWeight>(&impl_); }
  const SmoothWeight* smooth() const { return std::get_if<SmoothWeight>(&impl_); }

  /// Truncation order used for mu: the degree for polynomials, 4 otherwise.
  int default_taylor_order() const;

 private:
  std::string name_;
  std::variant<PolynomialWeight, SmoothWeight> impl_;
};

/// a_jk at a fixed center, 1 <= j, k <= order.
struct TaylorTable {
  cplx center;
  int order = 0;
  std::vector<cplx> entries;  // row-major, (j-1) * order + (k-1)

  cplx at(int j, int k) const { return entries[static_cast<std::size_t>((j - 1) * order + (k - 1))]; }
};

/// Exact for polynomial weights (binomial re-expansion about z). Throws
/// ValidationError for order < 1, for smooth weights beyond order 4, and
/// when a_jk != conj(a_kj) beyond tolerance.
TaylorTable taylor_table(const Weight& w, cplx z, int order);

/// mu(z, r); +inf when every a_jk vanishes. order <= 0 uses the weight default.
double mu(const Weight& w, cplx z, double r, int order = 0);

/// mu(z, 1)^{-2}, defined as 0 where mu = +inf.
double inverse_mu_squared(const Weight& w, cplx z, int order = 0);

enum class DeltaClass { delta_positive, delta_zero };

std::string_view to_string(DeltaClass c);

struct DeltaReport {
  double delta = 0.0;
  cplx argmin;
  double mu_at_argmin = 0.0;
  double extent = 0.0;
  int resolution = 0;
  int refine_rounds = 0;
  double final_cell = 0.0;  // spacing of the last refinement grid
  DeltaClass classification = DeltaClass::delta_zero;
  /// |c|^{2/(j0+k0)} from a constant top-bidegree coefficient (polynomials).
  std::optional<double> polynomial_lower_bound;
};

/// Values of delta at or below this are classified delta_zero.
inline constexpr double kDeltaZeroThreshold = 1e-10;

/// Grid search for inf mu(z,1)^{-2} on [-extent, extent]^2 followed by
/// refine_rounds of local refinement around the running minimiser.
DeltaReport delta(const Weight& w, double extent, int resolution, int refine_rounds);

struct SubharmonicityReport {
  double min_laplacian = 0.0;
  double max_abs_laplacian = 0.0;
  cplx argmin;
  double tolerance = 0.0;
  bool pass = false;
};

/// Samples Laplacian(phi) = 4 phi_{z zbar} on a resolution x resolution grid
/// and passes when the minimum is >= -1e-8 (1 + max |Laplacian|).
SubharmonicityReport subharmonicity_audit(const Weight& w, double extent, int resolution);

/// Built-in weights: zero, modsq, modquartic, harmonic_re_z2, flat_example.
Weight catalog_weight(std::string_view name);
std::vector<std::string> catalog_names();

/// The profile behind flat_example: exp(-1/t^2) on (0, 1/2], zero for t <= 0,
/// and for t > 1/2 the C^2 continuation whose curvature relaxes as
/// g''(t) = g''(1/2) exp(-(t - 1/2)), which keeps g convex and increasing.
double flat_profile(double t, int order);

}  // namespace boxheat

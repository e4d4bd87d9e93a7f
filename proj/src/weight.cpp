#include "boxheat/weight.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "boxheat/error.hpp"

namespace boxheat {
namespace {

double falling_factorial(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(n - i);
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return falling_factorial(n, k) / falling_factorial(k, k);
}

double factorial(int n) { return falling_factorial(n, n); }

cplx ipow(cplx z, int n) {
  cplx r{1.0, 0.0};
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// PolynomialWeight

PolynomialWeight::PolynomialWeight(std::map<Bidegree, cplx> coeffs, double symmetry_tol) {
  for (const auto& [deg, c] : coeffs) {
    if (deg.j < 0 || deg.k < 0) {
      throw ValidationError(fmt::format("polynomial weight: negative bidegree ({}, {})", deg.j, deg.k));
    }
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw ValidationError(fmt::format("polynomial weight: non-finite c_{}{}", deg.j, deg.k));
    }
    if (c != cplx{}) coeffs_.emplace(deg, c);
  }
  for (const auto& [deg, c] : coeffs_) {
    auto it = coeffs_.find(Bidegree{deg.k, deg.j});
    const cplx mirror = it == coeffs_.end() ? cplx{} : it->second;
    if (std::abs(c - std::conj(mirror)) > symmetry_tol * (1.0 + std::abs(c))) {
      throw ValidationError(fmt::format(
          "polynomial weight is not real: c_{}{} = ({}, {}) but c_{}{} = ({}, {})", deg.j, deg.k,
          c.real(), c.imag(), deg.k, deg.j, mirror.real(), mirror.imag()));
    }
    degree_ = std::max(degree_, deg.j + deg.k);
  }
}

double PolynomialWeight::value(cplx z) const {
  cplx s{};
  const cplx zb = std::conj(z);
  for (const auto& [deg, c] : coeffs_) s += c * ipow(z, deg.j) * ipow(zb, deg.k);
  return s.real();
}

cplx PolynomialWeight::derivative(cplx z, int dz, int dzbar) const {
  cplx s{};
  const cplx zb = std::conj(z);
  for (const auto& [deg, c] : coeffs_) {
    if (deg.j < dz || deg.k < dzbar) continue;
    s += c * falling_factorial(deg.j, dz) * falling_factorial(deg.k, dzbar) *
         ipow(z, deg.j - dz) * ipow(zb, deg.k - dzbar);
  }
  return s;
}

bool PolynomialWeight::is_harmonic() const {
  return std::none_of(coeffs_.begin(), coeffs_.end(),
                      [](const auto& e) { return e.first.j >= 1 && e.first.k >= 1; });
}

// ---------------------------------------------------------------------------
// SmoothWeight

cplx finite_difference_wirtinger(const std::function<double(cplx)>& f, cplx z, int j, int k,
                                 double h) {
  const int n = j + k;
  if (n == 0) return f(z);
  // (dx - i dy)^j (dx + i dy)^k / 2^n, stored by power of dx.
  std::vector<cplx> poly{1.0};
  auto multiply = [&poly](cplx y_coeff) {
    std::vector<cplx> next(poly.size() + 1, cplx{});
    for (std::size_t p = 0; p < poly.size(); ++p) {
      next[p + 1] += poly[p];
      next[p] += poly[p] * y_coeff;
    }
    poly = std::move(next);
  };
  for (int i = 0; i < j; ++i) multiply(cplx{0.0, -1.0});
  for (int i = 0; i < k; ++i) multiply(cplx{0.0, 1.0});

  cplx sum{};
  for (int p = 0; p <= n; ++p) {
    if (poly[static_cast<std::size_t>(p)] == cplx{}) continue;
    const int q = n - p;
    double d = 0.0;
    for (int a = 0; a <= p; ++a) {
      for (int b = 0; b <= q; ++b) {
        const double w = binomial(p, a) * binomial(q, b) * (((a + b) % 2) ? -1.0 : 1.0);
        d += w * f(z + cplx{(p - 2 * a) * h, (q - 2 * b) * h});
      }
    }
    sum += poly[static_cast<std::size_t>(p)] * d / std::pow(2.0 * h, n);
  }
  return sum / std::pow(2.0, n);
}

SmoothWeight::SmoothWeight(std::function<double(cplx)> eval, WirtingerJet jet, double fd_step)
    : eval_(std::move(eval)), jet_(std::move(jet)), fd_step_(fd_step) {
  if (!eval_) throw ValidationError("smooth weight: missing evaluator");
  if (!(fd_step_ > 0.0)) throw ValidationError("smooth weight: finite-difference step must be > 0");
}

cplx SmoothWeight::derivative(cplx z, int dz, int dzbar) const {
  if (jet_) return jet_(z, dz, dzbar);
  return finite_difference_wirtinger(eval_, z, dz, dzbar, fd_step_);
}

SmoothWeight radial_weight(RadialProfile profile) {
  auto eval = [profile](cplx z) { return profile(std::norm(z), 0); };
  // dzbar^k g(z zbar) = z^k g^{(k)}, then Leibniz in dz.
  auto jet = [profile](cplx z, int j, int k) {
    const double t = std::norm(z);
    const cplx zb = std::conj(z);
    cplx s{};
    for (int i = 0; i <= std::min(j, k); ++i) {
      const double g = profile(t, j + k - i);
      if (g == 0.0) continue;
      s += binomial(j, i) * falling_factorial(k, i) * ipow(z, k - i) * ipow(zb, j - i) * g;
    }
    return s;
  };
  return SmoothWeight(std::move(eval), std::move(jet));
}

// ---------------------------------------------------------------------------
// Weight

Weight::Weight(std::string name, PolynomialWeight poly) : name_(std::move(name)), impl_(std::move(poly)) {}
Weight::Weight(std::string name, SmoothWeight smooth)
    : name_(std::move(name)), impl_(std::move(smooth)) {}

double Weight::value(cplx z) const {
  return std::visit([z](const auto& w) { return w.value(z); }, impl_);
}

cplx Weight::derivative(cplx z, int dz, int dzbar) const {
  return std::visit([&](const auto& w) { return w.derivative(z, dz, dzbar); }, impl_);
}

int Weight::default_taylor_order() const {
  if (const auto* p = polynomial()) return std::max(1, p->degree());
  return SmoothWeight::kMaxTaylorOrder;
}

// ---------------------------------------------------------------------------
// Taylor coefficients, mu, delta

TaylorTable taylor_table(const Weight& w, cplx z, int order) {
  if (order < 1) throw ValidationError(fmt::format("taylor_table: order must be >= 1, got {}", order));
  if (w.smooth() && order > SmoothWeight::kMaxTaylorOrder) {
    throw ValidationError(fmt::format("taylor_table: smooth weights support order <= {}, got {}",
                                      SmoothWeight::kMaxTaylorOrder, order));
  }
  TaylorTable table{z, order, std::vector<cplx>(static_cast<std::size_t>(order * order))};
  const auto idx = [order](int j, int k) { return static_cast<std::size_t>((j - 1) * order + (k - 1)); };

  if (const auto* poly = w.polynomial()) {
    const cplx zb = std::conj(z);
    for (const auto& [deg, c] : poly->coeffs()) {
      for (int j = 1; j <= std::min(order, deg.j); ++j) {
        for (int k = 1; k <= std::min(order, deg.k); ++k) {
          table.entries[idx(j, k)] +=
              c * binomial(deg.j, j) * binomial(deg.k, k) * ipow(z, deg.j - j) * ipow(zb, deg.k - k);
        }
      }
    }
  } else {
    for (int j = 1; j <= order; ++j) {
      for (int k = 1; k <= order; ++k) {
        table.entries[idx(j, k)] = w.derivative(z, j, k) / (factorial(j) * factorial(k));
      }
    }
  }

  double scale = 0.0;
  for (const cplx& a : table.entries) scale = std::max(scale, std::abs(a));
  const double tol = w.polynomial() ? 1e-10 * (1.0 + scale) : 1e-6 * (1.0 + scale);
  for (int j = 1; j <= order; ++j) {
    for (int k = j; k <= order; ++k) {
      if (std::abs(table.entries[idx(j, k)] - std::conj(table.entries[idx(k, j)])) > tol) {
        throw ValidationError(fmt::format(
            "taylor_table: weight '{}' is not real at ({}, {}): a_{}{} != conj(a_{}{})", w.name(),
            z.real(), z.imag(), j, k, k, j));
      }
    }
  }
  return table;
}

double mu(const Weight& w, cplx z, double r, int order) {
  if (!(r > 0.0)) throw ValidationError("mu: r must be > 0");
  const TaylorTable t = taylor_table(w, z, order > 0 ? order : w.default_taylor_order());
  double best = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= t.order; ++j) {
    for (int k = 1; k <= t.order; ++k) {
      const double a = std::abs(t.at(j, k));
      if (a == 0.0) continue;
      best = std::min(best, std::pow(r / a, 1.0 / (j + k)));
    }
  }
  return best;
}

double inverse_mu_squared(const Weight& w, cplx z, int order) {
  const double m = mu(w, z, 1.0, order);
  return std::isinf(m) ? 0.0 : 1.0 / (m * m);
}

std::string_view to_string(DeltaClass c) {
  return c == DeltaClass::delta_positive ? "delta_positive" : "delta_zero";
}

namespace {

struct Candidate {
  double value;
  cplx z;
  bool better_than(const Candidate& o) const {
    if (value != o.value) return value < o.value;
    return std::abs(z) < std::abs(o.z);
  }
};

Candidate scan(const Weight& w, cplx center, double half_width, int resolution, Candidate best) {
  const double step = 2.0 * half_width / (resolution - 1);
  for (int b = 0; b < resolution; ++b) {
    for (int a = 0; a < resolution; ++a) {
      const cplx z = center + cplx{-half_width + a * step, -half_width + b * step};
      const Candidate c{inverse_mu_squared(w, z), z};
      if (c.better_than(best)) best = c;
    }
  }
  return best;
}

std::optional<double> top_coefficient_bound(const PolynomialWeight& p) {
  // a_jk is constant in z exactly when no other coefficient dominates (j, k).
  std::optional<double> bound;
  for (const auto& [deg, c] : p.coeffs()) {
    if (deg.j < 1 || deg.k < 1) continue;
    const bool constant = std::none_of(p.coeffs().begin(), p.coeffs().end(), [&](const auto& e) {
      return e.first != deg && e.first.j >= deg.j && e.first.k >= deg.k;
    });
    if (!constant) continue;
    const double b = std::pow(std::abs(c), 2.0 / (deg.j + deg.k));
    bound = bound ? std::max(*bound, b) : b;
  }
  return bound;
}

}  // namespace

DeltaReport delta(const Weight& w, double extent, int resolution, int refine_rounds) {
  if (!(extent > 0.0)) throw ValidationError("delta: empty search domain (extent must be > 0)");
  if (resolution < 2) throw ValidationError("delta: resolution must be >= 2");
  if (refine_rounds < 0) throw ValidationError("delta: refine_rounds must be >= 0");

  Candidate best{std::numeric_limits<double>::infinity(), cplx{}};
  best = scan(w, cplx{}, extent, resolution, best);
  double cell = 2.0 * extent / (resolution - 1);
  for (int round = 0; round < refine_rounds; ++round) {
    best = scan(w, best.z, cell, resolution, best);
    cell = 2.0 * cell / (resolution - 1);
  }

  DeltaReport report;
  report.delta = best.value;
  report.argmin = best.z;
  report.mu_at_argmin = mu(w, best.z, 1.0);
  report.extent = extent;
  report.resolution = resolution;
  report.refine_rounds = refine_rounds;
  report.final_cell = cell;
  report.classification =
      report.delta > kDeltaZeroThreshold ? DeltaClass::delta_positive : DeltaClass::delta_zero;
  if (const auto* p = w.polynomial()) report.polynomial_lower_bound = top_coefficient_bound(*p);
  return report;
}

SubharmonicityReport subharmonicity_audit(const Weight& w, double extent, int resolution) {
  if (resolution < 2) throw ValidationError("subharmonicity_audit: resolution must be >= 2");
  SubharmonicityReport r;
  r.min_laplacian = std::numeric_limits<double>::infinity();
  const double step = 2.0 * extent / (resolution - 1);
  for (int b = 0; b < resolution; ++b) {
    for (int a = 0; a < resolution; ++a) {
      const cplx z{-extent + a * step, -extent + b * step};
      const double lap = w.laplacian(z);
      r.max_abs_laplacian = std::max(r.max_abs_laplacian, std::abs(lap));
      if (lap < r.min_laplacian) {
        r.min_laplacian = lap;
        r.argmin = z;
      }
    }
  }
  r.tolerance = 1e-8 * (1.0 + r.max_abs_laplacian);
  r.pass = std::isfinite(r.min_laplacian) && r.min_laplacian >= -r.tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

// h^{(n)}(t) = P_n(1/t) exp(-1/t^2) with P_{n+1}(s) = -s^2 P_n'(s) + 2 s^3 P_n(s).
const std::vector<std::vector<double>>& flat_polynomials() {
  static const std::vector<std::vector<double>> table = [] {
    constexpr int kMaxOrder = 10;
    std::vector<std::vector<double>> p{{1.0}};
    for (int n = 0; n < kMaxOrder; ++n) {
      const auto& cur = p.back();
      std::vector<double> next(cur.size() + 3, 0.0);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (i >= 1) next[i + 1] -= static_cast<double>(i) * cur[i];
        next[i + 3] += 2.0 * cur[i];
      }
      p.push_back(std::move(next));
    }
    return p;
  }();
  return table;
}

double flat_core(double t, int order) {
  if (t <= 0.0) return 0.0;
  const double s = 1.0 / t;
  if (s * s > 700.0) return 0.0;
  const auto& poly = flat_polynomials().at(static_cast<std::size_t>(order));
  double acc = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * s + *it;
  return acc * std::exp(-s * s);
}

}  // namespace

double flat_profile(double t, int order) {
  if (order < 0) throw ValidationError("flat_profile: negative derivative order");
  if (order >= static_cast<int>(flat_polynomials().size())) {
    throw ValidationError("flat_profile: derivative order too high");
  }
  constexpr double kJoin = 0.5;
  constexpr double kRelax = 1.0;
  if (t <= kJoin) return flat_core(t, order);
  const double h0 = flat_core(kJoin, 0);
  const double h1 = flat_core(kJoin, 1);
  const double h2 = flat_core(kJoin, 2);
  const double tau = t - kJoin;
  const double e = std::exp(-kRelax * tau);
  switch (order) {
    case 0:
      return h0 + (h1 + h2 / kRelax) * tau - h2 / (kRelax * kRelax) * (1.0 - e);
    case 1:
      return h1 + h2 / kRelax * (1.0 - e);
    default:
      return h2 * std::pow(-kRelax, order - 2) * e;
  }
}

Weight catalog_weight(std::string_view name) {
  using C = std::map<Bidegree, cplx>;
  if (name == "zero") return Weight("zero", PolynomialWeight(C{}));
  if (name == "modsq") return Weight("modsq", PolynomialWeight(C{{{1, 1}, 1.0}}));
  if (name == "modquartic") return Weight("modquartic", PolynomialWeight(C{{{2, 2}, 1.0}}));
  if (name == "harmonic_re_z2") {
    // Re(z^2) = (z^2 + zbar^2) / 2
    return Weight("harmonic_re_z2", PolynomialWeight(C{{{2, 0}, 0.5}, {{0, 2}, 0.5}}));
  }
  if (name == "neg_modsq") return Weight("neg_modsq", PolynomialWeight(C{{{1, 1}, -1.0}}));
  if (name == "flat_example") return Weight("flat_example", radial_weight(flat_profile));
  throw ValidationError(fmt::format("unknown catalog weight '{}'", name));
}

std::vector<std::string> catalog_names() {
  return {"zero", "modsq", "modquartic", "harmonic_re_z2", "neg_modsq", "flat_example"};
}

}  // namespace boxheat

#include "boxheat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "boxheat/error.hpp"

namespace boxheat {

GridSpec::GridSpec(double extent, int points) : extent_(extent), points_(points) {
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw ValidationError(fmt::format("grid: extent must be a positive finite number, got {}", extent));
  }
  if (points < 3) throw ValidationError(fmt::format("grid: need at least 3 points per axis, got {}", points));
  spacing_ = 2.0 * extent / (points - 1);
}

Eigen::Index GridSpec::nearest(cplx z) const {
  auto snap = [this](double x) {
    const long i = std::lround((x + extent_) / spacing_);
    return static_cast<int>(std::clamp<long>(i, 0, points_ - 1));
  };
  return index(snap(z.real()), snap(z.imag()));
}

int GridSpec::ring(Eigen::Index flat) const {
  const int a = static_cast<int>(flat % points_);
  const int b = static_cast<int>(flat / points_);
  return std::min({a, b, points_ - 1 - a, points_ - 1 - b});
}

ComplexField::ComplexField(const GridSpec& spec) : spec_(spec), values_(VectorXc::Zero(spec.size())) {}

ComplexField::ComplexField(const GridSpec& spec, VectorXc values) : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.size()) {
    throw ValidationError(fmt::format("field: {} values for a grid of {} nodes", values_.size(), spec_.size()));
  }
}

void require_same_grid(const ComplexField& a, const ComplexField& b, const char* what) {
  if (!(a.spec() == b.spec())) {
    throw ValidationError(fmt::format("{}: fields live on different grids (L={}, n={} vs L={}, n={})", what,
                                      a.spec().extent(), a.spec().points(), b.spec().extent(),
                                      b.spec().points()));
  }
}

ComplexField& ComplexField::operator+=(const ComplexField& o) {
  require_same_grid(*this, o, "field +");
  values_ += o.values_;
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& o) {
  require_same_grid(*this, o, "field -");
  values_ -= o.values_;
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  values_ *= s;
  return *this;
}

void ComplexField::require_finite(const char* what) const {
  if (!values_.allFinite()) throw ValidationError(fmt::format("{}: field has non-finite entries", what));
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cplx s, ComplexField a) { return a *= s; }

ComplexField hadamard(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b, "hadamard");
  return ComplexField(a.spec(), a.values().cwiseProduct(b.values()));
}

ComplexField sample(const GridSpec& spec, const std::function<cplx(cplx)>& f) {
  ComplexField u(spec);
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    const cplx v = f(spec.node(i));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      const cplx z = spec.node(i);
      throw ValidationError(fmt::format("sample: non-finite value at ({}, {})", z.real(), z.imag()));
    }
    u[i] = v;
  }
  return u;
}

namespace {

// Second-order first derivative along one axis; stride selects x (1) or y (n).
cplx axis_derivative(const VectorXc& v, Eigen::Index i, int pos, int n, Eigen::Index stride, double h) {
  if (pos == 0) return (-3.0 * v[i] + 4.0 * v[i + stride] - v[i + 2 * stride]) / (2.0 * h);
  if (pos == n - 1) return (3.0 * v[i] - 4.0 * v[i - stride] + v[i - 2 * stride]) / (2.0 * h);
  return (v[i + stride] - v[i - stride]) / (2.0 * h);
}

ComplexField wirtinger(const ComplexField& u, double sign) {
  const GridSpec& g = u.spec();
  const int n = g.points();
  const double h = g.spacing();
  const cplx iy{0.0, sign};
  ComplexField out(g);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const Eigen::Index i = g.index(a, b);
      const cplx dx = axis_derivative(u.values(), i, a, n, 1, h);
      const cplx dy = axis_derivative(u.values(), i, b, n, n, h);
      out[i] = 0.5 * (dx + iy * dy);
    }
  }
  return out;
}

}  // namespace

ComplexField d_z(const ComplexField& u) { return wirtinger(u, -1.0); }
ComplexField d_zbar(const ComplexField& u) { return wirtinger(u, 1.0); }

double lp_norm(const ComplexField& u, double p) {
  if (std::isinf(p) && p > 0) return u.values().size() == 0 ? 0.0 : u.values().cwiseAbs().maxCoeff();
  if (!(p >= 1.0)) throw ValidationError(fmt::format("lp_norm: p must be >= 1, got {}", p));
  const double h2 = u.spec().spacing() * u.spec().spacing();
  double s = 0.0;
  if (p == 2.0) {
    s = u.values().squaredNorm();
  } else {
    for (Eigen::Index i = 0; i < u.values().size(); ++i) s += std::pow(std::abs(u[i]), p);
  }
  return std::pow(s * h2, 1.0 / p);
}

cplx inner(const ComplexField& u, const ComplexField& v) {
  require_same_grid(u, v, "inner");
  const double h2 = u.spec().spacing() * u.spec().spacing();
  // Eigen's dot conjugates the first argument.
  return v.values().dot(u.values()) * h2;
}

double boundary_mass(const ComplexField& u) {
  const GridSpec& g = u.spec();
  const int n = g.points();
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    m = std::max({m, std::abs(u.at(i, 0)), std::abs(u.at(i, n - 1)), std::abs(u.at(0, i)),
                  std::abs(u.at(n - 1, i))});
  }
  return m;
}

void write_field_csv(std::ostream& out, const ComplexField& u) {
  out << "x,y,re,im\n";
  for (Eigen::Index i = 0; i < u.spec().size(); ++i) {
    const cplx z = u.spec().node(i);
    out << fmt::format("{:.10g},{:.10g},{:.17g},{:.17g}\n", z.real(), z.imag(), u[i].real(), u[i].imag());
  }
}

}  // namespace boxheat

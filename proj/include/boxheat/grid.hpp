#pragma once

// Uniform square truncation [-L, L]^2 of the complex plane and complex fields
// sampled on it. Node (a, b) sits at (-L + a h) + i (-L + b h) and is stored
// at flat index b * n + a. Fields are taken to vanish outside the square.

#include <functional>
#include <iosfwd>
#include <limits>

#include "boxheat/types.hpp"

namespace boxheat {

class GridSpec {
 public:
  /// Throws ValidationError unless extent > 0 and points >= 3.
  GridSpec(double extent, int points);

  double extent() const { return extent_; }
  int points() const { return points_; }
  double spacing() const { return spacing_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(points_) * points_; }

  Eigen::Index index(int a, int b) const { return static_cast<Eigen::Index>(b) * points_ + a; }
  cplx node(int a, int b) const { return {-extent_ + a * spacing_, -extent_ + b * spacing_}; }
  cplx node(Eigen::Index flat) const {
    return node(static_cast<int>(flat % points_), static_cast<int>(flat / points_));
  }
  /// Flat index of the node nearest to z (clamped into the grid).
  Eigen::Index nearest(cplx z) const;
  /// Distance (in nodes) from the flat index to the outermost ring.
  int ring(Eigen::Index flat) const;

  bool operator==(const GridSpec& o) const { return extent_ == o.extent_ && points_ == o.points_; }

 private:
  double extent_;
  int points_;
  double spacing_;
};

class ComplexField {
 public:
  explicit ComplexField(const GridSpec& spec);  // zero field
  ComplexField(const GridSpec& spec, VectorXc values);

  const GridSpec& spec() const { return spec_; }
  const VectorXc& values() const { return values_; }
  VectorXc& values() { return values_; }
  cplx operator[](Eigen::Index i) const { return values_[i]; }
  cplx& operator[](Eigen::Index i) { return values_[i]; }
  cplx at(int a, int b) const { return values_[spec_.index(a, b)]; }

  ComplexField& operator+=(const ComplexField& o);
  ComplexField& operator-=(const ComplexField& o);
  ComplexField& operator*=(cplx s);

  /// Throws ValidationError on NaN or infinite entries.
  void require_finite(const char* what) const;

 private:
  GridSpec spec_;
  VectorXc values_;
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx s, ComplexField a);
/// Nodewise product.
ComplexField hadamard(const ComplexField& a, const ComplexField& b);

/// Throws ValidationError when the specs differ.
void require_same_grid(const ComplexField& a, const ComplexField& b, const char* what);

/// Pointwise evaluation of f at the nodes; throws on non-finite samples.
ComplexField sample(const GridSpec& spec, const std::function<cplx(cplx)>& f);

/// Wirtinger derivatives (dx -/+ i dy)/2 with second-order central differences
/// inside and second-order one-sided differences on the outer ring.
ComplexField d_z(const ComplexField& u);
ComplexField d_zbar(const ComplexField& u);

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// (sum |u|^p h^2)^{1/p}, or max |u| for p = infinity. Throws for p < 1.
double lp_norm(const ComplexField& u, double p);

/// sum u conj(v) h^2
cplx inner(const ComplexField& u, const ComplexField& v);

/// max |u| over the outermost ring of nodes.
double boundary_mass(const ComplexField& u);

/// CSV with header x,y,re,im.
void write_field_csv(std::ostream& out, const ComplexField& u);

}  // namespace boxheat

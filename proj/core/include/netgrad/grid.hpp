#pragma once

// Structured node-centered grids in one and two dimensions, the nodal field
// types that live on them, and the discrete differential operators.
//
// Node k of a 2D grid sits at (i, j) with k = i + nx * j. Vector fields store
// d components per node, symmetric tensors d(d+1)/2 components per node in the
// order [xx] (1D) or [xx, xy, yy] (2D).

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "netgrad/error.hpp"

namespace netgrad {

class Domain {
 public:
  Domain() = default;

  static Domain line(int n, double length = 1.0, double origin = 0.0);
  static Domain rect(int nx, int ny, double lx = 1.0, double ly = 1.0,
                     double ox = 0.0, double oy = 0.0);

  int dim() const noexcept { return dim_; }
  int nodes(int axis) const noexcept { return nodes_[axis]; }
  double length(int axis) const noexcept { return lengths_[axis]; }
  double origin(int axis) const noexcept { return origin_[axis]; }
  double spacing(int axis) const noexcept { return spacing_[axis]; }

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nodes_[0]) * static_cast<std::size_t>(nodes_[1]);
  }
  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nodes_[0]) * static_cast<std::size_t>(j);
  }
  std::array<int, 2> ij(std::size_t k) const noexcept {
    return {static_cast<int>(k % nodes_[0]), static_cast<int>(k / nodes_[0])};
  }
  double coord(std::size_t k, int axis) const noexcept {
    return origin_[axis] + spacing_[axis] * ij(k)[axis];
  }
  bool on_boundary(std::size_t k) const noexcept;

  /// Trapezoidal quadrature weight of node k.
  double weight(std::size_t k) const noexcept;
  /// Volume of one grid cell (h in 1D, hx*hy in 2D).
  double cell_volume() const noexcept { return dim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1]; }

  bool operator==(const Domain&) const = default;

 private:
  int dim_ = 0;
  std::array<int, 2> nodes_{0, 1};
  std::array<double, 2> lengths_{0.0, 0.0};
  std::array<double, 2> origin_{0.0, 0.0};
  std::array<double, 2> spacing_{0.0, 0.0};
};

/// Pointwise symmetric 2x2 (or 1x1 when yy/xy are unused) tensor.
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

inline double min_eigenvalue(const Sym2& a, int dim) {
  if (dim == 1) return a.xx;
  const double mean = 0.5 * (a.xx + a.yy);
  const double half_gap = std::hypot(0.5 * (a.xx - a.yy), a.xy);
  return mean - half_gap;
}

inline double frobenius_norm(const Sym2& a, int dim) {
  if (dim == 1) return std::abs(a.xx);
  return std::sqrt(a.xx * a.xx + 2.0 * a.xy * a.xy + a.yy * a.yy);
}

namespace detail {

void require_same_domain(const Domain& a, const Domain& b, const char* where);

template <class Derived>
class NodalField {
 public:
  const Domain& domain() const noexcept { return domain_; }
  std::size_t components() const noexcept { return ncomp_; }
  std::size_t node_count() const noexcept { return domain_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool all_finite() const noexcept {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  Derived& operator+=(const Derived& other) {
    require_same_domain(domain_, other.domain_, "operator+=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return self();
  }
  Derived& operator-=(const Derived& other) {
    require_same_domain(domain_, other.domain_, "operator-=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return self();
  }
  Derived& operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return self();
  }

  /// this += s * other
  Derived& axpy(double s, const Derived& other) {
    require_same_domain(domain_, other.domain_, "axpy");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
    return self();
  }

  friend Derived operator+(Derived a, const Derived& b) { return a += b; }
  friend Derived operator-(Derived a, const Derived& b) { return a -= b; }
  friend Derived operator*(double s, Derived a) { return a *= s; }
  friend Derived operator*(Derived a, double s) { return a *= s; }

 protected:
  NodalField() = default;
  NodalField(Domain d, std::size_t ncomp, double fill)
      : domain_(d), ncomp_(ncomp), values_(d.size() * ncomp, fill) {}
  NodalField(Domain d, std::size_t ncomp, std::vector<double> values)
      : domain_(d), ncomp_(ncomp), values_(std::move(values)) {
    if (values_.size() != domain_.size() * ncomp_) {
      throw InvalidArgument("field value count does not match the domain");
    }
  }

  Domain domain_;
  std::size_t ncomp_ = 0;
  std::vector<double> values_;

 private:
  Derived& self() noexcept { return static_cast<Derived&>(*this); }
};

}  // namespace detail

class ScalarField : public detail::NodalField<ScalarField> {
 public:
  ScalarField() = default;
  explicit ScalarField(const Domain& d, double fill = 0.0) : NodalField(d, 1, fill) {}
  ScalarField(const Domain& d, std::vector<double> values) : NodalField(d, 1, std::move(values)) {}

  /// Samples f(x, y) at every node (y = 0 in 1D).
  template <class F>
  static ScalarField sample(const Domain& d, F&& f) {
    ScalarField out(d);
    for (std::size_t k = 0; k < d.size(); ++k) {
      out.values_[k] = f(d.coord(k, 0), d.dim() == 2 ? d.coord(k, 1) : 0.0);
    }
    return out;
  }

  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  template <class F>
  ScalarField map(F&& f) const {
    ScalarField out(domain_);
    for (std::size_t k = 0; k < values_.size(); ++k) out.values_[k] = f(values_[k]);
    return out;
  }

  double min() const noexcept;
  double max() const noexcept;
};

class VectorField : public detail::NodalField<VectorField> {
 public:
  VectorField() = default;
  explicit VectorField(const Domain& d, double fill = 0.0)
      : NodalField(d, static_cast<std::size_t>(d.dim()), fill) {}
  VectorField(const Domain& d, std::vector<double> values)
      : NodalField(d, static_cast<std::size_t>(d.dim()), std::move(values)) {}

  double& operator()(std::size_t k, int c) noexcept { return values_[ncomp_ * k + c]; }
  double operator()(std::size_t k, int c) const noexcept { return values_[ncomp_ * k + c]; }

  std::array<double, 2> at(std::size_t k) const noexcept {
    return {values_[ncomp_ * k], ncomp_ == 2 ? values_[ncomp_ * k + 1] : 0.0};
  }
  void set(std::size_t k, std::array<double, 2> v) noexcept {
    values_[ncomp_ * k] = v[0];
    if (ncomp_ == 2) values_[ncomp_ * k + 1] = v[1];
  }

  /// Component c as a scalar field.
  ScalarField component(int c) const;
};

class SymTensorField : public detail::NodalField<SymTensorField> {
 public:
  SymTensorField() = default;
  explicit SymTensorField(const Domain& d, double fill = 0.0)
      : NodalField(d, d.dim() == 1 ? 1u : 3u, fill) {}
  SymTensorField(const Domain& d, std::vector<double> values)
      : NodalField(d, d.dim() == 1 ? 1u : 3u, std::move(values)) {}

  /// s * I at every node.
  static SymTensorField identity(const Domain& d, double s = 1.0);
  /// Pointwise r I + m (x) m.
  static SymTensorField from_ansatz(const ScalarField& r, const VectorField& m);

  Sym2 at(std::size_t k) const noexcept {
    if (ncomp_ == 1) return {values_[k], 0.0, 0.0};
    return {values_[3 * k], values_[3 * k + 1], values_[3 * k + 2]};
  }
  void set(std::size_t k, const Sym2& a) noexcept {
    if (ncomp_ == 1) {
      values_[k] = a.xx;
      return;
    }
    values_[3 * k] = a.xx;
    values_[3 * k + 1] = a.xy;
    values_[3 * k + 2] = a.yy;
  }

  /// Stored component c ([xx] or [xx, xy, yy]) as a scalar field.
  ScalarField component(int c) const;
  void set_component(int c, const ScalarField& f);

  /// Smallest eigenvalue over all nodes.
  double min_eigenvalue() const noexcept;
};

// ---------------------------------------------------------------------------
// Discrete operators

/// Central differences in the interior, second-order one-sided at the boundary.
VectorField gradient(const ScalarField& f);

/// Sum of per-component derivatives with the same stencils as gradient().
ScalarField divergence(const VectorField& v);

/// Trapezoidal quadrature.
double integrate(const ScalarField& f);

/// Pointwise D v.
VectorField tensor_apply(const SymTensorField& D, const VectorField& v);

/// Pointwise (a (x) b + b (x) a) / 2.
SymTensorField sym_outer(const VectorField& a, const VectorField& b);

/// Pointwise A : B = tr(A B^T).
ScalarField contract(const SymTensorField& A, const SymTensorField& B);

/// Pointwise a . b.
ScalarField dot(const VectorField& a, const VectorField& b);

/// Pointwise a . D b.
ScalarField quadratic_form(const VectorField& a, const SymTensorField& D, const VectorField& b);

/// Pointwise product.
ScalarField multiply(const ScalarField& a, const ScalarField& b);
VectorField multiply(const ScalarField& s, const VectorField& v);
SymTensorField multiply(const ScalarField& s, const SymTensorField& D);

/// L2 pairing of tensor fields: integral of A : B.
double inner(const SymTensorField& A, const SymTensorField& B);
/// L2 pairing of vector fields: integral of a . b.
double inner(const VectorField& a, const VectorField& b);

// ---------------------------------------------------------------------------
// CSV output: header row of coordinate and component names, one row per node.

void write_csv(std::ostream& os, const ScalarField& f, const std::string& name = "value");
void write_csv(std::ostream& os, const VectorField& v, const std::string& name = "v");
void write_csv(std::ostream& os, const SymTensorField& D, const std::string& name = "D");

}  // namespace netgrad

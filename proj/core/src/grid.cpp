#include "netgrad/grid.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <ostream>

namespace netgrad {

namespace {

void check_axis(int n, double length) {
  if (n < 3) throw InvalidArgument("a grid axis needs at least 3 nodes");
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("grid length must be positive");
}

// d f / d axis at node k, given the per-node values and a stride along the axis.
double axis_derivative(std::span<const double> f, std::size_t stride, std::size_t k, int pos, int n,
                       double h) {
  if (pos == 0) {
    return (-3.0 * f[k] + 4.0 * f[k + stride] - f[k + 2 * stride]) / (2.0 * h);
  }
  if (pos == n - 1) {
    return (3.0 * f[k] - 4.0 * f[k - stride] + f[k - 2 * stride]) / (2.0 * h);
  }
  return (f[k + stride] - f[k - stride]) / (2.0 * h);
}

void write_coords(std::ostream& os, const Domain& d, std::size_t k) {
  os << d.coord(k, 0);
  if (d.dim() == 2) os << ',' << d.coord(k, 1);
}

void write_coord_header(std::ostream& os, const Domain& d) {
  os << 'x';
  if (d.dim() == 2) os << ",y";
}

}  // namespace

Domain Domain::line(int n, double length, double origin) {
  check_axis(n, length);
  Domain d;
  d.dim_ = 1;
  d.nodes_ = {n, 1};
  d.lengths_ = {length, 0.0};
  d.origin_ = {origin, 0.0};
  d.spacing_ = {length / (n - 1), 0.0};
  return d;
}

Domain Domain::rect(int nx, int ny, double lx, double ly, double ox, double oy) {
  check_axis(nx, lx);
  check_axis(ny, ly);
  Domain d;
  d.dim_ = 2;
  d.nodes_ = {nx, ny};
  d.lengths_ = {lx, ly};
  d.origin_ = {ox, oy};
  d.spacing_ = {lx / (nx - 1), ly / (ny - 1)};
  return d;
}

bool Domain::on_boundary(std::size_t k) const noexcept {
  const auto [i, j] = ij(k);
  if (i == 0 || i == nodes_[0] - 1) return true;
  return dim_ == 2 && (j == 0 || j == nodes_[1] - 1);
}

double Domain::weight(std::size_t k) const noexcept {
  const auto [i, j] = ij(k);
  double w = spacing_[0];
  if (i == 0 || i == nodes_[0] - 1) w *= 0.5;
  if (dim_ == 2) {
    w *= spacing_[1];
    if (j == 0 || j == nodes_[1] - 1) w *= 0.5;
  }
  return w;
}

namespace detail {

void require_same_domain(const Domain& a, const Domain& b, const char* where) {
  if (!(a == b)) throw InvalidArgument(std::string(where) + ": fields live on different domains");
}

}  // namespace detail

double ScalarField::min() const noexcept {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max() const noexcept {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

ScalarField VectorField::component(int c) const {
  ScalarField out(domain_);
  for (std::size_t k = 0; k < domain_.size(); ++k) out[k] = (*this)(k, c);
  return out;
}

SymTensorField SymTensorField::identity(const Domain& d, double s) {
  SymTensorField out(d);
  for (std::size_t k = 0; k < d.size(); ++k) out.set(k, {s, 0.0, s});
  return out;
}

SymTensorField SymTensorField::from_ansatz(const ScalarField& r, const VectorField& m) {
  detail::require_same_domain(r.domain(), m.domain(), "from_ansatz");
  SymTensorField out(r.domain());
  for (std::size_t k = 0; k < r.node_count(); ++k) {
    const auto v = m.at(k);
    out.set(k, {r[k] + v[0] * v[0], v[0] * v[1], r[k] + v[1] * v[1]});
  }
  return out;
}

ScalarField SymTensorField::component(int c) const {
  ScalarField out(domain_);
  for (std::size_t k = 0; k < domain_.size(); ++k) out[k] = values_[ncomp_ * k + c];
  return out;
}

void SymTensorField::set_component(int c, const ScalarField& f) {
  detail::require_same_domain(domain_, f.domain(), "set_component");
  for (std::size_t k = 0; k < domain_.size(); ++k) values_[ncomp_ * k + c] = f[k];
}

double SymTensorField::min_eigenvalue() const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < domain_.size(); ++k) {
    m = std::min(m, netgrad::min_eigenvalue(at(k), domain_.dim()));
  }
  return m;
}

VectorField gradient(const ScalarField& f) {
  const Domain& d = f.domain();
  VectorField g(d);
  const auto vals = f.values();
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto [i, j] = d.ij(k);
    g(k, 0) = axis_derivative(vals, 1, k, i, d.nodes(0), d.spacing(0));
    if (d.dim() == 2) {
      g(k, 1) = axis_derivative(vals, static_cast<std::size_t>(d.nodes(0)), k, j, d.nodes(1), d.spacing(1));
    }
  }
  return g;
}

ScalarField divergence(const VectorField& v) {
  const Domain& d = v.domain();
  ScalarField out(d);
  for (int c = 0; c < d.dim(); ++c) {
    const ScalarField comp = v.component(c);
    const auto vals = comp.values();
    const std::size_t stride = c == 0 ? 1 : static_cast<std::size_t>(d.nodes(0));
    for (std::size_t k = 0; k < d.size(); ++k) {
      out[k] += axis_derivative(vals, stride, k, d.ij(k)[c], d.nodes(c), d.spacing(c));
    }
  }
  return out;
}

double integrate(const ScalarField& f) {
  const Domain& d = f.domain();
  double sum = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) sum += d.weight(k) * f[k];
  return sum;
}

VectorField tensor_apply(const SymTensorField& D, const VectorField& v) {
  detail::require_same_domain(D.domain(), v.domain(), "tensor_apply");
  const Domain& d = D.domain();
  VectorField out(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Sym2 a = D.at(k);
    const auto x = v.at(k);
    if (d.dim() == 1) {
      out(k, 0) = a.xx * x[0];
    } else {
      out.set(k, {a.xx * x[0] + a.xy * x[1], a.xy * x[0] + a.yy * x[1]});
    }
  }
  return out;
}

SymTensorField sym_outer(const VectorField& a, const VectorField& b) {
  detail::require_same_domain(a.domain(), b.domain(), "sym_outer");
  SymTensorField out(a.domain());
  for (std::size_t k = 0; k < a.node_count(); ++k) {
    const auto x = a.at(k);
    const auto y = b.at(k);
    out.set(k, {x[0] * y[0], 0.5 * (x[0] * y[1] + x[1] * y[0]), x[1] * y[1]});
  }
  return out;
}

ScalarField contract(const SymTensorField& A, const SymTensorField& B) {
  detail::require_same_domain(A.domain(), B.domain(), "contract");
  ScalarField out(A.domain());
  for (std::size_t k = 0; k < A.node_count(); ++k) {
    const Sym2 a = A.at(k);
    const Sym2 b = B.at(k);
    out[k] = A.domain().dim() == 1 ? a.xx * b.xx : a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy;
  }
  return out;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
  detail::require_same_domain(a.domain(), b.domain(), "dot");
  ScalarField out(a.domain());
  for (std::size_t k = 0; k < a.node_count(); ++k) {
    const auto x = a.at(k);
    const auto y = b.at(k);
    out[k] = x[0] * y[0] + x[1] * y[1];
  }
  return out;
}

ScalarField quadratic_form(const VectorField& a, const SymTensorField& D, const VectorField& b) {
  return dot(a, tensor_apply(D, b));
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  detail::require_same_domain(a.domain(), b.domain(), "multiply");
  ScalarField out(a.domain());
  for (std::size_t k = 0; k < a.node_count(); ++k) out[k] = a[k] * b[k];
  return out;
}

VectorField multiply(const ScalarField& s, const VectorField& v) {
  detail::require_same_domain(s.domain(), v.domain(), "multiply");
  VectorField out = v;
  for (std::size_t k = 0; k < s.node_count(); ++k) {
    for (int c = 0; c < s.domain().dim(); ++c) out(k, c) *= s[k];
  }
  return out;
}

SymTensorField multiply(const ScalarField& s, const SymTensorField& D) {
  detail::require_same_domain(s.domain(), D.domain(), "multiply");
  SymTensorField out = D;
  auto vals = out.values();
  const std::size_t nc = D.components();
  for (std::size_t k = 0; k < s.node_count(); ++k) {
    for (std::size_t c = 0; c < nc; ++c) vals[nc * k + c] *= s[k];
  }
  return out;
}

double inner(const SymTensorField& A, const SymTensorField& B) { return integrate(contract(A, B)); }

double inner(const VectorField& a, const VectorField& b) { return integrate(dot(a, b)); }

void write_csv(std::ostream& os, const ScalarField& f, const std::string& name) {
  const Domain& d = f.domain();
  os << std::setprecision(17);
  write_coord_header(os, d);
  os << ',' << name << '\n';
  for (std::size_t k = 0; k < d.size(); ++k) {
    write_coords(os, d, k);
    os << ',' << f[k] << '\n';
  }
}

void write_csv(std::ostream& os, const VectorField& v, const std::string& name) {
  const Domain& d = v.domain();
  os << std::setprecision(17);
  write_coord_header(os, d);
  os << ',' << name << "_x";
  if (d.dim() == 2) os << ',' << name << "_y";
  os << '\n';
  for (std::size_t k = 0; k < d.size(); ++k) {
    write_coords(os, d, k);
    for (int c = 0; c < d.dim(); ++c) os << ',' << v(k, c);
    os << '\n';
  }
}

void write_csv(std::ostream& os, const SymTensorField& D, const std::string& name) {
  const Domain& dom = D.domain();
  os << std::setprecision(17);
  write_coord_header(os, dom);
  if (dom.dim() == 1) {
    os << ',' << name << "_xx\n";
  } else {
    os << ',' << name << "_xx," << name << "_xy," << name << "_yy\n";
  }
  for (std::size_t k = 0; k < dom.size(); ++k) {
    write_coords(os, dom, k);
    const Sym2 a = D.at(k);
    os << ',' << a.xx;
    if (dom.dim() == 2) os << ',' << a.xy << ',' << a.yy;
    os << '\n';
  }
}

}  // namespace netgrad

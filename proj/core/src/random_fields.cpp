#include "netgrad/random_fields.hpp"

#include <numbers>
#include <vector>

namespace netgrad {

ScalarField random_smooth_scalar(const Domain& d, Rng& rng, int modes) {
  if (modes < 1) throw InvalidArgument("random_smooth_scalar: modes must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  const int qmax = d.dim() == 2 ? modes : 1;
  std::vector<double> a(static_cast<std::size_t>(modes * qmax));
  for (int p = 0; p < modes; ++p) {
    for (int q = 0; q < qmax; ++q) a[p * qmax + q] = normal(rng) / (1.0 + p + q);
  }
  const double kx = std::numbers::pi / d.length(0);
  const double ky = d.dim() == 2 ? std::numbers::pi / d.length(1) : 0.0;
  const double ox = d.origin(0);
  const double oy = d.origin(1);
  return ScalarField::sample(d, [&](double x, double y) {
    double s = 0.0;
    for (int p = 0; p < modes; ++p) {
      for (int q = 0; q < qmax; ++q) s += a[p * qmax + q] * std::cos(p * kx * (x - ox)) * std::cos(q * ky * (y - oy));
    }
    return s;
  });
}

VectorField random_smooth_vector(const Domain& d, Rng& rng, int modes) {
  VectorField v(d);
  for (int c = 0; c < d.dim(); ++c) {
    const ScalarField f = random_smooth_scalar(d, rng, modes);
    for (std::size_t k = 0; k < d.size(); ++k) v(k, c) = f[k];
  }
  return v;
}

SymTensorField random_smooth_tensor(const Domain& d, Rng& rng, int modes) {
  SymTensorField t(d);
  for (std::size_t c = 0; c < t.components(); ++c) {
    t.set_component(static_cast<int>(c), random_smooth_scalar(d, rng, modes));
  }
  return t;
}

namespace {

void require_symmetric_line(const Domain& d) {
  if (d.dim() != 1 || std::abs(d.origin(0) + 0.5 * d.length(0)) > 1e-12 * d.length(0)) {
    throw InvalidArgument("even_part needs a 1D domain symmetric about 0");
  }
}

}  // namespace

ScalarField even_part(const ScalarField& f) {
  const Domain& d = f.domain();
  require_symmetric_line(d);
  ScalarField out(d);
  const std::size_t n = d.size();
  for (std::size_t k = 0; k < n; ++k) out[k] = f[k] + f[n - 1 - k];
  return out;
}

VectorField even_part(const VectorField& v) {
  const Domain& d = v.domain();
  require_symmetric_line(d);
  VectorField out(d);
  const std::size_t n = d.size();
  for (std::size_t k = 0; k < n; ++k) out(k, 0) = v(k, 0) + v(n - 1 - k, 0);
  return out;
}

}  // namespace netgrad

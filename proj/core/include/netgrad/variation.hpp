#pragma once

// Finite-difference oracles for first and second variations, convexity
// probes, and the closed-form one-dimensional conductance example.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "netgrad/model_driftdiffusion.hpp"
#include "netgrad/random_fields.hpp"

namespace netgrad {

struct VariationReport {
  int direction = 0;
  double analytic = 0.0;
  double fd = 0.0;
  double abs_gap = 0.0;
  double rel_gap = 0.0;
  double eps = 0.0;
  int level = 0;
};

VariationReport make_report(int direction, double analytic, double fd, double eps, int level);
void write_csv(std::ostream& os, const std::vector<VariationReport>& reports);

/// (f(eps) - f(-eps)) / (2 eps)
double fd_first_curve(const std::function<double(double)>& f, double eps);
/// (-f(2 eps) + 16 f(eps) - 30 f(0) + 16 f(-eps) - f(-2 eps)) / (12 eps^2)
double fd_second_curve(const std::function<double(double)>& f, double eps);

inline bool admissible(const SymTensorField& D) { return D.min_eigenvalue() > 0.0; }
inline bool admissible(const VectorField&) { return true; }
inline bool admissible(const ScalarField&) { return true; }

namespace detail {

template <class Field>
void require_admissible_segment(const Field& base, const Field& dir, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  for (double s : {-2.0 * eps, 2.0 * eps}) {
    Field probe = base;
    probe.axpy(s, dir);
    if (!admissible(probe)) {
      std::ostringstream msg;
      msg << "perturbation by " << s << " along the direction leaves the admissible set";
      throw InadmissiblePerturbation(msg.str());
    }
  }
}

template <class Field, class F>
std::function<double(double)> curve(F& functional, const Field& base, const Field& dir) {
  return [&functional, &base, &dir](double s) {
    Field p = base;
    p.axpy(s, dir);
    return functional(p);
  };
}

}  // namespace detail

template <class Field, class F>
double fd_directional(F&& functional, const Field& base, const Field& dir, double eps) {
  detail::require_admissible_segment(base, dir, eps);
  return fd_first_curve(detail::curve(functional, base, dir), eps);
}

template <class Field, class F>
double fd_second(F&& functional, const Field& base, const Field& dir, double eps) {
  detail::require_admissible_segment(base, dir, eps);
  return fd_second_curve(detail::curve(functional, base, dir), eps);
}

struct ConvexityProbeReport {
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  bool sign_change = false;
  bool any_negative(double tol = 0.0) const { return min < -tol; }
};

inline SymTensorField random_direction(const SymTensorField& like, Rng& rng) {
  return random_smooth_tensor(like.domain(), rng);
}
inline VectorField random_direction(const VectorField& like, Rng& rng) {
  return random_smooth_vector(like.domain(), rng);
}

/// fd_second along `trials` seeded directions. The direction generator defaults
/// to random smooth fields of the base's type.
template <class Field, class F>
ConvexityProbeReport convexity_probe(F&& functional, const Field& base, int trials, std::uint64_t seed = 1,
                                     double eps = 1e-3,
                                     std::function<Field(Rng&)> directions = nullptr) {
  if (trials < 1) throw InvalidArgument("convexity_probe: trials must be positive");
  Rng rng(seed);
  if (!directions) directions = [&base](Rng& r) { return random_direction(base, r); };
  ConvexityProbeReport rep;
  rep.min = std::numeric_limits<double>::infinity();
  rep.max = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const Field dir = directions(rng);
    const double v = fd_second(functional, base, dir, eps);
    rep.values.push_back(v);
    rep.min = std::min(rep.min, v);
    rep.max = std::max(rep.max, v);
  }
  rep.sign_change = rep.min < 0.0 && rep.max > 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// One-dimensional example on (0, 1) with r = 1, phi = 0, w'(0) = 0, w(1) = 0,
// where w0' = -B / (1 + m0^2), B(x) = Int_0^x S.

enum class CurvatureSign { negative, zero, positive };

struct Example1DResult {
  double value = 0.0;
  CurvatureSign sign = CurvatureSign::zero;
  /// e.g. "negative (|m0| < 1/sqrt(3))"
  std::string classification;
};

/// 2 Int (m1)^2 B^2 (3 m0^2 - 1) / (1 + m0^2)^3 dx by the trapezoid rule on n_quad nodes.
Example1DResult example_1d_second_variation(double m0, const std::function<double(double)>& m1_profile,
                                            const std::function<double(double)>& source_profile, int n_quad);

/// The example's mixed problem as the even reflection on (-1, 1) with Dirichlet
/// data; n nodes per half interval. Quadratic entropy, c = 0, z = 0.
DriftDiffusionSetup mirrored_example_setup(int n, const std::function<double(double)>& source_profile);

/// Evaluates an even profile f(|x|) on the mirrored domain.
ScalarField mirrored_profile(const Domain& d, const std::function<double(double)>& f);

struct Example1DCrossCheck {
  /// Half of the 5-point second difference of the source-form energy along m1.
  double fd = 0.0;
  /// Half of second_variation_m.
  double analytic = 0.0;
};

Example1DCrossCheck example_1d_pde_check(double m0, const std::function<double(double)>& m1_profile,
                                         const std::function<double(double)>& source_profile, int n,
                                         double eps = 1e-3);

}  // namespace netgrad

#pragma once

#include <string>

#include "netgrad/grid.hpp"

namespace netgrad {

/// Convex entropy generator Phi with derivatives up to third order.
///
/// quadratic: Phi(u) = (u - c)^2 / 2, admissible everywhere.
/// boltzmann: Phi(u) = u (ln u - 1), c = 1, admissible for u > 0.
class EntropyGenerator {
 public:
  enum class Kind { quadratic, boltzmann };

  static EntropyGenerator make_quadratic(double c = 0.0) { return EntropyGenerator(Kind::quadratic, c); }
  static EntropyGenerator make_boltzmann() { return EntropyGenerator(Kind::boltzmann, 1.0); }

  Kind kind() const noexcept { return kind_; }
  /// Equilibrium c with Phi'(c) = 0.
  double equilibrium() const noexcept { return c_; }
  std::string name() const { return kind_ == Kind::quadratic ? "quadratic" : "boltzmann"; }

  /// Smallest argument the Boltzmann generator accepts.
  static constexpr double kPositivityFloor = 1e-300;

  bool admissible(double u) const noexcept { return kind_ == Kind::quadratic || u > kPositivityFloor; }

  double phi(double u) const;
  double d1(double u) const;
  double d2(double u) const;
  double d3(double u) const;

  ScalarField d1(const ScalarField& u) const { return u.map([this](double v) { return d1(v); }); }
  ScalarField d2(const ScalarField& u) const { return u.map([this](double v) { return d2(v); }); }
  ScalarField d3(const ScalarField& u) const { return u.map([this](double v) { return d3(v); }); }

  /// Phi''' is identically zero.
  bool has_zero_third_derivative() const noexcept { return kind_ == Kind::quadratic; }

 private:
  EntropyGenerator(Kind k, double c) : kind_(k), c_(c) {}
  void check(double u) const;

  Kind kind_;
  double c_;
};

}  // namespace netgrad

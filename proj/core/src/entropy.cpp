#include "netgrad/entropy.hpp"

#include <cmath>
#include <sstream>

namespace netgrad {

void EntropyGenerator::check(double u) const {
  if (!admissible(u)) {
    std::ostringstream msg;
    msg << "boltzmann entropy evaluated at non-positive argument " << u;
    throw InvalidArgument(msg.str());
  }
}

double EntropyGenerator::phi(double u) const {
  if (kind_ == Kind::quadratic) return 0.5 * (u - c_) * (u - c_);
  check(u);
  return u * (std::log(u) - 1.0);
}

double EntropyGenerator::d1(double u) const {
  if (kind_ == Kind::quadratic) return u - c_;
  check(u);
  return std::log(u);
}

double EntropyGenerator::d2(double u) const {
  if (kind_ == Kind::quadratic) return 1.0;
  check(u);
  return 1.0 / u;
}

double EntropyGenerator::d3(double u) const {
  if (kind_ == Kind::quadratic) return 0.0;
  check(u);
  return -1.0 / (u * u);
}

}  // namespace netgrad

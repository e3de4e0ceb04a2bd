#pragma once

// Smooth seeded random fields for directional checks: low-frequency cosine
// series with decaying amplitudes, so finite-difference probes stay resolved.

#include <cstdint>
#include <random>

#include "netgrad/grid.hpp"

namespace netgrad {

using Rng = std::mt19937_64;

/// Sum over p, q < modes of a_pq cos(p pi x / Lx) cos(q pi y / Ly), a_pq ~ N(0, 1) / (1 + p + q).
ScalarField random_smooth_scalar(const Domain& d, Rng& rng, int modes = 3);
VectorField random_smooth_vector(const Domain& d, Rng& rng, int modes = 3);
/// Symmetric (not necessarily definite) tensor direction.
SymTensorField random_smooth_tensor(const Domain& d, Rng& rng, int modes = 3);

/// Even part f(x) + f(-x) over a 1D domain symmetric about 0 (used with mirrored setups).
ScalarField even_part(const ScalarField& f);
VectorField even_part(const VectorField& v);

}  // namespace netgrad

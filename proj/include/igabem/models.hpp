#pragma once

#include "igabem/analysis.hpp"

namespace igabem {

/// Circular tunnel (R = 1, E = 1, nu = 0) under s_zz = -1, 6 patches and 48 dof, with the
/// vertical output line above the crown.
Model tunnel_elastic_model();

/// Same tunnel refined at three radial bolts (60, 90 and 120 degrees, y = 0) of length 1,
/// radius 0.025 and E = 2. With with_bolts = false the refined mesh is kept without bolts.
Model tunnel_bolts_model(bool with_bolts = true);

/// Hydrostatic p0 = 1 with an annular Mohr-Coulomb inclusion from R to 2R
/// (c = 0.5, phi = 10 deg, psi = 0).
Model tunnel_plastic_model(int radial_cells = 4, int circumferential_cells = 24);

/// Bolt polar angles of tunnel_bolts_model, radians.
std::array<double, 3> bolt_angles();

}  // namespace igabem

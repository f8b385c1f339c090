#pragma once

#include <array>
#include <stdexcept>

namespace igabem {

/// Excavation-induced plane-strain displacement (u_x, u_z) at (x, z) around a circular hole of
/// radius R centred at the origin. Far-field stresses are s_zz = -p0 and s_xx = -k0 p0.
std::array<double, 2> kirsch_displacement(double p0, double k0, double R, double G, double nu, double x, double z);

struct DuncanFamaResult {
    double sigma_cm = 0.0;  ///< uniaxial compressive strength
    double k = 0.0;         ///< (1 + sin phi)/(1 - sin phi)
    double p_cr = 0.0;      ///< critical support pressure
    double r_p = 0.0;       ///< plastic zone radius
    double u_p = 0.0;       ///< inward wall displacement
    bool plastic = false;
};

/// Unsupported circular tunnel in Mohr-Coulomb ground under hydrostatic p0 (phi in radians).
DuncanFamaResult duncan_fama(double p0, double c, double phi, double E, double nu, double R);

}  // namespace igabem

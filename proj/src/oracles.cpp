#include "igabem/oracles.hpp"

#include <cmath>

namespace igabem {

std::array<double, 2> kirsch_displacement(double p0, double k0, double R, double G, double nu, double x, double z)
{
    const double r = std::hypot(x, z);
    if (r < R * (1.0 - 1e-12)) throw std::domain_error("Kirsch displacement requested inside the hole");
    const double th = std::atan2(z, x);
    const double sx = -k0 * p0, sz = -p0;
    const double S = 0.5 * (sx + sz), D = 0.5 * (sx - sz), kappa = 3.0 - 4.0 * nu;
    const double a2 = R * R, a4 = a2 * a2;
    const double ur = S * a2 / (2.0 * G * r) + D / (2.0 * G) * ((kappa + 1.0) * a2 / r - a4 / (r * r * r)) * std::cos(2 * th);
    const double ut = -D / (2.0 * G) * ((kappa - 1.0) * a2 / r + a4 / (r * r * r)) * std::sin(2 * th);
    return {ur * std::cos(th) - ut * std::sin(th), ur * std::sin(th) + ut * std::cos(th)};
}

DuncanFamaResult duncan_fama(double p0, double c, double phi, double E, double nu, double R)
{
    DuncanFamaResult d;
    const double sf = std::sin(phi);
    d.sigma_cm = 2.0 * c * std::cos(phi) / (1.0 - sf);
    d.k = (1.0 + sf) / (1.0 - sf);
    d.p_cr = (2.0 * p0 - d.sigma_cm) / (1.0 + d.k);
    d.plastic = p0 > d.p_cr && d.p_cr > 0.0;
    if (!d.plastic) {
        d.r_p = R;
        d.u_p = R * (1.0 + nu) / E * p0;
        return d;
    }
    d.r_p = R * std::pow(2.0 * (p0 * (d.k - 1.0) + d.sigma_cm) / ((1.0 + d.k) * d.sigma_cm), 1.0 / (d.k - 1.0));
    const double q = d.r_p / R;
    d.u_p = R * (1.0 + nu) / E * (2.0 * (1.0 - nu) * (p0 - d.p_cr) * q * q - (1.0 - 2.0 * nu) * p0);
    return d;
}

}  // namespace igabem

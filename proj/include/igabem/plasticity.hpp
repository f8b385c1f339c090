#pragma once

#include "igabem/kelvin.hpp"

#include <optional>
#include <stdexcept>

namespace igabem {

class ConstitutiveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Perfectly plastic Mohr-Coulomb, angles in radians, tension positive.
struct MohrCoulomb {
    double c = 0.0;
    double phi = 0.0;
    double psi = 0.0;
    void validate() const;
};

/// F = (s1 - s3)/2 + (s1 + s3)/2 sin(phi) - c cos(phi), s1 >= s2 >= s3.
double mc_yield(const Vec6& sigma, const MohrCoulomb& mc);

/// Uniaxial compressive strength 2c cos(phi)/(1 - sin(phi)).
double mc_compressive_strength(const MohrCoulomb& mc);

/// Gradient of F (a) and of the plastic potential (b) at sigma, as strain-like Voigt
/// vectors (shear entries doubled) so that dF = a . dsigma.
struct FlowVectors {
    Vec6 a, b;
};
FlowVectors mc_flow(const Vec6& sigma, const MohrCoulomb& mc);

/// D_e - (D_e b)(a^T D_e)/(a^T D_e b).
Mat6 d_ep(const Vec6& sigma, const Mat6& De, const MohrCoulomb& mc);

struct ReturnResult {
    Vec6 sigma;
    bool plastic = false;
    /// Edge12: s1 = s2 after return, Edge23: s2 = s3.
    enum class Surface { None, Plane, Edge12, Edge23, Apex } surface = Surface::None;
};

/// Closest-point return of a trial stress onto the Mohr-Coulomb surface for isotropic
/// elasticity (E, nu): main plane, the two edges, or the tension apex.
ReturnResult mc_return(const Vec6& trial, double E, double nu, const MohrCoulomb& mc);

/// f = F_new/(F_new - F_old) for a step crossing the surface, 1 for a step starting on it,
/// 0 for an elastic step.
double plastic_fraction(double F_new, double F_old);

/// Largest load factor in (0, 1] with F(sigma_v + lambda dsigma) <= 0 (bisection).
double first_yield_factor(const Vec6& sigma_v, const Vec6& dsigma, const MohrCoulomb& mc);

}  // namespace igabem

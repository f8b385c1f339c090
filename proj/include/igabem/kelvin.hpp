#pragma once

#include "igabem/nurbs.hpp"

#include <stdexcept>

namespace igabem {

using Mat3 = Eigen::Matrix3d;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Isotropic elastic constants of the fundamental-solution medium.
struct ElasticConstants {
    double G = 0.5;
    double nu = 0.0;

    ElasticConstants() = default;
    ElasticConstants(double shear, double poisson);
    static ElasticConstants from_E_nu(double E, double nu);

    double E() const { return 2.0 * G * (1.0 + nu); }
    double C() const;   ///< 1/(16 pi G (1-nu))
    double C3() const { return 1.0 - 2.0 * nu; }
    static constexpr double C4 = 3.0;
};

/// Distance below which kernels refuse to evaluate.
inline constexpr double kSingularTol = 1e-14;

/// Displacement kernel U_ij(y, x); r = x - y.
Mat3 kernel_U(const Vec3& y, const Vec3& x, const ElasticConstants& k);
/// Traction kernel T_ij(y, x) for unit normal n at x.
Mat3 kernel_T(const Vec3& y, const Vec3& x, const Vec3& n, const ElasticConstants& k);
/// Initial-stress kernel in Voigt form: u_i = E_ic sigma0_c, columns (11,22,33,12,23,13).
Mat36 kernel_E(const Vec3& y, const Vec3& x, const ElasticConstants& k);

/// Voigt index of tensor pair (i,j) in the order (11,22,33,12,23,13).
int voigt_index(int i, int j);
Mat3 voigt_to_tensor(const Vec6& s);
Vec6 tensor_to_voigt(const Mat3& t);

/// Isotropic elasticity matrix for engineering shear strains.
Mat6 elasticity_matrix(double E, double nu);

}  // namespace igabem

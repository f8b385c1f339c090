#include "igabem/kelvin.hpp"

#include <cmath>
#include <numbers>

namespace igabem {

ElasticConstants::ElasticConstants(double shear, double poisson) : G(shear), nu(poisson)
{
    if (!(G > 0.0)) throw std::invalid_argument("shear modulus must be positive");
    if (!(nu > -1.0 && nu < 0.5)) throw std::invalid_argument("Poisson ratio must lie in (-1, 0.5)");
}

ElasticConstants ElasticConstants::from_E_nu(double E, double nu)
{
    return ElasticConstants(E / (2.0 * (1.0 + nu)), nu);
}

double ElasticConstants::C() const { return 1.0 / (16.0 * std::numbers::pi * G * (1.0 - nu)); }

namespace {

double unit_dir(const Vec3& y, const Vec3& x, Vec3& dr)
{
    const Vec3 d = x - y;
    const double r = d.norm();
    if (!(r > kSingularTol)) throw SingularityError("kernel evaluated at coincident source and field points");
    dr = d / r;
    return r;
}

}  // namespace

Mat3 kernel_U(const Vec3& y, const Vec3& x, const ElasticConstants& k)
{
    Vec3 dr;
    const double r = unit_dir(y, x, dr);
    const double c = k.C() / r;
    Mat3 U = dr * dr.transpose();
    U.diagonal().array() += 3.0 - 4.0 * k.nu;
    return c * U;
}

Mat3 kernel_T(const Vec3& y, const Vec3& x, const Vec3& n, const ElasticConstants& k)
{
    Vec3 dr;
    const double r = unit_dir(y, x, dr);
    const double c3 = k.C3();
    const double drdn = dr.dot(n);
    const double f = -1.0 / (8.0 * std::numbers::pi * (1.0 - k.nu) * r * r);
    Mat3 T = 3.0 * drdn * (dr * dr.transpose());
    T.diagonal().array() += c3 * drdn;
    T -= c3 * (dr * n.transpose() - n * dr.transpose());
    return f * T;
}

Mat36 kernel_E(const Vec3& y, const Vec3& x, const ElasticConstants& k)
{
    Vec3 dr;
    const double r = unit_dir(y, x, dr);
    const double c = -k.C() / (r * r);
    const double c3 = k.C3();
    auto e = [&](int i, int j, int l) {
        const double dij = i == j, dil = i == l, djl = j == l;
        return c * (c3 * (dr[l] * dij + dr[j] * dil) - dr[i] * djl + ElasticConstants::C4 * dr[i] * dr[j] * dr[l]);
    };
    static constexpr int vi[6] = {0, 1, 2, 0, 1, 0};
    static constexpr int vj[6] = {0, 1, 2, 1, 2, 2};
    Mat36 E;
    for (int i = 0; i < 3; ++i) {
        for (int a = 0; a < 6; ++a) {
            E(i, a) = e(i, vi[a], vj[a]);
            if (a >= 3) E(i, a) += e(i, vj[a], vi[a]);
        }
    }
    return E;
}

int voigt_index(int i, int j)
{
    if (i == j) return i;
    const int a = std::min(i, j), b = std::max(i, j);
    if (a == 0 && b == 1) return 3;
    if (a == 1 && b == 2) return 4;
    return 5;
}

Mat3 voigt_to_tensor(const Vec6& s)
{
    Mat3 t;
    t << s[0], s[3], s[5], s[3], s[1], s[4], s[5], s[4], s[2];
    return t;
}

Vec6 tensor_to_voigt(const Mat3& t)
{
    Vec6 s;
    s << t(0, 0), t(1, 1), t(2, 2), 0.5 * (t(0, 1) + t(1, 0)), 0.5 * (t(1, 2) + t(2, 1)), 0.5 * (t(0, 2) + t(2, 0));
    return s;
}

Mat6 elasticity_matrix(double E, double nu)
{
    const double lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double mu = E / (2.0 * (1.0 + nu));
    Mat6 D = Mat6::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) D(i, j) = lam;
        D(i, i) += 2.0 * mu;
        D(3 + i, 3 + i) = mu;
    }
    return D;
}

}  // namespace igabem

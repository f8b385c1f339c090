#include "igabem/kelvin.hpp"
#include "igabem/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace igabem;

namespace {

const double kPi = std::numbers::pi;

// Index-by-index textbook forms, written independently of the library.
double u_oracle(int i, int j, const Vec3& y, const Vec3& x, double G, double nu)
{
    const Vec3 d = x - y;
    const double r = d.norm();
    return 1.0 / (16 * kPi * G * (1 - nu) * r) * ((3 - 4 * nu) * (i == j) + d[i] * d[j] / (r * r));
}

double e_oracle(int i, int j, int k, const Vec3& y, const Vec3& x, double G, double nu)
{
    const Vec3 d = x - y;
    const double r = d.norm();
    const double ri = d[i] / r, rj = d[j] / r, rk = d[k] / r;
    const double C = 1.0 / (16 * kPi * G * (1 - nu));
    return -C / (r * r) * ((1 - 2 * nu) * (rk * (i == j) + rj * (i == k)) - ri * (j == k) + 3 * ri * rj * rk);
}

Vec3 random_unit(std::mt19937& rng)
{
    std::normal_distribution<double> nd;
    Vec3 v(nd(rng), nd(rng), nd(rng));
    return v.normalized();
}

}  // namespace

TEST(Kelvin, Constants)
{
    const auto k = ElasticConstants::from_E_nu(1.0, 0.25);
    EXPECT_NEAR(k.G, 0.4, 1e-15);
    EXPECT_NEAR(k.C(), 1.0 / (16 * kPi * 0.4 * 0.75), 1e-15);
    EXPECT_NEAR(k.C3(), 0.5, 1e-15);
    EXPECT_THROW(ElasticConstants(1.0, 0.5), std::invalid_argument);
    EXPECT_THROW(ElasticConstants(-1.0, 0.2), std::invalid_argument);
}

TEST(Kelvin, USymmetryHomogeneityOracle)
{
    const ElasticConstants k(0.7, 0.3);
    std::mt19937 rng(1);
    for (int s = 0; s < 50; ++s) {
        const Vec3 y = random_unit(rng), x = 2.0 * random_unit(rng) + Vec3(0.1, 0.2, 0.3);
        const Mat3 U = kernel_U(y, x, k);
        EXPECT_LT((U - U.transpose()).norm(), 1e-16);
        EXPECT_LT((U - kernel_U(x, y, k)).norm(), 1e-16);
        const Mat3 U2 = kernel_U(y, y + 2.0 * (x - y), k);
        EXPECT_LT((U2 - 0.5 * U).norm(), 1e-15);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) EXPECT_NEAR(U(i, j), u_oracle(i, j, y, x, k.G, k.nu), 1e-15);
    }
    EXPECT_THROW(kernel_U(Vec3(1, 2, 3), Vec3(1, 2, 3), k), SingularityError);
}

TEST(Kelvin, TLinearityHomogeneity)
{
    const ElasticConstants k(0.5, 0.2);
    std::mt19937 rng(2);
    for (int s = 0; s < 50; ++s) {
        const Vec3 y = random_unit(rng), x = random_unit(rng) * 3.0, n = random_unit(rng);
        const Mat3 T = kernel_T(y, x, n, k);
        EXPECT_LT((kernel_T(y, x, -n, k) + T).norm(), 1e-15);
        EXPECT_LT((kernel_T(y, y + 2.0 * (x - y), n, k) - 0.25 * T).norm(), 1e-15);
    }
}

TEST(Kelvin, TMatchesTractionOfU)
{
    // Row j of T is the traction of the displacement field caused by a unit load along j.
    const ElasticConstants k(0.8, 0.3);
    const double lam = 2 * k.G * k.nu / (1 - 2 * k.nu);
    const Vec3 y(0.1, -0.2, 0.3), x(1.0, 0.7, -0.4), n = Vec3(0.3, -0.5, 0.8).normalized();
    const double h = 1e-5;
    const Mat3 T = kernel_T(y, x, n, k);
    for (int j = 0; j < 3; ++j) {
        Mat3 grad;  // grad(i, m) = d u_i / d x_m for load direction j
        for (int m = 0; m < 3; ++m) {
            Vec3 e = Vec3::Zero();
            e[m] = h;
            const Mat3 up = kernel_U(y, x + e, k), um = kernel_U(y, x - e, k);
            for (int i = 0; i < 3; ++i) grad(i, m) = (up(i, j) - um(i, j)) / (2 * h);
        }
        const Mat3 eps = 0.5 * (grad + grad.transpose());
        const Mat3 sig = lam * eps.trace() * Mat3::Identity() + 2 * k.G * eps;
        const Vec3 t = sig * n;
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(T(j, i), t[i], 1e-7);
    }
}

TEST(Kelvin, SphereIdentity)
{
    const ElasticConstants k(0.5, 0.25);
    const Vec3 c(0.2, -0.1, 0.4), y(0.5, 0.1, 0.2);
    const double R = 1.3;
    const auto& gt = gauss_rule(32);
    const auto& gp = gauss_rule(64);
    Mat3 S = Mat3::Zero();
    for (int i = 0; i < 32; ++i) {
        const double th = 0.5 * kPi * (1 + gt.x[i]);
        for (int j = 0; j < 64; ++j) {
            const double ph = kPi * (1 + gp.x[j]);
            const Vec3 n(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
            const double w = 0.5 * kPi * gt.w[i] * kPi * gp.w[j] * R * R * std::sin(th);
            S += kernel_T(y, c + R * n, n, k) * w;
        }
    }
    EXPECT_LT((S + Mat3::Identity()).norm(), 1e-6);
}

TEST(Kelvin, EHomogeneityOddnessOracle)
{
    const ElasticConstants k(0.6, 0.15);
    std::mt19937 rng(3);
    static const int vi[6] = {0, 1, 2, 0, 1, 0};
    static const int vj[6] = {0, 1, 2, 1, 2, 2};
    for (int s = 0; s < 50; ++s) {
        const Vec3 y = random_unit(rng), x = 1.5 * random_unit(rng) + Vec3(0.3, 0, 0);
        const Mat36 E = kernel_E(y, x, k);
        EXPECT_LT((kernel_E(y, y + 2.0 * (x - y), k) - 0.25 * E).norm(), 1e-15);
        EXPECT_LT((kernel_E(x, y, k) + E).norm(), 1e-15);
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 6; ++a) {
                double ref = e_oracle(i, vi[a], vj[a], y, x, k.G, k.nu);
                if (a >= 3) ref += e_oracle(i, vj[a], vi[a], y, x, k.G, k.nu);
                EXPECT_NEAR(E(i, a), ref, 1e-14);
            }
    }
    // r along +z, nu = 0: (3, col 33) = (-C/r^2)(2 - 1 + 3)
    const ElasticConstants k0(0.5, 0.0);
    const Mat36 E = kernel_E(Vec3::Zero(), Vec3(0, 0, 2), k0);
    EXPECT_NEAR(E(2, 2), -k0.C() / 4.0 * 4.0, 1e-15);
}

TEST(Kelvin, VoigtRoundTrip)
{
    Vec6 s;
    s << 1, 2, 3, 4, 5, 6;
    EXPECT_LT((tensor_to_voigt(voigt_to_tensor(s)) - s).norm(), 1e-15);
    EXPECT_EQ(voigt_index(0, 1), 3);
    EXPECT_EQ(voigt_index(2, 1), 4);
    EXPECT_EQ(voigt_index(2, 0), 5);
    // u_i = E_ijk sigma_jk reproduced by the Voigt packing for a full symmetric tensor
    const ElasticConstants k(0.5, 0.3);
    const Vec3 y(0, 0, 0), x(0.3, -0.7, 0.4);
    const Mat3 sig = voigt_to_tensor(s);
    const Vec3 u = kernel_E(y, x, k) * s;
    for (int i = 0; i < 3; ++i) {
        double ref = 0.0;
        for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l) ref += e_oracle(i, j, l, y, x, k.G, k.nu) * sig(j, l);
        EXPECT_NEAR(u[i], ref, 1e-14);
    }
}

TEST(Kelvin, ElasticityMatrix)
{
    const Mat6 D = elasticity_matrix(1.0, 0.0);
    EXPECT_NEAR(D(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(D(3, 3), 0.5, 1e-15);
    EXPECT_NEAR(D(0, 1), 0.0, 1e-15);
}

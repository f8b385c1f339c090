#include "igabem/oracles.hpp"
#include "igabem/plasticity.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

using namespace igabem;

namespace {

const double deg = std::numbers::pi / 180.0;

MohrCoulomb rock(double psi_deg = 0.0) { return {0.5, 10.0 * deg, psi_deg * deg}; }

Vec6 random_stress(std::mt19937& rng, double scale)
{
    std::uniform_real_distribution<double> d(-scale, scale);
    Vec6 s;
    for (int i = 0; i < 6; ++i) s[i] = d(rng);
    return s;
}

Mat3 random_rotation(std::mt19937& rng)
{
    std::normal_distribution<double> n;
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized().toRotationMatrix();
}

// Sorted principal values, largest first.
Vec3 principal(const Vec6& s)
{
    Eigen::SelfAdjointEigenSolver<Mat3> es(voigt_to_tensor(s));
    const Vec3 v = es.eigenvalues();
    return Vec3(v[2], v[1], v[0]);
}

}  // namespace

TEST(MohrCoulomb, YieldExamples)
{
    const auto mc = rock();
    EXPECT_NEAR(mc_yield(Vec6::Zero(), mc), -mc.c * std::cos(mc.phi), 1e-15);
    const double scm = mc_compressive_strength(mc);
    EXPECT_NEAR(scm, 1.1917, 1e-4);
    Vec6 uni = Vec6::Zero();
    uni[2] = -scm;
    EXPECT_NEAR(mc_yield(uni, mc), 0.0, 1e-14);
    // hydrostatic compression never yields for phi > 0
    Vec6 hyd = Vec6::Zero();
    hyd.head<3>().setConstant(-100.0);
    EXPECT_LT(mc_yield(hyd, mc), 0.0);
}

TEST(MohrCoulomb, YieldIsRotationInvariant)
{
    std::mt19937 rng(3);
    const auto mc = rock();
    for (int t = 0; t < 20; ++t) {
        const Vec6 s = random_stress(rng, 2.0);
        const Mat3 R = random_rotation(rng);
        const Vec6 r = tensor_to_voigt(R * voigt_to_tensor(s) * R.transpose());
        EXPECT_NEAR(mc_yield(s, mc), mc_yield(r, mc), 1e-12);
    }
}

TEST(MohrCoulomb, FlowVectorIsGradientOfYield)
{
    std::mt19937 rng(5);
    const auto mc = rock();
    for (int t = 0; t < 10; ++t) {
        const Vec6 s = random_stress(rng, 1.0);
        const auto fv = mc_flow(s, mc);
        const double h = 1e-6;
        for (int i = 0; i < 6; ++i) {
            Vec6 sp = s, sm = s;
            sp[i] += h;
            sm[i] -= h;
            EXPECT_NEAR(fv.a[i], (mc_yield(sp, mc) - mc_yield(sm, mc)) / (2 * h), 1e-6) << "component " << i;
        }
    }
}

TEST(MohrCoulomb, ElastoplasticMatrixConsistency)
{
    std::mt19937 rng(7);
    const Mat6 De = elasticity_matrix(1.0, 0.25);
    for (double psi : {0.0, 5.0, 10.0}) {
        const auto mc = rock(psi);
        for (int t = 0; t < 10; ++t) {
            const Vec6 s = random_stress(rng, 1.0);
            const auto fv = mc_flow(s, mc);
            const Mat6 Dep = d_ep(s, De, mc);
            // stress rates stay tangent to the surface and plastic flow carries no stress
            EXPECT_LT((fv.a.transpose() * Dep).norm(), 1e-12 * De.norm());
            EXPECT_LT((Dep * fv.b).norm(), 1e-12 * De.norm());
            if (psi == 10.0) {
                EXPECT_LT((Dep - Dep.transpose()).norm(), 1e-12 * De.norm());
                EXPECT_NEAR(fv.a.dot(Dep * fv.a), 0.0, 1e-12);
            }
        }
    }
}

TEST(MohrCoulomb, ReturnMappingLandsOnSurface)
{
    std::mt19937 rng(11);
    const double E = 1.0, nu = 0.2;
    for (double psi : {0.0, 10.0}) {
        const auto mc = rock(psi);
        int plastic = 0;
        for (int t = 0; t < 400; ++t) {
            const Vec6 trial = random_stress(rng, 3.0);
            const auto r = mc_return(trial, E, nu, mc);
            const double F = mc_yield(r.sigma, mc);
            if (mc_yield(trial, mc) <= 0.0) {
                EXPECT_FALSE(r.plastic);
                EXPECT_EQ(r.sigma, trial);
                continue;
            }
            ++plastic;
            EXPECT_TRUE(r.plastic);
            EXPECT_LE(F, 1e-8 * mc.c * std::cos(mc.phi));
            EXPECT_GE(F, -1e-8);
            // principal directions are kept
            const Mat3 a = voigt_to_tensor(trial), b = voigt_to_tensor(r.sigma);
            EXPECT_LT((a * b - b * a).norm(), 1e-9 * (1.0 + a.norm() * b.norm()));
        }
        EXPECT_GT(plastic, 50);
    }
}

TEST(MohrCoulomb, ReturnMappingFollowsFlowRuleOnMainPlane)
{
    // trial stress near the middle of a face returns along D b
    const double E = 1.0, nu = 0.3;
    const auto mc = rock(4.0);
    Vec6 trial = Vec6::Zero();
    trial[0] = 0.1;
    trial[1] = -0.6;
    trial[2] = -2.0;
    const auto r = mc_return(trial, E, nu, mc);
    ASSERT_EQ(r.surface, ReturnResult::Surface::Plane);
    const Vec6 d = trial - r.sigma;
    const Vec6 Db = elasticity_matrix(E, nu) * mc_flow(r.sigma, mc).b;
    EXPECT_LT((d - d.dot(Db) / Db.squaredNorm() * Db).norm(), 1e-10 * d.norm());
    EXPECT_GT(d.dot(Db), 0.0);
}

TEST(MohrCoulomb, EdgeAndApexReturns)
{
    const double E = 1.0, nu = 0.2;
    const auto mc = rock();
    // two equal large principal stresses: s1 = s2 after return
    Vec6 t12 = Vec6::Zero();
    t12[0] = t12[1] = 0.0;
    t12[2] = -4.0;
    auto r = mc_return(t12, E, nu, mc);
    Vec3 p = principal(r.sigma);
    EXPECT_NEAR(p[0], p[1], 1e-10);
    EXPECT_NEAR(mc_yield(r.sigma, mc), 0.0, 1e-10);
    // two equal small principal stresses: s2 = s3 after return
    Vec6 t23 = Vec6::Zero();
    t23[0] = 1.0;
    t23[1] = t23[2] = -2.0;
    r = mc_return(t23, E, nu, mc);
    p = principal(r.sigma);
    EXPECT_NEAR(p[1], p[2], 1e-10);
    EXPECT_NEAR(mc_yield(r.sigma, mc), 0.0, 1e-10);
    // hydrostatic tension returns to the apex
    Vec6 ten = Vec6::Zero();
    ten.head<3>().setConstant(10.0);
    r = mc_return(ten, E, nu, mc);
    EXPECT_EQ(r.surface, ReturnResult::Surface::Apex);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.sigma[i], mc.c / std::tan(mc.phi), 1e-10);
}

TEST(MohrCoulomb, ParameterValidation)
{
    EXPECT_THROW((MohrCoulomb{0.5, 10 * deg, 20 * deg}.validate()), ConstitutiveError);
    EXPECT_THROW((MohrCoulomb{-1.0, 10 * deg, 0.0}.validate()), ConstitutiveError);
    EXPECT_NO_THROW(rock().validate());
}

TEST(PlasticFraction, Guards)
{
    EXPECT_DOUBLE_EQ(plastic_fraction(1.0, -1.0), 0.5);
    EXPECT_DOUBLE_EQ(plastic_fraction(0.0, -1.0), 0.0);
    EXPECT_DOUBLE_EQ(plastic_fraction(-0.5, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(plastic_fraction(0.3, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(plastic_fraction(0.3, 0.1), 1.0);
    for (double fo : {-1e-300, -1.0, -1e6})
        for (double fn : {1e-300, 1e-3, 1.0, 1e6}) {
            const double f = plastic_fraction(fn, fo);
            EXPECT_GE(f, 0.0);
            EXPECT_LE(f, 1.0);
            EXPECT_TRUE(std::isfinite(f));
        }
}

TEST(FirstYield, Factor)
{
    const auto mc = rock();
    Vec6 small = Vec6::Zero();
    small[2] = -0.1;
    EXPECT_DOUBLE_EQ(first_yield_factor(Vec6::Zero(), small, mc), 1.0);
    // uniaxial compression reaching the strength at 40% of the increment
    Vec6 d = Vec6::Zero();
    d[2] = -mc_compressive_strength(mc) / 0.4;
    EXPECT_NEAR(first_yield_factor(Vec6::Zero(), d, mc), 0.4, 1e-12);
    Vec6 bad = Vec6::Zero();
    bad[2] = -10.0;
    EXPECT_THROW(first_yield_factor(bad, d, mc), ConstitutiveError);
}

TEST(Oracles, KirschHydrostaticAndDecay)
{
    const double G = 0.5, nu = 0.25, R = 1.3;
    for (double r : {1.3, 2.0, 5.0})
        for (double th : {0.0, 0.4, 1.3}) {
            const auto u = kirsch_displacement(2.0, 1.0, R, G, nu, r * std::cos(th), r * std::sin(th));
            const double ur = u[0] * std::cos(th) + u[1] * std::sin(th);
            const double ut = -u[0] * std::sin(th) + u[1] * std::cos(th);
            EXPECT_NEAR(ur, -2.0 * R * R / (2 * G * r), 1e-12);
            EXPECT_NEAR(ut, 0.0, 1e-12);
        }
    const auto near = kirsch_displacement(1.0, 0.0, 1.0, 0.5, 0.0, 0.0, 1.0);
    EXPECT_NEAR(near[1], -2.0, 1e-12);
    const auto far = kirsch_displacement(1.0, 0.3, 1.0, 0.5, 0.2, 1e4, 1e4);
    EXPECT_LT(std::hypot(far[0], far[1]), 1e-3);
    EXPECT_THROW(kirsch_displacement(1.0, 0.0, 1.0, 0.5, 0.0, 0.2, 0.2), std::domain_error);
}

TEST(Oracles, DuncanFamaNumbers)
{
    const auto r = duncan_fama(1.0, 0.5, 10 * deg, 1.0, 0.0, 1.0);
    EXPECT_TRUE(r.plastic);
    EXPECT_NEAR(r.sigma_cm, 1.19175, 1e-5);
    EXPECT_NEAR(r.k, 1.42028, 1e-5);
    EXPECT_NEAR(r.p_cr, 0.33395, 1e-5);
    EXPECT_NEAR(r.r_p, 1.30331, 1e-5);
    EXPECT_NEAR(r.u_p, 1.26273, 1e-5);
    EXPECT_NEAR(r.u_p, 1.262, 0.01 * 1.262);
}

TEST(Oracles, DuncanFamaElasticLimit)
{
    const auto r = duncan_fama(1.0, 50.0, 10 * deg, 2.0, 0.3, 1.5);
    EXPECT_FALSE(r.plastic);
    EXPECT_DOUBLE_EQ(r.r_p, 1.5);
    EXPECT_NEAR(r.u_p, 1.0 * 1.5 * 1.3 / 2.0, 1e-14);
    // just below the cohesion at which yielding starts, the plastic solution meets the elastic one
    const double phi = 10 * deg, p0 = 1.0;
    const double c_crit = 2.0 * p0 * (1.0 - std::sin(phi)) / (2.0 * std::cos(phi));
    const auto below = duncan_fama(p0, c_crit * (1.0 - 1e-9), phi, 1.0, 0.0, 1.0);
    EXPECT_TRUE(below.plastic);
    EXPECT_NEAR(below.r_p, 1.0, 1e-6);
    EXPECT_NEAR(below.u_p, p0 / 1.0, 1e-6);
}

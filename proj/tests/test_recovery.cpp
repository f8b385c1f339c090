#include "igabem/analysis.hpp"
#include "igabem/models.hpp"
#include "igabem/recovery.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace igabem;

namespace {

NurbsSurface bilinear(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d)
{
    NurbsSurface s;
    s.knotU = KnotVector({0, 0, 1, 1}, 1);
    s.knotV = KnotVector({0, 0, 1, 1}, 1);
    s.points = {a, b, c, d};
    s.weights = {1, 1, 1, 1};
    return s;
}

GeneralInclusion skew_block(int cells, int degree)
{
    GeneralInclusion g;
    g.id = "block";
    g.material = "m";
    g.bottom = bilinear(Vec3(0, 0, 0), Vec3(1.2, 0.1, 0), Vec3(0.1, 0.9, 0.05), Vec3(1.1, 1.1, 0.1));
    g.top = bilinear(Vec3(0.1, 0, 1), Vec3(1.2, 0.2, 1.1), Vec3(0.2, 1.0, 0.9), Vec3(1.3, 1.2, 1.2));
    for (auto& a : g.grid) a = GridAxis{cells, degree};
    return g;
}

LinearInclusion straight_bolt(const Vec3& from, const Vec3& to, int segments)
{
    LinearInclusion b;
    b.id = "bolt";
    std::vector<double> k{0.0};
    for (int i = 0; i <= segments; ++i) k.push_back(static_cast<double>(i) / segments);
    k.push_back(1.0);
    b.axis.knot = KnotVector(k, 1);
    for (int i = 0; i <= segments; ++i) b.axis.points.push_back(from + (to - from) * (static_cast<double>(i) / segments));
    b.axis.weights.assign(segments + 1, 1.0);
    b.radius = 0.025;
    b.E = 2.0;
    return b;
}

Eigen::VectorXd nodal(const InclusionSet& set, const std::function<Vec3(const Vec3&)>& u)
{
    Eigen::VectorXd v(3 * set.size());
    for (int p = 0; p < set.size(); ++p) v.segment<3>(3 * p) = u(set.points[p].x);
    return v;
}

}  // namespace

TEST(StrainOperator, GeneralPatchTests)
{
    for (int degree : {1, 2}) {
        const auto set = prepare_inclusions({skew_block(2, degree)}, {}, {}, 1e-9);
        const auto B = strain_operator(set);
        ASSERT_EQ(B.rows(), 6 * set.size());
        const Eigen::VectorXd trans = B * nodal(set, [](const Vec3&) { return Vec3(0.3, -1.0, 2.0); });
        EXPECT_LT(trans.cwiseAbs().maxCoeff(), 1e-12);
        Vec6 ex;
        ex << 1, 0, 0, 0, 0, 0;
        const Eigen::VectorXd ux = B * nodal(set, [](const Vec3& x) { return Vec3(x[0], 0, 0); });
        Vec6 shear;
        shear << 0, 0, 0, 1, 0, 0;
        const Eigen::VectorXd uy = B * nodal(set, [](const Vec3& x) { return Vec3(x[1], 0, 0); });
        for (int p = 0; p < set.size(); ++p) {
            EXPECT_LT((ux.segment<6>(6 * p) - ex).norm(), 1e-12) << "point " << p;
            EXPECT_LT((uy.segment<6>(6 * p) - shear).norm(), 1e-12) << "point " << p;
        }
        // arbitrary affine field: engineering strains of its symmetric gradient
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> d(-1, 1);
        Mat3 A;
        for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = d(rng);
        const Mat3 e = 0.5 * (A + A.transpose());
        Vec6 ref;
        ref << e(0, 0), e(1, 1), e(2, 2), 2 * e(0, 1), 2 * e(1, 2), 2 * e(0, 2);
        const Eigen::VectorXd ua = B * nodal(set, [&](const Vec3& x) { return Vec3(A * x); });
        for (int p = 0; p < set.size(); ++p) EXPECT_LT((ua.segment<6>(6 * p) - ref).norm(), 1e-11);
    }
}

TEST(StrainOperator, BoltAxialStrain)
{
    const double s = std::sqrt(0.5);
    for (int segments : {3, 4}) {
        const Vec3 d(s, 0, s);
        const auto set = prepare_inclusions({}, {straight_bolt(Vec3(1, 0, 1), Vec3(1, 0, 1) + 2.0 * d, segments)}, {});
        const auto B = strain_operator(set);
        const Eigen::VectorXd t = B * nodal(set, [](const Vec3&) { return Vec3(1, 2, 3); });
        const Eigen::VectorXd st = B * nodal(set, [&](const Vec3& x) { return Vec3(d * d.dot(x)); });
        const Eigen::VectorXd ux = B * nodal(set, [](const Vec3& x) { return Vec3(x[0], 0, 0); });
        const Eigen::VectorXd lat = B * nodal(set, [](const Vec3& x) { return Vec3(0, x[0], 0); });
        for (int p = 0; p < set.size(); ++p) {
            EXPECT_NEAR(t[6 * p + 2], 0.0, 1e-12);
            EXPECT_NEAR(st[6 * p + 2], 1.0, 1e-12);
            EXPECT_NEAR(ux[6 * p + 2], 0.5, 1e-12);
            EXPECT_NEAR(lat[6 * p + 2], 0.0, 1e-12);
            for (int i : {0, 1, 3, 4, 5}) EXPECT_EQ(st[6 * p + i], 0.0);
        }
    }
}

TEST(BoundaryRecovery, Weights)
{
    NurbsSurface g;
    g.knotU = KnotVector({0, 0, 0, 1, 1, 1}, 2);
    g.knotV = KnotVector({0, 0, 1, 1}, 1);
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 3; ++i) g.points.push_back(Vec3(0.5 * i, j, 0));
    g.weights.assign(6, 1.0);
    BoundaryModel model;
    model.patches = {make_finite_patch("flat", g)};
    const auto dofs = build_dofs(model.patches);

    const auto mid = boundary_recovery(model, dofs, {0, {0.5, 0.0}});
    std::map<int, double> w(mid.begin(), mid.end());
    const auto& gl = dofs.global[0];
    EXPECT_NEAR(w[gl[0]], 0.25, 1e-15);
    EXPECT_NEAR(w[gl[1]], 0.5, 1e-15);
    EXPECT_NEAR(w[gl[2]], 0.25, 1e-15);

    const auto corner = boundary_recovery(model, dofs, {0, {1.0, 1.0}});
    for (const auto& [dof, v] : corner) EXPECT_NEAR(v, dof == gl[5] ? 1.0 : 0.0, 1e-15);

    // partition of unity on the tunnel patches, rational bases included
    BoundaryModel tunnel;
    tunnel.patches = build_circular_tunnel(1.0, 2.0, 2);
    const auto td = build_dofs(tunnel.patches);
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> u(0.0, 0.999);
    for (int p = 0; p < static_cast<int>(tunnel.patches.size()); ++p)
        for (int t = 0; t < 10; ++t) {
            double sum = 0.0;
            for (const auto& [dof, v] : boundary_recovery(tunnel, td, {p, {u(rng), u(rng)}})) sum += v;
            EXPECT_NEAR(sum, 1.0, 1e-13);
        }
    EXPECT_THROW(boundary_recovery(tunnel, td, {42, {0.5, 0.5}}), RecoveryError);
}

TEST(Recovery, InteriorPointsApproachTheWall)
{
    const Model m = tunnel_elastic_model();
    const auto res = run_analysis(m);
    std::vector<Vec3> wall, inside;
    for (double a : {0.25, 0.5, 0.75}) {
        const double th = a * std::numbers::pi;
        wall.emplace_back(std::cos(th), 0.0, std::sin(th));
        inside.emplace_back(1.001 * std::cos(th), 0.0, 1.001 * std::sin(th));
    }
    const auto uw = sample_displacements(res, wall);
    const auto ui = sample_displacements(res, inside);
    for (size_t i = 0; i < wall.size(); ++i) EXPECT_LT((uw[i] - ui[i]).norm(), 0.01 * uw[i].norm()) << "angle " << i;
}

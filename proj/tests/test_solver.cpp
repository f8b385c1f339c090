#include "igabem/solver.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace igabem;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937& rng, int r, int c, double scale)
{
    std::uniform_real_distribution<double> d(-scale, scale);
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

LinearSystem random_system(std::mt19937& rng, int n, int g)
{
    LinearSystem s;
    s.L = random_matrix(rng, 3 * n, 3 * n, 1.0) + 6.0 * n * Eigen::MatrixXd::Identity(3 * n, 3 * n);
    s.r = random_matrix(rng, 3 * n, 1, 1.0);
    s.B0 = random_matrix(rng, 3 * n, 6 * g, 0.3);
    s.C = random_matrix(rng, 6 * g, 3 * n, 0.3);
    s.c = random_matrix(rng, 6 * g, 1, 1.0);
    s.C0 = random_matrix(rng, 6 * g, 6 * g, 0.05);
    return s;
}

InitialStressLaw random_law(std::mt19937& rng, int g, const std::vector<int>& active)
{
    InitialStressLaw law;
    law.Dp.assign(g, Mat6::Zero());
    law.R = Eigen::VectorXd::Zero(6 * g);
    for (int p : active) {
        law.Dp[p] = random_matrix(rng, 6, 6, 0.5);
        law.R.segment<6>(6 * p) = random_matrix(rng, 6, 1, 0.2);
    }
    return law;
}

void expect_satisfies(const LinearSystem& s, const InitialStressLaw& law, const LinearSolution& sol, double load)
{
    const Eigen::VectorXd rhs = load * s.r + s.B0 * sol.sigma0;
    EXPECT_LT((s.L * sol.x - rhs).norm(), 1e-10 * rhs.norm());
    const Eigen::VectorXd eps = s.C * sol.x + load * s.c + s.C0 * sol.sigma0;
    const auto active = active_points(law);
    for (int p : active) {
        EXPECT_LT((sol.eps.segment<6>(6 * p) - eps.segment<6>(6 * p)).norm(), 1e-10 * (1.0 + eps.norm()));
        const Vec6 s0 = law.Dp[p] * eps.segment<6>(6 * p) + law.R.segment<6>(6 * p);
        EXPECT_LT((sol.sigma0.segment<6>(6 * p) - s0).norm(), 1e-10 * (1.0 + s0.norm()));
    }
}

}  // namespace

TEST(Solver, ActivePoints)
{
    InitialStressLaw law;
    law.Dp.assign(4, Mat6::Zero());
    law.Dp[2](1, 1) = 1.0;
    law.R = Eigen::VectorXd::Zero(24);
    law.R[6 * 3 + 4] = 0.5;
    EXPECT_EQ(active_points(law), (std::vector<int>{2, 3}));
}

TEST(Solver, CoupledAndCondensedAgree)
{
    std::mt19937 rng(17);
    for (int t = 0; t < 5; ++t) {
        const int n = 4 + t, g = 5;
        const auto s = random_system(rng, n, g);
        const auto law = random_law(rng, g, {0, 2, 3});
        const double load = 0.3 + 0.2 * t;
        const auto a = solve_coupled(s, law, load);
        const auto b = solve_condensed(s, law, load);
        EXPECT_LT((a.x - b.x).norm(), 1e-10 * b.x.norm());
        EXPECT_LT((a.sigma0 - b.sigma0).norm(), 1e-10 * (1.0 + b.sigma0.norm()));
        expect_satisfies(s, law, a, load);
        expect_satisfies(s, law, b, load);
    }
}

TEST(Solver, ZeroContrastIsInert)
{
    std::mt19937 rng(19);
    const auto s = random_system(rng, 5, 4);
    InitialStressLaw law;
    law.Dp.assign(4, Mat6::Zero());
    const Eigen::VectorXd ref = s.L.partialPivLu().solve(s.r);
    for (const auto& sol : {solve_coupled(s, law), solve_condensed(s, law)}) {
        EXPECT_LT((sol.x - ref).norm(), 1e-10 * ref.norm());
        EXPECT_LT(sol.sigma0.norm(), 1e-10);
    }
}

TEST(Solver, ConfigValidation)
{
    SolverConfig c;
    EXPECT_EQ(c.n_steps, 10);
    EXPECT_DOUBLE_EQ(c.tol, 0.01);
    EXPECT_EQ(c.max_iter, 50);
    EXPECT_NO_THROW(c.validate());
    c.n_steps = 0;
    EXPECT_THROW(c.validate(), SolverError);
    c = {};
    c.tol = -1.0;
    EXPECT_THROW(c.validate(), SolverError);
}

namespace {

// One plastic grid point driven by a prescribed strain path eps = load c + C0 sigma0.
struct OnePoint {
    LinearSystem sys;
    std::vector<GridMaterial> mat;
    Vec6 sv = Vec6::Zero();

    explicit OnePoint(double coupling)
    {
        sys.L = Eigen::MatrixXd::Identity(3, 3);
        sys.r = Eigen::VectorXd::Zero(3);
        sys.B0 = Eigen::MatrixXd::Zero(3, 6);
        sys.C = Eigen::MatrixXd::Zero(6, 3);
        sys.c = Eigen::VectorXd::Zero(6);
        sys.c[0] = 0.8;
        sys.c[2] = -2.5;
        sys.C0 = -coupling * elasticity_matrix(1.0, 0.2).inverse();
        GridMaterial m;
        m.D = elasticity_matrix(1.0, 0.2);
        m.De = m.D;
        m.E = 1.0;
        m.nu = 0.2;
        m.yield = MohrCoulomb{0.5, 10 * std::numbers::pi / 180, 0.0};
        mat.push_back(m);
        sv << -0.3, -0.3, -0.3, 0, 0, 0;
    }
};

}  // namespace

TEST(Solver, IncrementalReturnsToSurface)
{
    for (double coupling : {0.0, 0.3}) {
        OnePoint pb(coupling);
        SolverConfig cfg;
        cfg.tol = 1e-6;
        const auto res = incremental_solve(pb.sys, pb.mat, pb.sv, cfg);
        const auto& mc = *pb.mat[0].yield;
        EXPECT_GT(res.lambda, 0.0);
        EXPECT_LT(res.lambda, 1.0);
        // the elastic state at first yield is on the surface
        const Vec6 s_first = pb.sv + pb.mat[0].De * (res.lambda * pb.sys.c);
        if (coupling == 0.0) EXPECT_NEAR(mc_yield(s_first, mc), 0.0, 1e-10);
        EXPECT_EQ(res.increments, cfg.n_steps);
        EXPECT_TRUE(res.points[0].yielded);
        EXPECT_LE(res.points[0].F, 1e-8 * mc.c * std::cos(mc.phi));
        EXPECT_GT(res.points[0].f, 0.0);
        // initial stress equals the stress the elastic law cannot carry
        const auto& st = res.points[0];
        EXPECT_LT((st.sigma0 - (pb.sv + pb.mat[0].D * st.eps - st.sigma)).norm(), 1e-12);
        // last change met the tolerance
        EXPECT_LE(res.history.back().change, cfg.tol);
    }
}

TEST(Solver, NonConvergenceCarriesHistory)
{
    OnePoint pb(0.3);
    SolverConfig cfg;
    cfg.tol = 1e-15;
    cfg.max_iter = 1;
    try {
        incremental_solve(pb.sys, pb.mat, pb.sv, cfg);
        FAIL() << "expected NonConvergenceError";
    } catch (const NonConvergenceError& e) {
        EXPECT_GE(e.history.size(), 2u);
    }
}

TEST(Solver, ElasticMaterialsSkipIncrements)
{
    OnePoint pb(0.0);
    pb.mat[0].yield.reset();
    const auto res = incremental_solve(pb.sys, pb.mat, pb.sv, SolverConfig{});
    EXPECT_DOUBLE_EQ(res.lambda, 1.0);
    EXPECT_EQ(res.increments, 0);
    EXPECT_EQ(res.max_iterations, 0);
}

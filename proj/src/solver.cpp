#include "igabem/solver.hpp"

#include <cmath>
#include <sstream>

namespace igabem {

std::vector<int> active_points(const InitialStressLaw& law)
{
    std::vector<int> P;
    for (size_t p = 0; p < law.Dp.size(); ++p) {
        const bool r = law.R.size() > 0 && law.R.segment<6>(6 * p).cwiseAbs().maxCoeff() > 0.0;
        if (r || law.Dp[p].cwiseAbs().maxCoeff() > 0.0) P.push_back(static_cast<int>(p));
    }
    return P;
}

namespace {

struct Gathered {
    std::vector<int> P;
    Eigen::MatrixXd B0P, CP, C0PP, D;
    Eigen::VectorXd cP, RP;
};

Gathered gather(const LinearSystem& sys, const InitialStressLaw& law)
{
    const int G = sys.grid_points();
    if (static_cast<int>(law.Dp.size()) != G) throw SolverError("initial-stress law size does not match the grid");
    Gathered g;
    g.P = active_points(law);
    const int m = 6 * static_cast<int>(g.P.size());
    const int N3 = static_cast<int>(sys.L.rows());
    g.B0P.resize(N3, m);
    g.CP.resize(m, N3);
    g.C0PP.resize(m, m);
    g.D = Eigen::MatrixXd::Zero(m, m);
    g.cP.resize(m);
    g.RP = Eigen::VectorXd::Zero(m);
    for (size_t a = 0; a < g.P.size(); ++a) {
        const int p = g.P[a];
        g.B0P.middleCols<6>(6 * a) = sys.B0.middleCols<6>(6 * p);
        g.CP.middleRows<6>(6 * a) = sys.C.middleRows<6>(6 * p);
        g.cP.segment<6>(6 * a) = sys.c.segment<6>(6 * p);
        g.D.block<6, 6>(6 * a, 6 * a) = law.Dp[p];
        if (law.R.size() > 0) g.RP.segment<6>(6 * a) = law.R.segment<6>(6 * p);
        for (size_t b = 0; b < g.P.size(); ++b)
            g.C0PP.block<6, 6>(6 * a, 6 * b) = sys.C0.block<6, 6>(6 * p, 6 * g.P[b]);
    }
    return g;
}

LinearSolution finish(const LinearSystem& sys, const Gathered& g, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& epsP, double load)
{
    LinearSolution s;
    s.x = x;
    const int G = sys.grid_points();
    s.sigma0 = Eigen::VectorXd::Zero(6 * G);
    const Eigen::VectorXd s0P = g.D * epsP + g.RP;
    for (size_t a = 0; a < g.P.size(); ++a) s.sigma0.segment<6>(6 * g.P[a]) = s0P.segment<6>(6 * a);
    s.eps = sys.C * x + load * sys.c;
    for (size_t a = 0; a < g.P.size(); ++a) s.eps += sys.C0.middleCols<6>(6 * g.P[a]) * s0P.segment<6>(6 * a);
    return s;
}

void check_finite(const Eigen::VectorXd& v, const char* what)
{
    if (!v.allFinite()) throw SolverError(std::string("singular system in ") + what);
}

}  // namespace

LinearSolution solve_coupled(const LinearSystem& sys, const InitialStressLaw& law, double load)
{
    const Gathered g = gather(sys, law);
    const int n = static_cast<int>(sys.L.rows()), m = static_cast<int>(g.D.rows());
    Eigen::MatrixXd K(n + m, n + m);
    K.topLeftCorner(n, n) = sys.L;
    K.topRightCorner(n, m) = -g.B0P * g.D;
    K.bottomLeftCorner(m, n) = -g.CP;
    K.bottomRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m) - g.C0PP * g.D;
    Eigen::VectorXd rhs(n + m);
    rhs.head(n) = load * sys.r + g.B0P * g.RP;
    rhs.tail(m) = load * g.cP + g.C0PP * g.RP;
    const Eigen::VectorXd z = K.fullPivLu().solve(rhs);
    check_finite(z, "the coupled solve");
    return finish(sys, g, z.head(n), z.tail(m), load);
}

LinearSolution solve_condensed(const LinearSystem& sys, const InitialStressLaw& law, double load)
{
    const Gathered g = gather(sys, law);
    const int m = static_cast<int>(g.D.rows());
    if (m == 0) {
        const Eigen::VectorXd x = sys.L.partialPivLu().solve(load * sys.r);
        check_finite(x, "the boundary solve");
        return finish(sys, g, x, Eigen::VectorXd(), load);
    }
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m) - g.C0PP * g.D;
    const auto lu = M.partialPivLu();
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) throw SolverError("inner strain matrix is near-singular");
    const Eigen::MatrixXd A = lu.solve(g.CP);
    const Eigen::VectorXd b = lu.solve(load * g.cP + g.C0PP * g.RP);
    const Eigen::MatrixXd BD = g.B0P * g.D;
    const Eigen::MatrixXd Lp = sys.L - BD * A;
    const Eigen::VectorXd rp = load * sys.r + g.B0P * g.RP + BD * b;
    const Eigen::VectorXd x = Lp.partialPivLu().solve(rp);
    check_finite(x, "the condensed solve");
    return finish(sys, g, x, A * x + b, load);
}

void SolverConfig::validate() const
{
    if (n_steps < 1) throw SolverError("n_steps must be at least 1");
    if (!(tol > 0.0)) throw SolverError("tol must be positive");
    if (max_iter < 1) throw SolverError("max_iter must be at least 1");
    if (!(tol_yield > 0.0)) throw SolverError("tol_yield must be positive");
}

SolveResult incremental_solve(const LinearSystem& sys, const std::vector<GridMaterial>& mat, const Vec6& sigma_v,
                              const SolverConfig& cfg)
{
    cfg.validate();
    const int G = sys.grid_points();
    if (static_cast<int>(mat.size()) != G) throw SolverError("material list does not match the grid");
    SolveResult res;
    res.points.resize(G);

    // elastic phase: sigma0 = (D - D_incl) eps, no iteration
    InitialStressLaw law;
    law.Dp.resize(G);
    for (int p = 0; p < G; ++p) law.Dp[p] = mat[p].contrast;
    const LinearSolution el = solve_condensed(sys, law, 1.0);
    res.history.push_back({0, 1, 1.0, 0.0});

    double lambda = 1.0;
    for (int p = 0; p < G; ++p)
        if (mat[p].yield) {
            const Vec6 ds = mat[p].De * el.eps.segment<6>(6 * p);
            lambda = std::min(lambda, first_yield_factor(sigma_v, ds, *mat[p].yield));
        }
    res.lambda = lambda;
    const auto set_elastic_state = [&](double s) {
        for (int p = 0; p < G; ++p) {
            auto& st = res.points[p];
            st.eps = s * el.eps.segment<6>(6 * p);
            st.sigma0 = s * el.sigma0.segment<6>(6 * p);
            if (mat[p].bolt) {
                st.sigma = Vec6::Zero();
                st.sigma[2] = mat[p].E * st.eps[2];
            } else {
                st.sigma = sigma_v + mat[p].De * st.eps;
            }
            st.F = mat[p].yield ? mc_yield(st.sigma, *mat[p].yield) : 0.0;
        }
    };
    set_elastic_state(lambda);
    res.x = lambda * el.x;
    res.last = el;
    if (lambda >= 1.0) return res;

    Eigen::VectorXd R = Eigen::VectorXd::Zero(6 * G);
    for (int step = 1; step <= cfg.n_steps; ++step) {
        const double load = lambda + (1.0 - lambda) * step / cfg.n_steps;
        const std::vector<PointState> start = res.points;
        // predictor: points already on the surface start with the plastic tangent
        for (int p = 0; p < G; ++p) {
            law.Dp[p] = mat[p].contrast;
            if (mat[p].yield && start[p].yielded)
                law.Dp[p] = mat[p].D - d_ep(start[p].sigma, mat[p].De, *mat[p].yield);
        }
        R.setZero();
        for (int p = 0; p < G; ++p)
            if (mat[p].yield) R.segment<6>(6 * p) = start[p].sigma0 - law.Dp[p] * start[p].eps;
        law.R = R;
        bool converged = false;
        int it = 0;
        for (it = 1; it <= cfg.max_iter && !converged; ++it) {
            const LinearSolution sol = solve_condensed(sys, law, load);
            Eigen::VectorXd s0 = sol.sigma0;
            for (int p = 0; p < G; ++p) {
                if (!mat[p].yield) continue;
                const auto& mc = *mat[p].yield;
                const Vec6 eps = sol.eps.segment<6>(6 * p);
                const Vec6 trial = start[p].sigma + mat[p].De * (eps - start[p].eps);
                const double Fn = mc_yield(trial, mc);
                const double f = start[p].yielded ? (Fn > 0.0 ? 1.0 : 0.0) : plastic_fraction(Fn, start[p].F);
                const auto rm = mc_return(trial, mat[p].E, mat[p].nu, mc);
                s0.segment<6>(6 * p) = sigma_v + mat[p].D * eps - rm.sigma;
                auto& st = res.points[p];
                st.eps = eps;
                st.sigma = rm.sigma;
                st.F = mc_yield(rm.sigma, mc);
                st.f = f;
                st.yielded = rm.plastic;
                // next linearisation
                Mat6 Dp = mat[p].contrast;
                if (rm.plastic) Dp = (1.0 - f) * mat[p].contrast + f * (mat[p].D - d_ep(rm.sigma, mat[p].De, mc));
                law.Dp[p] = Dp;
                R.segment<6>(6 * p) = s0.segment<6>(6 * p) - Dp * eps;
            }
            for (int p = 0; p < G; ++p) {
                if (mat[p].yield) continue;
                auto& st = res.points[p];
                st.eps = sol.eps.segment<6>(6 * p);
                st.sigma0 = s0.segment<6>(6 * p);
                if (mat[p].bolt) {
                    st.sigma = Vec6::Zero();
                    st.sigma[2] = mat[p].E * st.eps[2];
                } else {
                    st.sigma = sigma_v + mat[p].De * st.eps;
                }
            }
            const double norm = s0.norm();
            const double change = (s0 - sol.sigma0).norm() / (norm > 0.0 ? norm : 1.0);
            res.history.push_back({step, it, load, change});
            for (int p = 0; p < G; ++p)
                if (mat[p].yield) res.points[p].sigma0 = s0.segment<6>(6 * p);
            law.R = R;
            res.x = sol.x;
            res.last = sol;
            res.last.sigma0 = s0;
            converged = change <= cfg.tol;
        }
        --it;
        res.max_iterations = std::max(res.max_iterations, it);
        res.total_iterations += it;
        res.increments = step;
        if (!converged) {
            std::ostringstream os;
            os << "initial-stress iteration did not converge in step " << step << " after " << cfg.max_iter
               << " iterations";
            throw NonConvergenceError(os.str(), res.history);
        }
    }
    for (int p = 0; p < G; ++p)
        if (mat[p].yield && res.points[p].F > cfg.tol_yield * std::max(1.0, mat[p].yield->c))
            throw SolverError("stress left outside the yield surface");
    return res;
}

}  // namespace igabem

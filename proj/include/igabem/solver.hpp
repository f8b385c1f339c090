#pragma once

#include "igabem/plasticity.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

namespace igabem {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Boundary rows L x = load r + B0 sigma0 and grid strains eps = C x + load c + C0 sigma0.
struct LinearSystem {
    Eigen::MatrixXd L;
    Eigen::VectorXd r;
    Eigen::MatrixXd B0;  ///< 3N x 6G
    Eigen::MatrixXd C;   ///< 6G x 3N
    Eigen::VectorXd c;   ///< 6G
    Eigen::MatrixXd C0;  ///< 6G x 6G
    int grid_points() const { return static_cast<int>(B0.cols() / 6); }
};

/// Linearised initial-stress law sigma0 = Dp eps + R per grid point.
struct InitialStressLaw {
    std::vector<Mat6> Dp;
    Eigen::VectorXd R;  ///< 6G (empty means zero)
};

struct LinearSolution {
    Eigen::VectorXd x, eps, sigma0;
};

/// Points with a nonzero Dp block or R segment.
std::vector<int> active_points(const InitialStressLaw& law);

/// Boundary unknowns and active-point strains solved together as one block system.
LinearSolution solve_coupled(const LinearSystem& sys, const InitialStressLaw& law, double load = 1.0);

/// Strains eliminated first: L' x = r' with L' = L - B0 Dp A, A = (I - C0 Dp)^-1 C.
LinearSolution solve_condensed(const LinearSystem& sys, const InitialStressLaw& law, double load = 1.0);

/// Constitutive data of one grid point.
struct GridMaterial {
    Mat6 D = Mat6::Zero();         ///< host elasticity (the kernel medium)
    Mat6 contrast = Mat6::Zero();  ///< D - D_incl (bolts: only the axial entry)
    Mat6 De = Mat6::Zero();        ///< inclusion elasticity
    double E = 1.0, nu = 0.0;      ///< inclusion moduli (return mapping)
    bool bolt = false;
    std::optional<MohrCoulomb> yield;
};

struct SolverConfig {
    int n_steps = 10;
    double tol = 0.01;
    int max_iter = 50;
    double tol_yield = 1e-8;
    void validate() const;
};

struct PointState {
    Vec6 eps = Vec6::Zero();     ///< induced strain (bolts: axial strain in entry 2)
    Vec6 sigma = Vec6::Zero();   ///< total stress (bolts: axial stress in entry 2)
    Vec6 sigma0 = Vec6::Zero();
    double F = 0.0;              ///< yield function (0 for elastic materials)
    double f = 0.0;              ///< plastic fraction of the last increment
    bool yielded = false;        ///< on the yield surface at the end
};

struct IterationRecord {
    int step = 0;       ///< 0: elastic phase
    int iteration = 0;
    double load = 0.0;
    double change = 0.0;  ///< relative change of the initial-stress vector
};

struct SolveResult {
    Eigen::VectorXd x;
    LinearSolution last;
    std::vector<PointState> points;
    std::vector<IterationRecord> history;
    double lambda = 1.0;     ///< first-yield factor
    int increments = 0;
    int max_iterations = 0;  ///< largest iteration count of an increment
    int total_iterations = 0;
};

class NonConvergenceError : public SolverError {
public:
    NonConvergenceError(const std::string& what, std::vector<IterationRecord> h)
        : SolverError(what), history(std::move(h)) {}
    std::vector<IterationRecord> history;
};

/// Elastic solve, first-yield scaling and load increments with initial-stress iteration.
SolveResult incremental_solve(const LinearSystem& sys, const std::vector<GridMaterial>& mat, const Vec6& sigma_v,
                              const SolverConfig& cfg);

}  // namespace igabem

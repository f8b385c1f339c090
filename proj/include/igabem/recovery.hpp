#pragma once

#include "igabem/boundary.hpp"
#include "igabem/inclusion.hpp"

#include <Eigen/Sparse>

namespace igabem {

class RecoveryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// u = A x + c + B0 sigma0 at a set of points (c at full excavation load).
struct DisplacementRows {
    Eigen::MatrixXd A;   ///< 3m x 3N
    Eigen::VectorXd c;   ///< 3m
    Eigen::MatrixXd B0;  ///< 3m x 6G
};

/// Rows for points strictly inside the material (Somigliana identity without jump term).
DisplacementRows displacement_rows(const BoundaryModel& model, const SystemMatrices& sys, const InclusionSet& set,
                                   const std::vector<Vec3>& points, int threads = 1);

/// Interpolation weights of the boundary displacement parameters at a point on a patch.
std::vector<std::pair<int, double>> boundary_recovery(const BoundaryModel& model, const DofMap& dofs,
                                                      const PatchParam& at);

/// Displacement rows at every grid point: boundary recovery where the point lies on a patch,
/// the interior identity elsewhere.
DisplacementRows grid_displacement_rows(const BoundaryModel& model, const SystemMatrices& sys,
                                        const InclusionSet& set, int threads = 1);

/// Nodal strain operator (6G x 3G): Voigt strains at the grid points from grid-point
/// displacements. General inclusions average the nodal derivatives over incident cells;
/// bolts fill only row 2 with the axial strain in the bolt frame.
Eigen::SparseMatrix<double> strain_operator(const InclusionSet& set);

/// Strains at grid points: eps = C x + c + C0 sigma0.
struct StrainSystem {
    Eigen::MatrixXd C;   ///< 6G x 3N
    Eigen::VectorXd c;   ///< 6G
    Eigen::MatrixXd C0;  ///< 6G x 6G
};

StrainSystem strain_system(const Eigen::SparseMatrix<double>& Bhat, const DisplacementRows& grid_rows);

}  // namespace igabem

#pragma once

#include "igabem/kelvin.hpp"
#include "igabem/patch.hpp"
#include "igabem/quadrature.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace igabem {

class ConnectivityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BoundaryModel {
    std::vector<Patch> patches;
    ElasticConstants k;
    Vec6 virgin_stress = Vec6::Zero();  ///< Voigt, compression negative
    QuadConfig quad;
};

/// Location of a point on a patch.
struct PatchParam {
    int patch = -1;
    std::array<double, 2> param{0.0, 0.0};
};

struct CollocationPoint {
    int index = 0;
    int patch = -1;                     ///< owning patch
    std::array<double, 2> param{0.0, 0.0};
    Vec3 y = Vec3::Zero();
    std::vector<PatchParam> on_patches; ///< every patch the point lies on
};

/// Global displacement parameters, one collocation point each, shared across patches by
/// geometric coincidence of the Greville images.
struct DofMap {
    std::vector<std::vector<int>> global;  ///< [patch][local field function] -> point index
    std::vector<CollocationPoint> points;
    int size() const { return static_cast<int>(points.size()); }
};

DofMap build_dofs(const std::vector<Patch>& patches, double tol = 1e-9);

/// t = -sigma_v n.
Vec3 excavation_traction(const Vec6& sigma_v, const Vec3& n);

/// Traction basis on a patch: the field basis, without the decay factor on infinite patches.
void traction_basis(const Patch& p, double xi, double eta, std::vector<int>& idx, std::vector<double>& val);

/// Traction parameters fitted at the Greville points of the traction basis
/// (infinite patches: constant along eta, fitted on the finite edge).
std::vector<Vec3> excavation_tractions(const Vec6& sigma_v, const Patch& p);

/// Integration regions of each patch, with lines through every collocation point lying on it.
std::vector<std::vector<IntegrationRegion>> build_regions(const std::vector<Patch>& patches, const DofMap& dofs,
                                                           const QuadConfig& cfg);

struct RowIntegrals {
    std::vector<Mat3> T;  ///< per local field function
    std::vector<Mat3> U;  ///< per local traction function
    Mat3 S = Mat3::Zero(); ///< integral of T over the patch
};

/// Integrals of U and T against the patch basis for source y. If `apex` is set, y lies on
/// the patch at that parameter and the triangle rule is used in regions touching it.
RowIntegrals integrate_row(const Patch& p, const std::vector<IntegrationRegion>& regions, const Vec3& y,
                           const std::optional<std::array<double, 2>>& apex, const ElasticConstants& k,
                           const QuadConfig& cfg, int patch_id = -1);

struct SystemMatrices {
    Eigen::MatrixXd L;
    Eigen::VectorXd r;
    Eigen::MatrixXd B0;  ///< 3N x (6 * grid points), filled by the inclusion engine
    DofMap dofs;
    std::vector<std::vector<IntegrationRegion>> regions;
    std::vector<std::vector<Vec3>> tractions;  ///< per patch traction parameters
};

/// Boundary rows: L x = r with L = sum_k T_nk + (I - S_n) at u(y_n).
SystemMatrices assemble(const BoundaryModel& model, int threads = 1);

/// Displacement field of the boundary solution at parameter (xi, eta) of patch p.
Vec3 boundary_displacement(const BoundaryModel& model, const DofMap& dofs, const Eigen::VectorXd& x, int patch,
                           double xi, double eta);

}  // namespace igabem

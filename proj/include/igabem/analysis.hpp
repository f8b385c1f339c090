#pragma once

#include "igabem/boundary.hpp"
#include "igabem/inclusion.hpp"
#include "igabem/recovery.hpp"
#include "igabem/solver.hpp"

#include <string>
#include <vector>

namespace igabem {

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MaterialDef {
    std::string id;
    double E = 1.0;
    double nu = 0.0;
    std::optional<MohrCoulomb> yield;
};

/// Straight line of evenly spaced output points (count >= 2 includes both ends).
struct SampleLine {
    std::string id;
    Vec3 from = Vec3::Zero(), to = Vec3::Zero();
    int count = 2;
    std::vector<Vec3> points() const;
};

struct Model {
    int version = 1;
    std::string name;
    std::string units = "consistent";
    double E = 1.0, nu = 0.0;  ///< the surrounding medium
    Vec6 virgin_stress = Vec6::Zero();
    std::vector<Patch> patches;
    std::vector<MaterialDef> materials;
    std::vector<GeneralInclusion> general;  ///< GeneralInclusion::material names a MaterialDef
    std::vector<LinearInclusion> linear;
    SolverConfig solver;
    QuadConfig quad;
    std::vector<SampleLine> samples;

    /// Throws ValidationError naming the offending entry.
    void validate() const;
    const MaterialDef& material(const std::string& id) const;
};

struct Timings {
    double assemble = 0.0, inclusions = 0.0, recovery = 0.0, solve = 0.0, total = 0.0;
};

struct AnalysisResult {
    BoundaryModel boundary;
    SystemMatrices sys;
    InclusionSet set;
    LinearSystem linear;          ///< boundary rows and grid strain system handed to the solver
    std::vector<GridMaterial> materials;
    SolveResult solve;
    Eigen::VectorXd sigma0;       ///< final initial stresses, 6G
    std::vector<Vec3> grid_u;     ///< displacement at every grid point
    Timings timings;
};

struct AnalysisOptions {
    int threads = 1;
};

AnalysisResult run_analysis(const Model& model, const AnalysisOptions& opt = {});

/// Displacements at arbitrary points of the solved model (points on a boundary patch are
/// interpolated from the boundary parameters).
std::vector<Vec3> sample_displacements(const AnalysisResult& res, const std::vector<Vec3>& points, int threads = 1);

/// Per-point materials: D - D_incl, inclusion elasticity and yield data.
std::vector<GridMaterial> grid_materials(const Model& model, const InclusionSet& set);

}  // namespace igabem

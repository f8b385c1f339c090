#pragma once

#include "igabem/analysis.hpp"

#include <string>
#include <vector>

namespace igabem {

/// One output point of a sample line.
struct SampleRow {
    std::string line;
    int index = 0;
    Vec3 x = Vec3::Zero(), u = Vec3::Zero();
};

/// Displacements along every sample line of the model.
std::vector<SampleRow> sample_rows(const Model& model, const AnalysisResult& res, int threads = 1);

/// CSV writers; an empty table still gets its header line.
void write_samples_csv(const std::string& path, const std::vector<SampleRow>& rows);
void write_grid_csv(const std::string& path, const AnalysisResult& res);
void write_history_csv(const std::string& path, const SolveResult& solve);

/// Legacy ASCII VTK unstructured grid: the boundary tessellated with `divisions` quads per
/// knot span direction (infinite patches truncated at eta = 0.75) plus the grid points as
/// vertices, with displacement point data.
void write_vtk(const std::string& path, const AnalysisResult& res, int divisions = 4);

}  // namespace igabem
